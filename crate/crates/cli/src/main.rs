use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qfi_cli::presets::{preset, PRESET_NAMES};
use qfi_cli::{run_experiment, CliError, ExperimentConfig};
use qfi_core::weingarten_table;

#[derive(Parser)]
#[command(name = "qfi", version, about = "Quantum Fisher information of chaotic Floquet sensing protocols")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, clap::Args)]
struct Overrides {
    /// Output directory (default: the config's out_dir, else out/<name>)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    threads: Option<usize>,
    /// Exit with status 4 if any verdict fails
    #[arg(long)]
    check: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment from a JSON config file
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a built-in preset, or print its config with --print
    Preset {
        name: String,
        #[arg(long)]
        print: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the exact Weingarten table as JSON
    Weingarten {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        n: usize,
    },
    /// List built-in presets
    ListPresets,
}

fn execute(mut cfg: ExperimentConfig, o: &Overrides) -> Result<(), CliError> {
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = o.samples {
        cfg.samples = samples;
    }
    if o.threads.is_some() {
        cfg.threads = o.threads;
    }
    let dir = o
        .out
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| Path::new("out").join(&cfg.name));
    let report = run_experiment(&cfg)?;
    report.write(&dir)?;
    for v in &report.verdicts {
        println!(
            "{} {:<28} observed {:.6e} expected {:.6e} tol {:.3e}  {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            v.observed,
            v.expected,
            v.tolerance,
            v.detail
        );
    }
    println!("wrote {} ({:.2} s)", dir.display(), report.timings.compute_seconds);
    let failed = report.verdicts.iter().filter(|v| !v.passed).count();
    if o.check && failed > 0 {
        return Err(CliError::VerdictFailure(failed));
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { config, overrides } => execute(ExperimentConfig::from_file(&config)?, &overrides),
        Command::Preset { name, print, overrides } => {
            let cfg = preset(&name).ok_or_else(|| CliError::Config {
                path: "preset".into(),
                message: format!("unknown preset `{name}`; see `qfi list-presets`"),
            })?;
            if print {
                println!("{}", cfg.to_json_pretty());
                return Ok(());
            }
            execute(cfg, &overrides)
        }
        Command::Weingarten { t, n } => {
            let table = weingarten_table(t, n)?;
            println!("{}", serde_json::to_string_pretty(&table.to_json()).expect("table serializes"));
            Ok(())
        }
        Command::ListPresets => {
            for name in PRESET_NAMES {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
