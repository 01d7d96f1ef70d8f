//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::collections::BTreeMap;
use std::process::ExitCode;

use qfi_cli::config::{ChainState, Experiment, HamiltonianSpec, RqcSites, ScheduleSpec, WeingartenDump};
use qfi_cli::presets::{all_presets, preset};
use qfi_cli::{run_experiment, ExperimentConfig, RunReport};
use qfi_core::metrology::{evolve, qfi_state_recursion};
use qfi_core::{
    qfi_operator, qfi_trajectory, random_state, sample_cue, weingarten_table, HermitianDiagonal, ProtocolKind,
    SensingSpec, SeedPath,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    id: usize,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn run(cfg: &ExperimentConfig) -> RunReport {
    run_experiment(cfg).unwrap_or_else(|e| panic!("{}: {e}", cfg.name))
}

fn verdicts_pass(report: &RunReport, names: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        match report.verdict(name) {
            Some(v) => {
                ok &= v.passed;
                parts.push(format!("{name}={:.4}", v.observed));
            }
            None => {
                ok = false;
                parts.push(format!("{name} missing"));
            }
        }
    }
    (ok, parts.join(" "))
}

fn preset_outcome(
    id: usize,
    title: &'static str,
    report: &RunReport,
    names: &[&str],
    max_seconds: Option<f64>,
) -> Outcome {
    let (mut passed, mut detail) = verdicts_pass(report, names);
    let secs = report.timings.compute_seconds;
    if let Some(limit) = max_seconds {
        passed &= secs < limit;
        detail.push_str(&format!(" runtime {secs:.2}s < {limit}s"));
    }
    Outcome { id, title, passed, detail }
}

fn weingarten_oracle() -> (Outcome, Vec<RunReport>) {
    let mut passed = true;
    let mut parts = Vec::new();
    let mut reports = Vec::new();
    for n in [3usize, 5] {
        let mut cfg = preset("t1-exact").unwrap();
        cfg.name = format!("weingarten-t2-N{n}");
        cfg.samples = 100_000;
        cfg.experiment = Experiment::WeingartenDump(WeingartenDump { t: 2, dim: n, se_multiple: 3.0 });
        let report = run(&cfg);
        let (ok, d) = verdicts_pass(&report, &["weingarten-moments"]);
        passed &= ok;
        parts.push(format!("N={n} {d}"));
        reports.push(report);

        let table = weingarten_table(2, n).unwrap().to_json();
        let nn = n * n - 1;
        for entry in &table.entries {
            let expected = if entry.cycle_type == [1, 1] {
                ("1".to_string(), nn.to_string())
            } else {
                ("-1".to_string(), (n * nn).to_string())
            };
            let exact = (entry.numerator.clone(), entry.denominator.clone()) == expected;
            passed &= exact;
            parts.push(format!("{:?}={}/{}", entry.cycle_type, entry.numerator, entry.denominator));
        }
    }
    (Outcome { id: 3, title: "Weingarten oracle t=2", passed, detail: parts.join(" ") }, reports)
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut worst_rec, mut worst_fid) = (0.0f64, 0.0f64);
    for i in 0..50u64 {
        let n = rng.random_range(2..=64usize);
        let t = rng.random_range(1..=6usize);
        let theta = rng.random_range(-3.0..3.0);
        let h: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = SensingSpec::new(HermitianDiagonal::new(h).unwrap(), theta).unwrap();
        let seed = SeedPath::new(2024).child(i);
        let u = sample_cue(n, &seed.child(0)).unwrap();
        let psi0 = random_state(n, &seed.child(1)).unwrap();
        for p in ProtocolKind::ALL {
            let traj = qfi_trajectory(p, &u, &spec, t, &psi0).unwrap();
            let dense = qfi_operator(p, &u, &spec, t, &psi0).unwrap();
            worst_rec = worst_rec.max((traj[t] - dense).abs() / dense.abs().max(1e-300));

            let f = qfi_state_recursion(p, &u, &spec, t, &psi0).unwrap();
            let d = 1e-4;
            let a = evolve(p, &u, &spec, t, &psi0).unwrap();
            let b = evolve(p, &u, &spec.with_theta(theta + d).unwrap(), t, &psi0).unwrap();
            let fid = 8.0 * (1.0 - a.inner(&b).norm()) / (d * d);
            worst_fid = worst_fid.max((fid - f).abs() / f);
        }
    }
    Outcome {
        id: 11,
        title: "recursion vs operator vs fidelity",
        passed: worst_rec <= 1e-8 && worst_fid <= 1e-3,
        detail: format!("50 instances, max rel diff recursion {worst_rec:.2e} (<= 1e-8), fidelity {worst_fid:.2e} (<= 1e-3)"),
    }
}

fn ghz_product() -> (Outcome, Vec<RunReport>) {
    let make = |state: ChainState, seed: u64| {
        let mut cfg = preset("rqc-sites-product").unwrap();
        cfg.name = format!("q8-L2-{}", if state == ChainState::Ghz { "ghz" } else { "product" });
        cfg.seed = seed;
        cfg.samples = 400;
        cfg.substitutions.clear();
        cfg.experiment = Experiment::RqcSites(RqcSites {
            local_dim: 8,
            sites: vec![2],
            t: 2,
            theta: 1.0,
            hamiltonian: HamiltonianSpec::TracelessDefault,
            initial_state: state,
            schedule: ScheduleSpec::Brickwork,
            protocols: ProtocolKind::ALL.to_vec(),
            slope_tolerance: 0.15,
        });
        run(&cfg)
    };
    let product = make(ChainState::Product, 31);
    let ghz = make(ChainState::Ghz, 32);
    let mut passed = true;
    let mut parts = Vec::new();
    for label in ["ctr", "sp"] {
        let (a, b) = (product.series(label).unwrap(), ghz.series(label).unwrap());
        let se = (a.stderr[0].powi(2) + b.stderr[0].powi(2)).sqrt();
        let z = (a.mean[0] - b.mean[0]).abs() / se;
        passed &= z <= 3.0;
        parts.push(format!("{label}: product {:.3} ghz {:.3} |diff|/SE {z:.2}", a.mean[0], b.mean[0]));
    }
    (Outcome { id: 12, title: "GHZ vs product at q=8, L=2", passed, detail: parts.join("; ") }, vec![product, ghz])
}

fn main() -> ExitCode {
    let mut reports: BTreeMap<String, RunReport> = BTreeMap::new();
    for cfg in all_presets() {
        let report = run(&cfg);
        eprintln!("ran preset {} in {:.2}s", cfg.name, report.timings.compute_seconds);
        reports.insert(cfg.name.clone(), report);
    }
    let r = |name: &str| &reports[name];

    let mut outcomes = vec![
        preset_outcome(1, "RMM time scaling", r("rmm-time"), &["fit-ctr", "fit-sp"], Some(60.0)),
        preset_outcome(2, "exact t=1 law", r("t1-exact"), &["t1-exact"], Some(30.0)),
    ];
    let (wg, wg_reports) = weingarten_oracle();
    outcomes.push(wg);

    let (ok_c, d_c) = verdicts_pass(r("sff-ctr"), &["sff-ctr"]);
    let (ok_s, d_s) = verdicts_pass(r("sff-sp"), &["sff-sp"]);
    outcomes.push(Outcome { id: 4, title: "spectral form factor", passed: ok_c && ok_s, detail: format!("{d_c} {d_s}") });

    outcomes.push(preset_outcome(5, "RQC site scaling", r("rqc-sites-product"), &["slope-ctr", "slope-sp"], Some(600.0)));
    outcomes.push(preset_outcome(
        6,
        "RQC time scaling",
        r("rqc-time-product"),
        &["fit-residual-ctr", "fit-residual-sp"],
        None,
    ));

    let cue = r("cue-equivalence");
    let mut o7 = preset_outcome(7, "RQC to CUE equivalence", cue, &["gap-decreasing"], None);
    o7.passed &= cue.config.samples >= 200;
    o7.detail.push_str(&format!(" samples {}", cue.config.samples));
    outcomes.push(o7);

    let (o12, ghz_reports) = ghz_product();

    let all: Vec<&RunReport> = reports.values().chain(&wg_reports).chain(&ghz_reports).collect();
    let (mut checked, mut violations, mut max_ratio) = (0, 0, 0.0f64);
    for rep in &all {
        if let Some(b) = rep.bound_check {
            checked += b.checked;
            violations += b.violations;
            max_ratio = max_ratio.max(b.max_ratio);
        }
    }
    outcomes.push(Outcome {
        id: 8,
        title: "hard bound",
        passed: violations == 0 && checked > 0,
        detail: format!("{violations} violations in {checked} realizations, max F/(t^2 Δ^2) {max_ratio:.4}"),
    });

    outcomes.push(preset_outcome(
        9,
        "symmetric subspace",
        r("symmetric-check"),
        &["symmetric-dimension", "symmetric-trace"],
        None,
    ));

    let mut tail_ok = true;
    let mut tail_presets = 0;
    for rep in &all {
        if let Some(v) = rep.verdict("concentration-tail") {
            tail_presets += 1;
            tail_ok &= v.passed;
        }
    }
    let conc = &r("concentration-rmm").concentration;
    let rel = |n: f64| conc.iter().find(|c| c.series == "ctr" && c.x == n).map(|c| c.relative_std);
    let (r100, r400) = (rel(100.0), rel(400.0));
    let decreasing = matches!((r100, r400), (Some(a), Some(b)) if b < a);
    outcomes.push(Outcome {
        id: 10,
        title: "concentration",
        passed: tail_ok && tail_presets > 0 && decreasing,
        detail: format!(
            "tails within bound in {tail_presets} runs: {tail_ok}; std/mean N=100 {:.4} N=400 {:.4}",
            r100.unwrap_or(f64::NAN),
            r400.unwrap_or(f64::NAN)
        ),
    });

    outcomes.push(oracle_equivalence());
    outcomes.push(o12);
    outcomes.sort_by_key(|o| o.id);

    let mut failed = 0;
    for o in &outcomes {
        if !o.passed {
            failed += 1;
        }
        println!("{} {:>2} {:<36} {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.title, o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
