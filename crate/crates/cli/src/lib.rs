//! Experiment layer: configs, presets, runs and emitted artifacts.

pub mod config;
pub mod experiments;
pub mod presets;
pub mod report;
pub mod svg;

pub use config::ExperimentConfig;
pub use experiments::run_experiment;
pub use report::{RunReport, Series, Verdict};

use qfi_core::QfiError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("capability error: {0}")]
    Capability(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] QfiError),
    #[error("{0} verdict(s) failed")]
    VerdictFailure(usize),
}

impl CliError {
    /// 2 config, 3 capability, 4 failed verdicts under `--check`, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Capability(_) => 3,
            CliError::VerdictFailure(_) => 4,
            CliError::Core(QfiError::Capability(_)) => 3,
            CliError::Core(QfiError::Config(_) | QfiError::Input(_)) => 2,
            CliError::Core(QfiError::Sample { source, .. }) => CliError::Core((**source).clone()).exit_code(),
            CliError::Core(_) | CliError::Io(_) => 1,
        }
    }
}
