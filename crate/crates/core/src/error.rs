use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QfiError {
    /// Invalid argument: mismatched dimensions, non-finite values, bad state norm.
    #[error("invalid input: {0}")]
    Input(String),

    /// Requested object exceeds a configured size or degree cap.
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// Inconsistent configuration, e.g. a brickwork schedule on an odd chain.
    #[error("configuration error: {0}")]
    Config(String),

    /// A quantity that must be non-negative came out clearly negative.
    #[error("numerical consistency violated: {0}")]
    Numerical(String),

    /// Least-squares design matrix is degenerate.
    #[error("fit error: {0}")]
    Fit(String),

    /// An ensemble estimator failed on one sample.
    #[error("sample {index} (seed path {seed_path}) failed: {source}")]
    Sample {
        index: usize,
        seed_path: String,
        #[source]
        source: Box<QfiError>,
    },
}

pub type Result<T> = std::result::Result<T, QfiError>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(QfiError::Input(msg.into()))
}
