use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("argument {value} outside certified range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },
    #[error("accuracy target {requested:e} not reached (achieved {achieved:e})")]
    Accuracy { achieved: f64, requested: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("bad data: {0}")]
    Data(String),
    #[error("ill-conditioned: {0}")]
    Conditioning(String),
    #[error("noise gate: {0}")]
    NoiseGate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
