use thiserror::Error;

/// Errors raised by the numerical routines and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("spectrum is not integer-valued, no period can be certified")]
    NoPeriod,

    #[error("channel is not time-covariant (max deviation {0:.3e})")]
    CovarianceViolation(f64),

    #[error("channel is not passive (free energy rises by {0:.3e})")]
    PassivityViolation(f64),

    #[error("window {window} too small: {reason}")]
    WindowTooSmall { window: usize, reason: String },

    #[error("environment dimension {0} exceeds the supported maximum")]
    EnvironmentTooLarge(usize),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("grid is not uniform: {0}")]
    NonUniformGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
