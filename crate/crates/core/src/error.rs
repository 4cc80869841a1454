//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument violated a precondition (non-positive threshold,
    /// non-finite input, invalid constant, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Operands have incompatible shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An estimator was fed an empty sample set.
    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    /// A singleton observation index fell outside the matrix.
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    /// A matrix that must be symmetric was asymmetric beyond tolerance.
    #[error("matrix asymmetric beyond tolerance: {0}")]
    Asymmetric(String),

    /// The dataset encoding does not match the problem kind.
    #[error("encoding mismatch: {0}")]
    EncodingMismatch(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// `value > 0`, rejecting NaN; `what` names the parameter in the error.
pub(crate) fn require_positive(value: f64, what: &str) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be positive, got {value}")))
    }
}

/// `value >= 0`, rejecting NaN.
pub(crate) fn require_non_negative(value: f64, what: &str) -> Result<()> {
    if value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} must be non-negative, got {value}")))
    }
}
