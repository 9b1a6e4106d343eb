use thiserror::Error;

/// Errors raised by state construction, discord evaluation and the optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A quantity left the domain where the formulas are defined
    /// (unphysical covariance, negative discriminant, entropy argument below 1).
    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    /// The objective produced a non-finite value or failed at `at`.
    #[error("objective evaluation failed at {at:?}: {reason}")]
    Evaluation { at: Vec<f64>, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::NumericDomain(msg.into())
}
