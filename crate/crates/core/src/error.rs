//! Error taxonomy shared by the whole crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A constructor or operation received a parameter outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested operation is not defined for the given object
    /// (e.g. pointwise evaluation of an exact contact kernel).
    #[error("unsupported operation: {0}")]
    UnsupportedOperation(String),

    /// An analytically impossible condition was detected at runtime
    /// (e.g. the overlap exponent exceeding its proven bound).
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// A numerical procedure failed to reach its target accuracy.
    #[error("numeric failure: {message} (residual estimate {residual:e})")]
    NumericFailure { message: String, residual: f64 },

    /// Config-text parsing failure; carries the offending line (1-based)
    /// and, when known, the key involved.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::UnsupportedOperation(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Error::InvariantViolation(msg.into())
    }
}
