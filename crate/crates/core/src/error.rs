//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operation called with incompatible matrix shapes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Instance or config data violates a construction invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Requested size outside what an operation supports.
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    /// No strict sign vector could be found for an arrangement.
    #[error("degenerate arrangement: {0}")]
    DegenerateArrangement(String),

    /// An operation precondition was violated by the caller.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
