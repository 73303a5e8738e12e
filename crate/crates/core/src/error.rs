//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by lattice construction, scheme building and metric
/// evaluation.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A caller-supplied parameter violates a precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// A numerical check failed beyond tolerance; indicates a bug rather
    /// than bad input.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    /// The requested combination of inputs is outside what the operation
    /// supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An exhaustive scan was requested on a constellation too large for
    /// the tractability guard.
    #[error("too large: {0}")]
    TooLarge(String),
    /// An outage parameter lies outside the regime where the bound is
    /// finite.
    #[error("out of regime: {0}")]
    OutOfRegime(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, CoreError>;
