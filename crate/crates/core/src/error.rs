//! Error taxonomy shared across the crate.
//!
//! The CLI maps these onto exit codes: usage/config problems (1),
//! hypothesis violations (2), numerical failures (3).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A structural hypothesis of the model is violated (e.g. the
    /// principal eigenvalue at lambda = 0 is nonnegative, so no minimal
    /// speed exists).
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),

    /// The mesh does not resolve a concentration layer.
    #[error("under-resolved layer: need N >= {needed}, got {got}")]
    Resolution { needed: usize, got: usize },

    /// An iterative method failed to converge or a certificate check
    /// failed beyond its allowance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A condition that should hold by construction does not; signals a
    /// bug rather than bad input.
    #[error("internal consistency: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
