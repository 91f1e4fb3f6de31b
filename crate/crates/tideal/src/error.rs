//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid tableau: {0}")]
    InvalidTableau(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("blocks must cover each variable exactly once: {0}")]
    VariableCoverage(String),

    #[error("not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("size cap exceeded: {what} requires {needed} but the cap is {cap}")]
    CapExceeded {
        what: String,
        needed: usize,
        cap: usize,
    },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),

    #[error("methods disagree: {0}")]
    MethodDisagreement(String),

    #[error("negative coefficient in Schur expansion: {0}")]
    NegativeCoefficient(String),

    #[error("empty word has no central run")]
    NoCentralRun,
}
