use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum MmsError {
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("presentation invalid for {group}: rank {got}, expected {expected}")]
    PresentationInvalid { group: String, expected: usize, got: usize },

    #[error("sublattice not contained in the ambient lattice")]
    Containment,

    #[error("linear system has no solution")]
    NoSolution,

    /// Degenerate pairing; carries a basis of the kernel.
    #[error("degenerate pairing (kernel dimension {})", .kernel.len())]
    Degenerate { kernel: Vec<Vec<BigRational>> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, MmsError>;

pub(crate) fn big(n: i64) -> BigInt {
    BigInt::from(n)
}
