use thiserror::Error;

/// Errors produced while validating inputs or evaluating transitions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population vector is empty")]
    EmptyVector,
    #[error("population {index} is negative ({value})")]
    NegativePopulation { index: usize, value: f64 },
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("populations sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },
    #[error("invalid sharp-state rank {rank} for dimension {dim}")]
    InvalidRank { dim: usize, rank: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("inverse temperatures differ ({0} vs {1})")]
    BetaMismatch(f64, f64),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("matrix is not Hermitian (deviation {0})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0})")]
    NotPositive(f64),
    #[error("trace is {0}, expected 1")]
    BadTrace(f64),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("linear program: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
