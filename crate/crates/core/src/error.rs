use thiserror::Error;

/// Errors raised by matrix kernels, channel conversions and program construction.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("members {first} and {second} are not orthogonal (inner product {inner:.3e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        inner: f64,
    },

    #[error("trace mismatch: {left} vs {right}")]
    TraceMismatch { left: f64, right: f64 },

    #[error("Kraus operator {index} has rank {rank}, expected rank one")]
    NotRankOne { index: usize, rank: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DimensionMismatch(msg.into()))
}
