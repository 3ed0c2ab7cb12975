use thiserror::Error;

/// Errors raised by the projection library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("non-finite value encountered")]
    NonFinite,

    #[error("eigensolver did not converge on {dim}x{dim} matrix (fingerprint {fingerprint:016x})")]
    Eigensolver { dim: usize, fingerprint: u64 },

    #[error("identity mixing is degenerate (min eigenvalue {min_eigenvalue:e}, dim {dim})")]
    DegenerateMixing { min_eigenvalue: f64, dim: usize },

    #[error("trace must be 1 (got {trace})")]
    TraceNotOne { trace: f64 },

    #[error("POVM must contain at least one element")]
    EmptyPovm,

    #[error("Dykstra bookkeeping violated (residual {residual:e})")]
    Bookkeeping { residual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
