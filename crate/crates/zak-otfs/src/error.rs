//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty channel profile")]
    EmptyProfile,

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergent(String),

    #[error("matrix is singular or not positive definite: {0}")]
    Singular(String),

    #[error("covariance not positive semidefinite: min eigenvalue {min_eig:e}")]
    NotPsd { min_eig: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
