//! Error type shared by every module in the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Matrix construction rejected the input (zero dimension, length
    /// mismatch, non-finite entry).
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    /// Operands have incompatible shapes for the requested operation.
    #[error("dimension mismatch in {op}: {details}")]
    DimensionMismatch { op: &'static str, details: String },

    /// The Jacobi SVD sweep limit was reached before the off-diagonal
    /// mass dropped below the convergence threshold.
    #[error("SVD did not converge within {sweeps} sweeps")]
    SvdNonConvergence { sweeps: usize },

    /// A linear solve met a matrix that is singular to working precision.
    #[error("matrix is numerically singular in {op} (condition estimate {cond_estimate:.3e})")]
    NumericallySingular { op: &'static str, cond_estimate: f64 },

    /// A Cholesky factorization found a non-positive pivot.
    #[error("matrix is not positive definite in {op} (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite {
        op: &'static str,
        pivot: f64,
        index: usize,
    },

    /// A mathematical hypothesis of the requested formula does not hold
    /// for the given data.
    #[error("precondition violated in {op}: {details}")]
    PreconditionViolation { op: &'static str, details: String },

    /// Rejection sampling gave up before finding a qualifying instance.
    #[error("search budget of {budget} attempts exhausted: {details}")]
    SearchExhausted { budget: usize, details: String },

    /// Matrix Market input could not be parsed.
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// The external SVD engine used by the oracle failed.
    #[error("oracle decomposition failed: {0}")]
    OracleFailure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("manifest error: {0}")]
    Manifest(String),
}

pub type Result<T> = std::result::Result<T, Error>;
