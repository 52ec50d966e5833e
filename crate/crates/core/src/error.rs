//! Error type shared by all solver entry points.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are not conformal for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An explicit precondition of the operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The QR iteration did not deflate every eigenvalue within its budget.
    #[error("Schur iteration failed to converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    /// The generalized eigenproblem has an infinite eigenvalue
    /// (zero diagonal entry in S), which is out of scope here.
    #[error("infinite eigenvalue: S({index},{index}) is zero")]
    InfiniteEigenvalue { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DimensionMismatch(msg.into()))
}

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
