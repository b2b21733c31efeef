use crate::linalg::C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node solver did not converge for degree {degree} after {iterations} iterations")]
    NoConvergence { degree: usize, iterations: usize },

    #[error("matrix is numerically singular (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("eigenbasis is ill-conditioned (cond = {condition:.3e}); use a different FFT radius")]
    IllConditionedEigenbasis { condition: f64 },

    #[error("eigenvalue iteration failed to converge for a {0}x{0} matrix")]
    EigenFailure(usize),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("transfer function sampled at s = {s} with Re s < sigma0 = {sigma0}")]
    OutsideHalfPlane { s: C64, sigma0: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial root residual {0:.3e} exceeds tolerance")]
    RootResidual(f64),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("malformed artifact: {0}")]
    Decode(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
