use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("eigenvalue {value:.6e} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("{method} did not converge (residual {residual:.3e})")]
    NoConvergence { method: &'static str, residual: f64 },
    #[error("state is not faithful (smallest eigenvalue {min_eigenvalue:.3e}); use the support-projected variant")]
    NotFaithful { min_eigenvalue: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("S-matrix pole at distance {distance:.3e} from the evaluation point (pole parameter b = {pole})")]
    Pole { pole: f64, distance: f64 },
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("discretisation not converged: {0}")]
    Discretisation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
