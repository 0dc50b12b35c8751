use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("value {value} outside the domain {domain}")]
    Domain { value: f64, domain: String },

    #[error("state vector is not normalized (norm {0:.12})")]
    Normalization(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("positivity violated: smallest eigenvalue {0:.3e}")]
    Positivity(f64),

    #[error("step size underflow at t = {t:.6e} (h = {step:.3e})")]
    Stiffness { t: f64, step: f64 },

    #[error("{0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
