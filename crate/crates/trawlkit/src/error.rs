use thiserror::Error;

/// Library error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An integral did not converge or its tail does not decay.
    #[error("divergent or non-convergent integral: {0}")]
    DivergentIntegral(String),

    /// A moment-based quantity was requested for a law without that moment.
    #[error("undefined moment: {0}")]
    UndefinedMoment(String),

    /// The requested operation is not available for this input variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// An iterative routine exhausted its budget; carries the residual.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Matrix factorization failed (covariance not positive semidefinite).
    #[error("factorization failed: {0}")]
    Factorization(String),

    /// Malformed specification string (CLI/config surface).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
