use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor rejected its parameters.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluator was called outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Series or quadrature did not converge; carries the best estimate.
    #[error("numerical failure: {message} (estimate {estimate:e}, error bound {error_bound:e})")]
    NumericalFailure {
        message: String,
        estimate: f64,
        error_bound: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
