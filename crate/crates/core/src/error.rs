use thiserror::Error;

/// Errors raised by the solver crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("invalid phase function: {0}")]
    InvalidPhaseFunction(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("defective operator at k = {k}: eigenvalue gap {gap:e}, condition {condition:e}")]
    DefectiveOperator { k: f64, gap: f64, condition: f64 },

    #[error("numerical instability at k = {k}: condition estimate {condition:e}")]
    NumericalInstability { k: f64, condition: f64 },

    #[error("singular resolvent at k = {k}")]
    SingularResolvent { k: f64 },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("degenerate transport: {0}")]
    DegenerateTransport(String),

    #[error("scale violation: {0}")]
    Scale(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
