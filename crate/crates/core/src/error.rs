use thiserror::Error;

/// Errors raised by circuit construction, simulation and verification.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("invalid qubit index: {0}")]
    Index(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("register layout mismatch: {0}")]
    Layout(String),
    #[error("resource model: {0}")]
    Model(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
