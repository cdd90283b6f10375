use thiserror::Error;

pub use crate::models::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegretError {
    #[error("the preference statement would leave no admissible parameter")]
    Inconsistent,
    #[error("the parameter polytope is empty")]
    Infeasible,
    #[error(
        "vertex enumeration is limited to dimension {max}, got {dim}; sample the polytope instead"
    )]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("invalid preference statement: {0}")]
    InvalidStatement(String),
    #[error("regret is undefined over an empty solution set")]
    EmptySet,
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("instance too large for exhaustive enumeration: {0}")]
    SizeGuard(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("operation not supported for this problem: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Raised by a decision maker that cannot answer right now.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DmError {
    #[error("no recorded answer left for query {0}")]
    Exhausted(usize),
    #[error("the decision maker disconnected")]
    Disconnected,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Regret(#[from] RegretError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Dm(#[from] DmError),
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("time limit exceeded")]
    Timeout,
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
