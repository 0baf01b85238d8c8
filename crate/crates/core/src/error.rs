use thiserror::Error;

use crate::graph::Node;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: Node },

    #[error("graph is not connected")]
    Disconnected,

    #[error("outside the domain of the approximation: {0}")]
    Domain(String),

    #[error("no length exceeded occurrence threshold {threshold}")]
    NoEligibleLengths { threshold: u64 },

    #[error("enumeration budget of {budget} exceeded")]
    BudgetExceeded { budget: u64 },

    #[error("validation failed: {0}")]
    Validation(String),
}
