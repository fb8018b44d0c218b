use thiserror::Error;

/// Errors produced by the allocation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dual variable {index} is negative ({value})")]
    NegativeDual { index: usize, value: f64 },

    #[error("node index {index} out of range for {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("numeric failure at round {round}, node {node}: {what} is not finite")]
    NumericFailure {
        round: u64,
        node: usize,
        what: &'static str,
    },

    #[error("instance with {n} nodes exceeds the oracle budget of {max}")]
    OracleBudget { n: usize, max: usize },

    #[error("oracle stalled: {0}")]
    OracleStall(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
