use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read graph file {path}: {message}")]
    GraphRead { path: PathBuf, message: String },

    #[error(transparent)]
    OracleBudget(fds_core::Error),

    #[error("cannot write to output directory {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fds_core::Error),
}

impl CliError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::GraphRead { .. } => 2,
            CliError::OracleBudget(_) => 3,
            CliError::Output { .. } => 4,
            CliError::Config(_) | CliError::Core(_) => 1,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
