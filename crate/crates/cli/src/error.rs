use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Solver(#[from] netflux::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } | CliError::Parse { .. } => 2,
            CliError::Solver(netflux::Error::Config(_)) => 2,
            CliError::Solver(_) => 3,
            CliError::Write { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
