use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("output failed: {0}")]
    Output(#[from] csv::Error),
    #[error(transparent)]
    Model(#[from] cryoqaoa::Error),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// 1 for invariant violations, 2 for usage, config and I/O problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invariant(_) | CliError::Model(cryoqaoa::Error::Integrity(_)) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
