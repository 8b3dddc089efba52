//! Batch front end: problem files, solving, proof checking, instance
//! generation and benchmarks.

pub mod bench;
pub mod gen;
pub mod problem;
pub mod solve;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] problem::ParseError),
    #[error("{0}")]
    Guard(String),
    #[error("{0}")]
    Check(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn guard(e: impl std::fmt::Display) -> Self {
        CliError::Guard(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Io { .. } => 1,
            CliError::Guard(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

pub fn read_file(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}
