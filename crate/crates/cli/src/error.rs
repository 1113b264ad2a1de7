use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Degenerate(String),
    #[error("feature width mismatch: model expects {expected}, data has {actual}")]
    Width { expected: usize, actual: usize },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 1,
            CliError::Degenerate(_) | CliError::Width { .. } => 2,
            CliError::Invariant(_) => 3,
        }
    }
}
