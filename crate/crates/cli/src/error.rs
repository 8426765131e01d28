use std::path::PathBuf;

use spiroplanck::planner::Outcome;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] spiroplanck::Error),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("planner finished without converging ({0})")]
    NotConverged(Outcome),
}

impl CliError {
    /// 1 usage/config, 2 I/O, 3 non-converged under `--strict`.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Model(_) | CliError::Parse { .. } => 1,
            CliError::Io { .. } => 2,
            CliError::NotConverged(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
