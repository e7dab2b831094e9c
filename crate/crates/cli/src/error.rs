use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] prismstrat::Error),
}

#[derive(Serialize)]
pub struct ErrorObject {
    pub kind: String,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    /// 2 for bad input, 3 for a failed computation.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Engine(e) if !e.is_validation() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::Read { .. } => "Read".into(),
            CliError::Write { .. } => "Write".into(),
            CliError::Json(_) => "Parse".into(),
            CliError::Usage(_) => "Usage".into(),
            CliError::Engine(e) => e.kind().into(),
        }
    }

    pub fn object(&self) -> ErrorObject {
        ErrorObject {
            kind: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }
}
