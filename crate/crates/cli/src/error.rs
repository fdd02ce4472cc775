use std::path::Path;

use pcurv_core::{Error, PolyError};
use thiserror::Error;

/// Input problems: every variant maps to exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{}line {line}, column {column}: {message}", file.as_deref().map(|f| format!("{f}: ")).unwrap_or_default())]
    Json {
        file: Option<String>,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Field { path: String, source: PolyError },
    #[error("invalid structure: {0}")]
    Structure(String),
    #[error("{command} needs {what}")]
    Missing {
        command: &'static str,
        what: &'static str,
    },
    #[error(transparent)]
    Core(#[from] Error),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
}

impl CliError {
    pub fn field(path: impl Into<String>, source: PolyError) -> Self {
        CliError::Field {
            path: path.into(),
            source,
        }
    }

    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Json {
                line,
                column,
                message,
                ..
            } => CliError::Json {
                file: Some(path.display().to_string()),
                line,
                column,
                message,
            },
            CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}
