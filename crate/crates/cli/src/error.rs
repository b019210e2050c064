use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("PARSE_ERROR in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("VALIDATION_ERROR:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error(transparent)]
    Core(#[from] spincav_core::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "PARSE_ERROR",
            CliError::Validation(_) => "VALIDATION_ERROR",
            CliError::Io { .. } => "IO_ERROR",
            CliError::Format { .. } => "FORMAT_ERROR",
            CliError::Core(e) => e.code(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

/// Flattens a core validation error into its list of violations.
pub(crate) fn violations(e: spincav_core::Error) -> Vec<String> {
    match e {
        spincav_core::Error::Validation(list) => list,
        other => vec![other.to_string()],
    }
}
