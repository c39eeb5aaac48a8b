use larmour_core::error::{Error, ErrorKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid JSON at line {line}, column {column}: {msg}")]
    Json {
        line: usize,
        column: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Element { path: String, source: Error },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn from_json(e: serde_json::Error) -> Self {
        CliError::Json {
            line: e.line(),
            column: e.column(),
            msg: e.to_string(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            CliError::Input(_)
            | CliError::Io { .. }
            | CliError::Json { .. }
            | CliError::Element { .. } => ErrorKind::Input,
            CliError::Core(e) => e.kind(),
        }
    }

    /// Process exit code: 1 input, 2 mathematical domain, 3 precision.
    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            ErrorKind::Input => 1,
            ErrorKind::MathDomain => 2,
            ErrorKind::Precision => 3,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind() {
            ErrorKind::Input => "input",
            ErrorKind::MathDomain => "math-domain",
            ErrorKind::Precision => "precision",
        }
    }
}
