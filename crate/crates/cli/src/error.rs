use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

/// Failures surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// The document does not match the schema.
    #[error("{message} (at {pointer})")]
    Parse { pointer: String, message: String },

    /// The document parses but a value is out of range.
    #[error("{message}")]
    Semantic { field: String, message: String },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Core(#[from] iss_certify::Error),
}

impl CliError {
    pub fn semantic(field: &str, message: impl Into<String>) -> Self {
        CliError::Semantic {
            field: field.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    /// 2 for usage and configuration problems, 3 for solver faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_solver_fault() => 3,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Semantic { .. } => "semantic",
            CliError::Io { .. } => "io",
            CliError::Core(e) if e.is_solver_fault() => "solver_fault",
            CliError::Core(_) => "invalid_problem",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            CliError::Parse { pointer, .. } => body["pointer"] = json!(pointer),
            CliError::Semantic { field, .. } => body["field"] = json!(field),
            CliError::Io { path, .. } => body["path"] = json!(path),
            _ => {}
        }
        json!({ "error": body })
    }
}
