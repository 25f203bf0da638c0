use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

/// Failure of a CLI operation, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Malformed or out-of-range input. `field` is the scenario key when one
    /// can be named.
    Validation { field: Option<String>, message: String },
    Io { path: PathBuf, message: String },
    Internal(String),
}

/// The machine-readable record written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct ErrorRecord<'a> {
    pub kind: &'static str,
    pub field: Option<&'a str>,
    pub path: Option<&'a Path>,
    pub message: String,
    pub exit_code: i32,
}

impl CliError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: Some(field.into()),
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: impl fmt::Display) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn field(&self) -> Option<&str> {
        match self {
            CliError::Validation { field, .. } => field.as_deref(),
            _ => None,
        }
    }

    pub fn record(&self) -> ErrorRecord<'_> {
        let (kind, path, message) = match self {
            CliError::Validation { message, .. } => ("validation", None, message.clone()),
            CliError::Io { path, message } => ("io", Some(path.as_path()), message.clone()),
            CliError::Internal(message) => ("internal", None, message.clone()),
        };
        ErrorRecord {
            kind,
            field: self.field(),
            path,
            message,
            exit_code: self.exit_code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation { field: Some(field), message } => write!(f, "invalid {field}: {message}"),
            CliError::Validation { field: None, message } => write!(f, "invalid input: {message}"),
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
            CliError::Internal(message) => write!(f, "internal error: {message}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Scenario key for a library parameter name.
fn scenario_key(field: &str) -> String {
    match field {
        "papr" => "constraint.a".into(),
        "sketch_rank" => "sketch.rank".into(),
        "x0" | "a" | "b" | "lambda" | "burn_in" | "map" => format!("init.{field}"),
        "m" | "seeds" => format!("set.{field}"),
        other => other.into(),
    }
}

impl From<pslseq::Error> for CliError {
    fn from(e: pslseq::Error) -> Self {
        match e {
            pslseq::Error::InvalidInput { field, reason } => CliError::Validation {
                field: Some(scenario_key(field)),
                message: reason,
            },
            pslseq::Error::Degenerate(m) => CliError::Validation {
                field: None,
                message: format!("degenerate sequence: {m}"),
            },
            pslseq::Error::Member { member, source } => match CliError::from(*source) {
                CliError::Validation { field, message } => CliError::Validation {
                    field,
                    message: format!("set member {member}: {message}"),
                },
                CliError::Internal(m) => CliError::Internal(format!("set member {member}: {m}")),
                io => io,
            },
            pslseq::Error::Numerical(m) => CliError::Internal(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
