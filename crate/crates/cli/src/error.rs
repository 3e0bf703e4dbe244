//! Structured command errors and their exit codes.

use serde::Serialize;

/// Exit code for configuration, input and usage errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Numeric,
}

/// Error reported as one JSON object on stderr.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub exit_code: i32,
    pub module: String,
    pub operation: String,
    pub message: String,
    /// Line of the config file the error refers to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    pub context: serde_json::Value,
}

impl CliError {
    pub fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        Self {
            kind: ErrorKind::Config,
            exit_code: EXIT_CONFIG,
            module: "config".into(),
            operation: "parse".into(),
            message: message.into(),
            line,
            context: serde_json::Value::Null,
        }
    }

    pub fn io(operation: &str, path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            operation: operation.into(),
            module: "io".into(),
            context: serde_json::json!({ "path": path.display().to_string() }),
            ..Self::config(None, err.to_string())
        }
    }

    /// Wrap a solver error raised while running `operation`.
    pub fn solver(operation: &str, err: bursty::Error) -> Self {
        use bursty::Error as E;
        let kind = match err {
            E::InvalidParameter(_) | E::Support { .. } | E::Shape(_) | E::Unsupported { .. } => ErrorKind::Config,
            _ => ErrorKind::Numeric,
        };
        let context = match &err {
            E::Pole { magnitude, .. } => serde_json::json!({ "magnitude": magnitude }),
            E::Aliasing { boundary_mass, tolerance } => {
                serde_json::json!({ "boundary_mass": boundary_mass, "tolerance": tolerance })
            }
            E::Support { out_of_grid } => serde_json::json!({ "out_of_grid": out_of_grid }),
            E::EventCap { cell, cap } => serde_json::json!({ "cell": cell, "cap": cap }),
            E::Overflow { op, detail }
            | E::Domain { op, detail }
            | E::Convergence { op, detail }
            | E::Singular { op, detail } => serde_json::json!({ "op": op, "detail": detail }),
            _ => serde_json::Value::Null,
        };
        Self {
            kind,
            exit_code: if kind == ErrorKind::Config { EXIT_CONFIG } else { EXIT_NUMERIC },
            module: err.module().into(),
            operation: operation.into(),
            message: err.to_string(),
            line: None,
            context,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}
