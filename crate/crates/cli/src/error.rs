use std::fmt;

use serde::Serialize;
use serde_json::Value;

use blaschke::solver::SolveTrace;

/// Exit status and the JSON object written to stderr on failure.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    #[serde(skip)]
    pub code: u8,
    /// Solver trace of a non-converged run, for `--solver-trace`.
    #[serde(skip)]
    pub trace: Option<SolveTrace>,
}

pub const EXIT_FAILED_CHECK: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NO_CONVERGENCE: u8 = 3;
pub const EXIT_OPTIMIZER_STALL: u8 = 4;

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { kind: "validation", message: message.into(), details: Value::Null, code: EXIT_VALIDATION, trace: None }
    }

    pub fn parse(path: &str, e: &serde_json::Error) -> Self {
        CliError {
            kind: "parse",
            message: format!("{path}: {e}"),
            details: serde_json::json!({ "path": path, "line": e.line(), "column": e.column() }),
            code: EXIT_VALIDATION,
            trace: None,
        }
    }

    pub fn io(path: &str, e: &std::io::Error) -> Self {
        CliError { kind: "io", message: format!("{path}: {e}"), details: Value::Null, code: EXIT_VALIDATION, trace: None }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<blaschke::Error> for CliError {
    fn from(e: blaschke::Error) -> Self {
        use blaschke::Error as E;
        let message = e.to_string();
        match e {
            E::NoConvergence(trace) => CliError {
                kind: "no_convergence",
                message,
                details: serde_json::to_value(&*trace).unwrap_or(Value::Null),
                code: EXIT_NO_CONVERGENCE,
                trace: Some(*trace),
            },
            E::NotAdmissible(report) => {
                CliError::validation(message).with_details(serde_json::to_value(&report).unwrap_or(Value::Null))
            }
            E::NotCentered(x, y) => CliError::validation(message).with_details(serde_json::json!({ "defect": [x, y] })),
            E::Validation { field, reason } => {
                CliError::validation(message).with_details(serde_json::json!({ "field": field, "reason": reason }))
            }
            _ => CliError::validation(message),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError { kind: "io", message: e.to_string(), details: Value::Null, code: EXIT_VALIDATION, trace: None }
    }
}

pub type CliResult<T> = Result<T, CliError>;
