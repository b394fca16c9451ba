//! Scenario configuration, execution, verification suites and report emission.
//!
//! Exit-code contract of the command-line front end: 0 success, 1 numerical
//! failure or detected blow-up, 2 usage or configuration error.

pub mod config;
pub mod initial;
pub mod monitor;
pub mod simulate;
pub mod verify;

use serde_json::{json, Value};

use crate::error::Error;

pub use config::{parse_config, ScenarioConfig};
pub use initial::InitialSpec;
pub use monitor::{besov_report, monitor, BesovReport, MonitorSummary};
pub use simulate::{output_root, simulate, RunStatus, RunSummary, SimulationOutcome, OUTPUT_ROOT_ENV};
pub use verify::{run_suite, Check, SUITES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Exit status for an error that stopped a command before it produced results.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Parse { .. }
        | Error::ConstraintViolation(_)
        | Error::InvalidParams(_)
        | Error::InvalidIntegrator(_)
        | Error::InvalidGrid(_)
        | Error::IndexConstraintViolated(_)
        | Error::ExponentOrderViolated { .. }
        | Error::Io(_)
        | Error::DumpFormat { .. } => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

/// Machine-readable error report.
pub fn error_json(error: &Error) -> Value {
    let kind = match error {
        Error::Parse { .. } => "parse_error",
        Error::ConstraintViolation(_) | Error::InvalidParams(_) | Error::InvalidIntegrator(_) => "constraint_violation",
        Error::DumpFormat { .. } => "dump_format_error",
        Error::Io(_) => "io_error",
        _ => "numerical_error",
    };
    let mut body = json!({ "kind": kind, "message": error.to_string() });
    match error {
        Error::ConstraintViolation(v) | Error::InvalidParams(v) | Error::InvalidIntegrator(v) => {
            body["violations"] = json!(v);
        }
        Error::Parse { line, column, .. } => {
            body["line"] = json!(line);
            body["column"] = json!(column);
        }
        Error::DumpFormat { offset, .. } => {
            body["offset"] = json!(offset);
        }
        _ => {}
    }
    json!({ "error": body })
}
