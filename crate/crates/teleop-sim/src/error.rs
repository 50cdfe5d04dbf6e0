//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by tour loading, simulation and sweep machinery.
#[derive(Debug, Error)]
pub enum SimError {
    /// Input data broke a structural rule (duplicate ids, empty tour, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// A tour file row could not be parsed. Points at the offending line and
    /// field so the file can be fixed by hand.
    #[error("parse error in {path} line {line}, field `{field}`: {message}")]
    Parse {
        path: String,
        line: u64,
        field: String,
        message: String,
    },

    /// A configuration value is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Window filtering left no tours to simulate.
    #[error("no tours fall inside the window starting {start} for {hours} h")]
    EmptyWindow { start: String, hours: f64 },

    /// The event loop ran past its safety cap, which indicates a stuck
    /// simulation rather than a slow one.
    #[error("simulated time exceeded the safety cap of {cap_min} min at t={time_min} min")]
    TimeCapExceeded { cap_min: f64, time_min: f64 },

    /// A service-level target referenced a KPI that does not exist.
    #[error("unknown KPI `{name}`; valid names: {valid}")]
    UnknownKpi { name: String, valid: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SimError>;
