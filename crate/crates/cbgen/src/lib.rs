//! Standard-library companion to `cbgen-core`: file formats, the `cbgen`
//! command line, parallel batch generation, the verification protocol, and
//! the timing harness.

pub mod bench;
pub mod cli;
pub mod io;
pub mod parallel;
pub mod sim;

pub use cbgen_core::{
    constraints, generators, stream, types, verify, AlgorithmId, CorrelationSpec, Error,
    FeasibilityReport, MarginalVector, RandomStream, SampleMatrix,
};

/// Process-level failure classes, mapped onto the exit-code contract:
/// 0 success, 1 IO, 2 infeasible (or failed verification), 64 usage.
#[derive(Debug)]
pub enum AppError {
    /// Infeasible inputs or a failed verification invariant (exit 2).
    Infeasible(String),
    /// File system or format problems (exit 1).
    Io(String),
    /// Bad flags or malformed values (exit 64).
    Usage(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Infeasible(_) => 2,
            AppError::Io(_) => 1,
            AppError::Usage(_) => 64,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Infeasible(msg) => write!(f, "infeasible: {msg}"),
            AppError::Io(msg) => write!(f, "io error: {msg}"),
            AppError::Usage(msg) => write!(f, "usage error: {msg}"),
        }
    }
}

impl std::error::Error for AppError {}

impl From<cbgen_core::Error> for AppError {
    fn from(e: cbgen_core::Error) -> Self {
        match e {
            Error::Infeasible(report) => AppError::Infeasible(report.to_string()),
            other => AppError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e.to_string())
    }
}
