use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::data::ParseError;
use crate::harness::SweepRow;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// A step produced a non-finite iterate or buffer. `last_x` is the last
    /// finite iterate, reached after `step` completed steps.
    #[error("iterates diverged after {step} steps")]
    Diverged { step: usize, last_x: Vec<f64> },

    #[error("inadmissible parameters: {0}")]
    Inadmissible(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("all {} tuning runs diverged", .table.len())]
    AllDiverged { table: Vec<SweepRow> },

    #[error("verification refused: {0}")]
    VerificationRefused(String),

    #[error("missing reference optimum: {0}")]
    MissingReference(String),

    #[error("problem is not convex: {0}")]
    NotConvex(String),

    #[error("{}:{line}: {msg}", .path.display())]
    TraceFormat {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
