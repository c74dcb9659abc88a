//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A value is outside the mathematical domain of an operation
    /// (e.g. a non-positive current passed to a logarithm).
    #[error("domain error: {0}")]
    Domain(String),

    /// Mismatched dimensions between vectors, arrays or queries.
    #[error("shape error: {0}")]
    Shape(String),

    /// A malformed input file; carries the 1-based line number when known.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Invalid configuration contents.
    #[error("config error: {0}")]
    Config(String),

    /// An iterative solve failed to reach its residual target.
    #[error("solver did not converge (residual {residual:.3e})")]
    NonConvergence { residual: f64 },

    /// A training class with no samples.
    #[error("class {0} has no training samples")]
    EmptyClass(usize),

    /// A named baseline row that is not in the bundled table.
    #[error("unknown baseline: {0}")]
    MissingBaseline(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for input problems, 3 for
    /// numerical failures. Usage errors (exit 1) are handled by the
    /// argument parser before any `Error` is constructed.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::NonConvergence { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
