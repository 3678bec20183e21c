use thiserror::Error;

/// Crate-wide error type.
///
/// Variants are grouped by failure class so callers (notably the CLI) can
/// map them onto exit codes without string matching.
#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate fell outside the unit square.
    #[error("coordinate ({u}, {v}) is outside [0,1]^2")]
    Domain { u: f64, v: f64 },

    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Constructed data violated a structural invariant.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Input was structurally fine but carries no usable signal
    /// (e.g. an all-zero adjacency handed to the normalizer).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed or did not converge hard enough to
    /// report anything sensible.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A text input could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Exact cut-norm enumeration was asked for a refinement beyond the
    /// enumeration cap; the heuristic should be used instead.
    #[error(
        "common refinement has {blocks} blocks, above the exact enumeration cap of {cap}; \
         use the heuristic cut norm"
    )]
    RefinementTooLarge { blocks: usize, cap: usize },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
