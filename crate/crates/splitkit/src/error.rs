use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: String, right: String },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },

    #[error("zero diagonal entry in row {row} (1-based)")]
    ZeroDiagonal { row: usize },

    #[error("matrix is not strictly {triangle} triangular (nonzero at row {row}, col {col})")]
    NotStrictlyTriangular {
        triangle: &'static str,
        row: usize,
        col: usize,
    },

    #[error("invalid splitting mask: {0}")]
    InvalidMask(String),

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("no splitting exists: every masked part of the matrix is zero")]
    EmptySplitting,

    #[error("splittings do not share the same source matrix")]
    SourceMismatch,

    #[error("invalid decomposition of the identity: {0}")]
    InvalidDoi(String),

    #[error("method {0} has no fixed splitting form; use its dedicated constructor")]
    NoSplittingForm(String),

    #[error("unknown method name: {0}")]
    UnknownMethod(String),

    #[error("{method} requires n >= {min_n}, got {n}")]
    TooSmall {
        method: String,
        min_n: usize,
        n: usize,
    },

    #[error("operator dimension {dim} exceeds the dense cap {cap}")]
    CapExceeded { dim: usize, cap: usize },

    #[error("iterate diverged at sweep {iteration} (norm {norm:.3e})")]
    Diverged { iteration: usize, norm: f64 },

    #[error("two-step sweep needs the previous last-stage vector; run one plain sweep first")]
    MissingPreviousState,

    #[error("eigenvalue iteration failed to converge")]
    EigenFailure,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
