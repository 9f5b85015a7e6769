use thiserror::Error;

/// Errors raised by the completion library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix dimensions must be positive (got {nrows}x{ncols})")]
    EmptyDimension { nrows: usize, ncols: usize },

    #[error("position ({row}, {col}) is outside a {nrows}x{ncols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("position ({row}, {col}) is specified twice")]
    DuplicatePosition { row: usize, col: usize },

    #[error("entry ({row}, {col}) is negative")]
    NegativeValue { row: usize, col: usize },

    #[error("entry ({row}, {col}) must be strictly positive")]
    NonPositiveEntry { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("block structure is incomplete: {0}")]
    NotBlockComplete(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("coordinate {index} carries zero mass but has a positive target")]
    DivisionByZeroMass { index: usize },

    #[error("instance is not on the boundary (sum of roots differs from one)")]
    NotOnBoundary,

    #[error("instance is not strictly inside the completable region")]
    NotStrictlyInterior,

    #[error("completion set is not a positive-dimensional family")]
    NotAFamily,

    #[error("partial matrix or tensor is not completable")]
    NotCompletable,

    #[error("no completions to optimize over")]
    NoCompletions,

    #[error("no restart converged to a stationary point")]
    DidNotConverge,

    #[error("unsupported 2x2x2 pattern: {0}")]
    UnsupportedPattern(String),

    #[error("degenerate denominator in the linear completion formula")]
    DegenerateDenominator,

    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeCapExceeded { degree: String, cap: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
