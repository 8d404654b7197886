use thiserror::Error;

/// Errors raised by the inversion kernels, generators and matrix I/O.
///
/// Step indices are the 0-based elimination step `m`; the pivot row at step
/// `m` is row `m` (0-based), i.e. the `(m+1)`-th row.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix order must be at least 1")]
    Empty,

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is singular: no usable pivot at elimination step {step}")]
    SingularMatrix { step: usize },

    #[error("matrix is not symmetric: entries ({row}, {col}) and ({col}, {row}) differ")]
    NotSymmetric { row: usize, col: usize },

    #[error(
        "zero pivot at elimination step {step} (leading principal minor of order {} vanishes); \
         use the permuting general elimination instead",
        step + 1
    )]
    ZeroPivot { step: usize },

    #[error("matrix is not positive definite: non-positive pivot at column {step}")]
    NotPositiveDefinite { step: usize },

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not generate a matrix satisfying the family invariant after {attempts} attempts")]
    GenerationFailed { attempts: u32 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
