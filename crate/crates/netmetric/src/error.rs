use thiserror::Error;

/// Errors shared across the crate.
#[derive(Error, Debug)]
pub enum Error {
    #[error("matrix is not square or label count mismatches: {rows} rows, {cols} cols, {labels} labels")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        labels: usize,
    },
    #[error("matrix is asymmetric at ({i},{j}): {a} vs {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },
    #[error("nonzero diagonal at ({i},{i}): {value}")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("off-diagonal entry at ({i},{j}) must be positive, got {value}")]
    NonpositiveOffDiagonal { i: usize, j: usize, value: f64 },
    #[error("duplicate label {label:?}")]
    DuplicateLabel { label: String },
    #[error("instance too large for exact computation: {detail}")]
    TooLarge { detail: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point {index} duplicates an existing point")]
    DuplicatePoint { index: usize },
    #[error("correspondence does not cover {side} index {index}")]
    InvalidCorrespondence { side: &'static str, index: usize },
    #[error("barycentric coordinates must be nonnegative and sum to 1, got sum {sum}")]
    InvalidBarycentric { sum: f64 },
    #[error("degenerate input: {detail}")]
    DegenerateInput { detail: String },
    #[error("insufficient data: {detail}")]
    InsufficientData { detail: String },
    #[error("node count must be at least {min}, got {got}")]
    InvalidN { min: usize, got: usize },
    #[error("gamma must be positive, got {got}")]
    InvalidGamma { got: f64 },
    #[error("feature vector {index} has zero variance after {attempts} resampling attempts")]
    DegenerateFeature { index: usize, attempts: usize },
    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
