use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in {path}: {msg}")]
    Csv { path: PathBuf, msg: String },

    #[error("malformed cell '{cell}' at data row {row}, column {col}")]
    MalformedCell { row: usize, col: usize, cell: String },

    #[error("non-finite value at data row {row}, column '{col}'")]
    NonFiniteValue { row: usize, col: String },

    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("empty dataset: {0}")]
    EmptyData(String),

    #[error("duplicate column name '{0}'")]
    DuplicateName(String),

    #[error("unknown column '{0}'")]
    UnknownColumn(String),

    #[error("node {node} out of range for a graph on {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("node counts differ: {0} vs {1}")]
    NodeCountMismatch(usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("neighbour count k={k} must satisfy 1 <= k < {n}")]
    BadNeighborCount { k: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero k-NN distance at point {index}; duplicate points survived jitter")]
    DuplicatePoints { index: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular covariance of the conditioning set")]
    SingularCovariance,

    #[error("sample size {n} too small for a Fisher-z test conditioning on {d_z} variables")]
    SampleTooSmall { n: usize, d_z: usize },

    #[error("precision matrix not positive definite after regularization")]
    NotPositiveDefinite,
}

pub type Result<T> = std::result::Result<T, Error>;
