use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no {0}")]
    EmptyGraph(&'static str),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NonSymmetric(f64),

    #[error("{algorithm} did not converge within {iterations} iterations")]
    Convergence {
        algorithm: &'static str,
        iterations: usize,
    },

    #[error("subset sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("combo-graph would have {count} nodes, above the cap of {cap}")]
    CapExceeded { count: u128, cap: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("Cholesky factorization failed even with diagonal jitter {0:e}")]
    Factorization(f64),

    #[error("every combo-node in the subgraph has been queried")]
    Exhausted,

    #[error("objective evaluation failed at query {query}: {source}")]
    Objective {
        query: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0} is undefined for this input")]
    Undefined(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
