use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schema violation: {0}")]
    Schema(String),

    #[error("{what} row {row} sums to {sum} (deviation {deviation:e})")]
    RowSum {
        what: String,
        row: usize,
        sum: f64,
        deviation: f64,
    },

    #[error("probability out of [0, 1] in {what}: {value}")]
    ProbabilityRange { what: String, value: String },

    #[error("covariance of state {state} is not symmetric positive definite")]
    NotPositiveDefinite { state: usize },

    #[error("parameter {param} = {value} violates its constraint interval [{lower}, {upper}]")]
    Constraint {
        param: &'static str,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("guard violation: {what} is {actual}, limit {limit}")]
    Guard {
        what: &'static str,
        actual: u128,
        limit: u128,
    },

    #[error("zero-likelihood prefix: no positive-probability path through time {t}")]
    ZeroLikelihood { t: usize },

    #[error("decoder buffer is full ({capacity} observations since the last commit)")]
    BufferFull { capacity: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
