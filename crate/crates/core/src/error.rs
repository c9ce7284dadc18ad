use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("missing part for block {0}")]
    MissingBlock(usize),
    #[error("continuity glue violated at limit point {index}: limit value {limit} differs from block value {block}")]
    Glue { index: usize, limit: String, block: String },
    #[error("truncation overflow: {0}")]
    Truncation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("schedule capacity exhausted: requested depth {requested}, achieved depth {achieved}")]
    Capacity { requested: usize, achieved: usize },
    #[error("sequence is not compatible: {0}")]
    Sequence(String),
    #[error("invalid gamma: {0}")]
    Gamma(String),
    #[error("guard violated: {0}")]
    Guard(String),
    #[error("search budget exhausted: {0}")]
    Budget(String),
    #[error("domain mismatch: {0}")]
    Domain(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("function is not in the range of T (defect {0:e})")]
    NotInRange(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
