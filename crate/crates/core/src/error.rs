use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge count {edges} exceeds the enumeration cap {cap}")]
    CapExceeded { edges: usize, cap: usize },
    #[error("resource budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("algorithm fault: {0}")]
    Algorithm(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("infinite moment: {0}")]
    InfiniteMoment(String),
    #[error("inconsistent input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
