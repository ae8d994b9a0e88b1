use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("input error: {0}")]
    Input(String),
    /// A configured size limit was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// An operation was called outside its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Random sampling could not produce a generic configuration.
    #[error("genericity unattainable: {0}")]
    Genericity(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
