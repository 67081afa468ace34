use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("scale guard: {0}")]
    ScaleGuard(String),
    #[error("net verification failed: {0}")]
    NetVerification(String),
    #[error("inconsistent fusion: {0}")]
    Fusion(String),
    #[error("model checksum mismatch (expected {expected}, found {found})")]
    Checksum { expected: String, found: String },
    #[error("model format: {0}")]
    Format(String),
    #[error("round {round} (seed {seed}): {source}")]
    Round {
        round: u64,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
