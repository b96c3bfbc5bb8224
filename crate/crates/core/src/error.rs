use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Evaluation point outside the domain of a model (inside a body, zero range, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver or matrix inversion failed.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Integration produced a non-finite state; the episode must be aborted.
    #[error("propagation error: {0}")]
    Propagation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error ({path}): {reason}")]
    Checkpoint { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
