use thiserror::Error;

use crate::protocol::Transcript;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("construction error: {0}")]
    Construction(String),

    #[error("size cap exceeded for {what}: requested {requested}, cap {cap}")]
    SizeCap {
        what: String,
        requested: usize,
        cap: usize,
    },

    /// The learner returned an id outside the instance at `step`; the
    /// transcript of the completed steps is attached.
    #[error("protocol aborted at step {step}: {message}")]
    ProtocolAbort {
        step: usize,
        message: String,
        partial: Box<Transcript>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn construction(msg: impl Into<String>) -> Self {
        Error::Construction(msg.into())
    }
}
