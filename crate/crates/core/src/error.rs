use thiserror::Error;

use crate::classify::Evidence;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported shape {dims:?}: {reason}")]
    UnsupportedShape { dims: Vec<usize>, reason: String },

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("contradictory evidence: {reason}; {evidence}")]
    Contradictory {
        reason: String,
        evidence: Box<Evidence>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn unsupported(dims: &[usize], reason: impl Into<String>) -> Error {
    Error::UnsupportedShape {
        dims: dims.to_vec(),
        reason: reason.into(),
    }
}
