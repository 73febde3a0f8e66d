//! Error type for the experiment harness.
//!
//! Variants are split by how the process should exit: `Usage` maps to
//! exit code 1, everything else to exit code 2.

use lfx_codec::error::CodecError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Codec(#[from] CodecError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// Process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Usage(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
