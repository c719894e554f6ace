//! Crate-wide error type.

use thiserror::Error;

use crate::ingest::IngestError;

/// Errors produced by analysis routines and dataset ingestion.
#[derive(Debug, Error)]
pub enum Error {
    /// An input value violated a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A dataset file failed to parse or validate.
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
