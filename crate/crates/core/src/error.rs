// Copyright 2026 The Cohana Authors. Licensed under Apache-2.0.

use thiserror::Error;

use crate::ingest::IngestError;
use crate::model::EvalError;
use crate::query::{ParseError, ValidationError};
use crate::storage::StorageError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Storage(#[from] StorageError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Error {
    /// True for errors in the query text rather than in the data.
    pub fn is_query_error(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Validation(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
