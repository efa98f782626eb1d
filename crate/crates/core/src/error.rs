use thiserror::Error;

use crate::schema::TemplateId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid question form: {0}")]
    InvalidForm(String),

    #[error("unparseable question {question:?}: {diagnostic}")]
    UnparseableQuestion {
        question: String,
        /// Template whose fixed wording shares the longest prefix with the input.
        nearest: Option<TemplateId>,
        diagnostic: String,
    },

    #[error("invalid sentence: {0}")]
    InvalidSentence(String),

    #[error("ingestion error at line {line} (record {record_id:?}): {message}")]
    Ingestion {
        line: usize,
        record_id: Option<String>,
        message: String,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
