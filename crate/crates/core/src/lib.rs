//! Core data model and evaluation metrics for QA-Noun annotation.
//!
//! The [`schema`] module holds sentences, noun targets, the nine-template
//! question grammar, annotation records and the line-delimited dataset
//! format. The [`eval`] module scores argument spans: token IoU, one-to-one
//! span alignment, unlabeled precision/recall/F1, inter-annotator agreement,
//! role-soundness bookkeeping and percentile bootstrap intervals.

pub mod error;
pub mod eval;
pub mod reference;
pub mod schema;

pub use error::{Error, Result};
pub use schema::{
    AnnotationRecord, NounTarget, Phase, QAPair, QuestionForm, Sentence, TemplateId, TokenRange,
    TokenSpan,
};
