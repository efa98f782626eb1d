use serde::{Deserialize, Serialize};

use super::grammar::render_question;
use super::sentence::Sentence;
use super::span::TokenRange;
use super::template::QuestionForm;
use crate::error::{Error, Result};

/// The marked noun a QA set is about.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NounTarget {
    pub sentence_id: String,
    pub token_index: usize,
    pub surface: String,
}

impl NounTarget {
    pub fn new(sentence: &Sentence, token_index: usize) -> Result<Self> {
        let surface = sentence.token_text(token_index).ok_or_else(|| {
            Error::Usage(format!(
                "token {token_index} out of range for sentence {} ({} tokens)",
                sentence.id,
                sentence.len()
            ))
        })?;
        Ok(Self {
            sentence_id: sentence.id.clone(),
            token_index,
            surface: surface.to_string(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Independent,
    Consolidated,
}

/// One question about the target with its contiguous answer span.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QAPair {
    pub form: QuestionForm,
    pub answer: TokenRange,
    pub answer_text: String,
}

impl QAPair {
    /// Builds a pair whose answer text is taken from the sentence.
    pub fn from_range(sentence: &Sentence, form: QuestionForm, answer: TokenRange) -> Result<Self> {
        let text = sentence.range_text(answer).ok_or_else(|| {
            Error::Usage(format!("answer range {answer} invalid for sentence {}", sentence.id))
        })?;
        Ok(Self {
            form,
            answer,
            answer_text: text.to_string(),
        })
    }

    pub fn question(&self, noun: &str) -> Result<String> {
        render_question(&self.form, noun)
    }
}

/// One annotator's (or the consolidated) QA set for a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationRecord {
    pub target: NounTarget,
    pub annotator_id: String,
    pub phase: Phase,
    pub qas: Vec<QAPair>,
}

impl AnnotationRecord {
    pub fn new(target: NounTarget, annotator_id: impl Into<String>, phase: Phase) -> Self {
        Self {
            target,
            annotator_id: annotator_id.into(),
            phase,
            qas: Vec::new(),
        }
    }

    pub fn with_qas(mut self, qas: Vec<QAPair>) -> Self {
        self.qas = qas;
        self
    }

    pub fn answer_ranges(&self) -> Vec<TokenRange> {
        self.qas.iter().map(|qa| qa.answer).collect()
    }
}
