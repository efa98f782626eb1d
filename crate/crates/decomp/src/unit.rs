use std::fmt;

use serde::{Deserialize, Serialize};

use qanoun_core::schema::{NounTarget, QAPair, Sentence, TokenRange};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Noun,
    Verb,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Source::Noun => "noun",
            Source::Verb => "verb",
        })
    }
}

/// One QA pair treated as an atomic claim about its sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeaningUnit {
    /// Position in the sentence's unit list: noun units first, then verb units.
    pub id: usize,
    pub sentence_id: String,
    pub source: Source,
    pub question: String,
    pub answer: TokenRange,
    pub answer_text: String,
    /// Token index of the noun or verb the question is about, when known.
    pub predicate: Option<usize>,
}

impl MeaningUnit {
    pub fn from_noun_qa(id: usize, sentence: &Sentence, target: &NounTarget, qa: &QAPair) -> Result<Self> {
        Ok(Self {
            id,
            sentence_id: sentence.id.clone(),
            source: Source::Noun,
            question: qa.question(&target.surface)?,
            answer: qa.answer,
            answer_text: qa.answer_text.clone(),
            predicate: Some(target.token_index),
        })
    }
}

/// A verb-centred QA as returned by a verbal parser, before grounding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbQa {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate_index: Option<usize>,
    pub question: String,
    pub answer: String,
}

impl VerbQa {
    pub fn new(predicate_index: Option<usize>, question: impl Into<String>, answer: impl Into<String>) -> Self {
        Self {
            predicate_index,
            question: question.into(),
            answer: answer.into(),
        }
    }
}
