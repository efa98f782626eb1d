use std::sync::Arc;

use qanoun_core::schema::{NounTarget, Sentence};

use crate::endpoint::{ChatMessage, Gateway};
use crate::error::Result;
use crate::format::{parse_output, ParseOutcome};
use crate::prompt::{build_prompt, ExemplarSet};

/// A few-shot QA-Noun parser backed by a chat endpoint.
#[derive(Clone)]
pub struct NounParser {
    gateway: Gateway,
    exemplars: Arc<ExemplarSet>,
}

impl NounParser {
    pub fn new(gateway: Gateway, exemplars: ExemplarSet) -> Result<Self> {
        exemplars.check()?;
        Ok(Self { gateway, exemplars: Arc::new(exemplars) })
    }

    pub fn gateway(&self) -> &Gateway {
        &self.gateway
    }

    pub fn parse(&self, sentence: &Sentence, target: &NounTarget) -> Result<ParseOutcome> {
        let prompt = build_prompt(sentence, target, &self.exemplars)?;
        let raw = self.gateway.complete(&[ChatMessage::user(prompt)])?;
        Ok(parse_output(&raw, sentence, target))
    }

    /// Parses every target with bounded concurrency; results keep input order.
    pub fn parse_all(&self, jobs: &[(Sentence, NounTarget)]) -> Vec<Result<ParseOutcome>> {
        self.gateway.map_bounded(jobs, |(s, t)| self.parse(s, t))
    }
}
