use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GatewayError, Result};
use crate::format::{render_block, NO_QAS_SENTINEL};
use qanoun_core::schema::{NounTarget, Sentence, TemplateId};

/// Fixed instruction block that opens every parser prompt.
pub const INSTRUCTIONS: &str = include_str!("../fixtures/instructions.txt");

const DEFAULT_EXEMPLARS: &str = include_str!("../fixtures/exemplars.json");

/// Minimum number of exemplar QAs per template.
pub const MIN_EXEMPLARS_PER_TEMPLATE: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExemplarQa {
    pub template: u8,
    pub question: String,
    pub answer: String,
}

/// A worked example: sentence text with the noun wrapped in `<f></f>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exemplar {
    pub text: String,
    pub qas: Vec<ExemplarQa>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExemplarSet {
    pub exemplars: Vec<Exemplar>,
}

impl ExemplarSet {
    pub fn builtin() -> Self {
        serde_json::from_str(DEFAULT_EXEMPLARS).expect("bundled exemplars parse")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn coverage(&self) -> BTreeMap<u8, usize> {
        let mut counts: BTreeMap<u8, usize> = TemplateId::ALL.iter().map(|t| (t.number(), 0)).collect();
        for qa in self.exemplars.iter().flat_map(|e| &e.qas) {
            *counts.entry(qa.template).or_default() += 1;
        }
        counts
    }

    /// Every template needs at least two exemplar QAs and every exemplar
    /// must mark exactly one noun.
    pub fn check(&self) -> Result<()> {
        let short: Vec<String> = self
            .coverage()
            .into_iter()
            .filter(|(_, n)| *n < MIN_EXEMPLARS_PER_TEMPLATE)
            .map(|(t, n)| format!("template {t} has {n}"))
            .collect();
        if !short.is_empty() {
            return Err(GatewayError::Config(format!(
                "exemplars need at least {MIN_EXEMPLARS_PER_TEMPLATE} QAs per template: {}",
                short.join(", ")
            )));
        }
        for e in &self.exemplars {
            if e.text.matches("<f>").count() != 1 || e.text.matches("</f>").count() != 1 {
                return Err(GatewayError::Config(format!(
                    "exemplar must mark exactly one noun: {:?}",
                    e.text
                )));
            }
            if let Some(qa) = e.qas.iter().find(|qa| TemplateId::from_number(qa.template).is_none()) {
                return Err(GatewayError::Config(format!("exemplar template {} outside 1..=9", qa.template)));
            }
        }
        Ok(())
    }
}

fn render_exemplar(e: &Exemplar) -> String {
    let mut qas: Vec<&ExemplarQa> = e.qas.iter().collect();
    qas.sort_by_key(|qa| qa.template);
    let body = if qas.is_empty() {
        NO_QAS_SENTINEL.to_string()
    } else {
        render_block(qas.iter().map(|qa| (qa.template, qa.question.as_str(), qa.answer.as_str())))
    };
    format!("Sentence: {}\n{}", e.text, body)
}

/// The parser prompt: instructions, worked examples, then the query sentence
/// with the target noun marked.
pub fn build_prompt(sentence: &Sentence, target: &NounTarget, exemplars: &ExemplarSet) -> Result<String> {
    exemplars.check()?;
    if target.sentence_id != sentence.id {
        return Err(GatewayError::Config(format!(
            "target belongs to sentence {:?}, not {:?}",
            target.sentence_id, sentence.id
        )));
    }
    let marked = sentence.marked_text(target.token_index).ok_or_else(|| {
        GatewayError::Config(format!("target token {} outside sentence {}", target.token_index, sentence.id))
    })?;
    let mut out = String::with_capacity(INSTRUCTIONS.len() + 256 * exemplars.exemplars.len());
    out.push_str(INSTRUCTIONS);
    out.push_str("\nExamples:\n");
    for e in &exemplars.exemplars {
        out.push('\n');
        out.push_str(&render_exemplar(e));
        out.push('\n');
    }
    out.push_str("\nSentence: ");
    out.push_str(&marked);
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_exemplars_cover_every_template_twice() {
        let set = ExemplarSet::builtin();
        set.check().unwrap();
        assert!(set.coverage().values().all(|&n| n >= 2));
    }

    #[test]
    fn missing_time_examples_rejected() {
        let mut set = ExemplarSet::builtin();
        for e in &mut set.exemplars {
            e.qas.retain(|qa| qa.template != 9);
        }
        let err = set.check().unwrap_err();
        assert!(err.to_string().contains("template 9 has 0"), "{err}");
        let s = Sentence::tokenize("s", "The album was released.");
        let t = NounTarget::new(&s, 1).unwrap();
        assert!(matches!(build_prompt(&s, &t, &set), Err(GatewayError::Config(_))));
    }

    #[test]
    fn prompt_is_deterministic() {
        let s = Sentence::tokenize("s", "The album was released in 1971.");
        let t = NounTarget::new(&s, 1).unwrap();
        let set = ExemplarSet::builtin();
        let a = build_prompt(&s, &t, &set).unwrap();
        assert_eq!(a, build_prompt(&s, &t, &set).unwrap());
        assert!(a.starts_with("Read the Sentence and focus on the noun"));
        assert!(a.ends_with("Sentence: The <f>album</f> was released in 1971.\n"));
    }
}
