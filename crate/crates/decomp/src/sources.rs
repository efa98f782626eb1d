use std::time::Duration;

use serde_json::{json, Value};

use qanoun_core::schema::{NounTarget, QAPair, Sentence};
use qanoun_llm::endpoint::{ChatMessage, Gateway, RetryPolicy};
use qanoun_llm::judge::{judge_equivalent, judge_text, QaText};
use qanoun_llm::NounParser;

use crate::error::{DecompError, Result};
use crate::unit::{MeaningUnit, VerbQa};

/// Produces QA-Noun pairs for one marked noun.
pub trait NounQaSource: Send + Sync {
    fn noun_qas(&self, sentence: &Sentence, target: &NounTarget) -> Result<Vec<QAPair>>;
}

/// Produces verb-centred QAs for a whole sentence.
pub trait VerbUnitSource: Send + Sync {
    fn verb_qas(&self, sentence: &Sentence) -> Result<Vec<VerbQa>>;
}

/// Decides whether two units state the same fact.
pub trait RedundancyJudge: Send + Sync {
    fn equivalent(&self, sentence: &Sentence, a: &MeaningUnit, b: &MeaningUnit) -> Result<bool>;
}

/// Decides whether a unit is entailed by its sentence.
pub trait UnitJudge: Send + Sync {
    fn entailed(&self, sentence: &Sentence, unit: &MeaningUnit) -> Result<bool>;
}

impl<F> NounQaSource for F
where
    F: Fn(&Sentence, &NounTarget) -> Result<Vec<QAPair>> + Send + Sync,
{
    fn noun_qas(&self, sentence: &Sentence, target: &NounTarget) -> Result<Vec<QAPair>> {
        self(sentence, target)
    }
}

impl<F> VerbUnitSource for F
where
    F: Fn(&Sentence) -> Result<Vec<VerbQa>> + Send + Sync,
{
    fn verb_qas(&self, sentence: &Sentence) -> Result<Vec<VerbQa>> {
        self(sentence)
    }
}

impl<F> RedundancyJudge for F
where
    F: Fn(&Sentence, &MeaningUnit, &MeaningUnit) -> Result<bool> + Send + Sync,
{
    fn equivalent(&self, sentence: &Sentence, a: &MeaningUnit, b: &MeaningUnit) -> Result<bool> {
        self(sentence, a, b)
    }
}

impl<F> UnitJudge for F
where
    F: Fn(&Sentence, &MeaningUnit) -> Result<bool> + Send + Sync,
{
    fn entailed(&self, sentence: &Sentence, unit: &MeaningUnit) -> Result<bool> {
        self(sentence, unit)
    }
}

/// Judge that never merges anything.
pub struct NeverRedundant;

impl RedundancyJudge for NeverRedundant {
    fn equivalent(&self, _: &Sentence, _: &MeaningUnit, _: &MeaningUnit) -> Result<bool> {
        Ok(false)
    }
}

/// Judge that accepts every unit.
pub struct AlwaysEntailed;

impl UnitJudge for AlwaysEntailed {
    fn entailed(&self, _: &Sentence, _: &MeaningUnit) -> Result<bool> {
        Ok(true)
    }
}

impl NounQaSource for NounParser {
    fn noun_qas(&self, sentence: &Sentence, target: &NounTarget) -> Result<Vec<QAPair>> {
        let outcome = self.parse(sentence, target)?;
        for d in &outcome.diagnostics {
            log::debug!("{} token {}: {d}", sentence.id, target.token_index);
        }
        Ok(outcome.qas)
    }
}

fn qa_text(u: &MeaningUnit) -> QaText {
    QaText::new(u.question.clone(), u.answer_text.clone())
}

/// Mutual entailment under a chat judge: both presentation orders must agree.
pub struct LlmRedundancyJudge {
    pub gateway: Gateway,
}

impl RedundancyJudge for LlmRedundancyJudge {
    fn equivalent(&self, sentence: &Sentence, a: &MeaningUnit, b: &MeaningUnit) -> Result<bool> {
        let (ta, tb) = (qa_text(a), qa_text(b));
        if !judge_equivalent(sentence, &ta, &tb, &self.gateway)?.answer {
            return Ok(false);
        }
        Ok(judge_equivalent(sentence, &tb, &ta, &self.gateway)?.answer)
    }
}

/// Entailment of a unit's question and answer by the sentence, under a chat judge.
pub struct LlmUnitJudge {
    pub gateway: Gateway,
}

impl UnitJudge for LlmUnitJudge {
    fn entailed(&self, sentence: &Sentence, unit: &MeaningUnit) -> Result<bool> {
        Ok(judge_text(sentence, &qa_text(unit), &self.gateway)?.entailed)
    }
}

/// Prompt for verbal QAs; `{sentence}` is substituted.
pub const VERB_PROMPT: &str = include_str!("../fixtures/verb_prompt_v1.txt");

/// Verbal QAs obtained by prompting a chat model.
pub struct PromptVerbSource {
    pub gateway: Gateway,
}

impl PromptVerbSource {
    pub fn prompt(sentence: &Sentence) -> String {
        VERB_PROMPT.replace("{sentence}", &sentence.text)
    }
}

/// Parses `Predicate:` / `Question:` / `Answer:` blocks. Lines that do not fit
/// the pattern are skipped; a block without a predicate line keeps `None`.
pub fn parse_verb_output(raw: &str, sentence: &Sentence) -> Vec<VerbQa> {
    let mut out = Vec::new();
    let mut predicate: Option<usize> = None;
    let mut question: Option<String> = None;
    for line in raw.lines().map(str::trim) {
        if let Some(rest) = line.strip_prefix("Predicate:") {
            predicate = sentence.find_phrase(rest.trim()).first().map(|r| r.first);
            question = None;
        } else if let Some(rest) = line.strip_prefix("Question:") {
            question = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("Answer:") {
            if let Some(q) = question.take() {
                out.push(VerbQa::new(predicate, q, rest.trim()));
            }
        }
    }
    out
}

impl VerbUnitSource for PromptVerbSource {
    fn verb_qas(&self, sentence: &Sentence) -> Result<Vec<VerbQa>> {
        let raw = self.gateway.complete(&[ChatMessage::user(Self::prompt(sentence))])?;
        Ok(parse_verb_output(&raw, sentence))
    }
}

/// Adapter for an external verbal parser service.
///
/// Sends `POST {url}` with `{"id", "text", "tokens"}` and accepts either a
/// JSON array of `{"predicate_index"?, "question", "answer"}` objects or an
/// object holding that array under `"qas"`.
pub struct EndpointVerbSource {
    url: String,
    agent: ureq::Agent,
    retry: RetryPolicy,
}

impl EndpointVerbSource {
    pub fn new(url: impl Into<String>, timeout: Duration, retry: RetryPolicy) -> Result<Self> {
        if timeout.is_zero() || retry.max_attempts == 0 {
            return Err(DecompError::Config("verb endpoint needs a positive timeout and attempt count".into()));
        }
        let agent: ureq::Agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        Ok(Self { url: url.into(), agent, retry })
    }

    fn attempt(&self, body: &Value) -> std::result::Result<Vec<VerbQa>, String> {
        let mut resp = self.agent.post(&self.url).send_json(body).map_err(|e| e.to_string())?;
        let value: Value = resp.body_mut().read_json().map_err(|e| e.to_string())?;
        let list = match value {
            Value::Object(mut m) => m.remove("qas").unwrap_or(Value::Null),
            v => v,
        };
        serde_json::from_value(list).map_err(|e| format!("unexpected response shape: {e}"))
    }
}

impl VerbUnitSource for EndpointVerbSource {
    fn verb_qas(&self, sentence: &Sentence) -> Result<Vec<VerbQa>> {
        let tokens: Vec<&str> = (0..sentence.len()).filter_map(|i| sentence.token_text(i)).collect();
        let body = json!({ "id": sentence.id, "text": sentence.text, "tokens": tokens });
        let mut last = String::new();
        for attempt in 1..=self.retry.max_attempts {
            match self.attempt(&body) {
                Ok(qas) => return Ok(qas),
                Err(e) => {
                    log::warn!("{}: attempt {attempt} failed: {e}", self.url);
                    last = e;
                    if attempt < self.retry.max_attempts {
                        std::thread::sleep(self.retry.backoff(attempt));
                    }
                }
            }
        }
        Err(DecompError::Source(format!("{} after {} attempt(s): {last}", self.url, self.retry.max_attempts)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verb_blocks_parse() {
        let s = Sentence::tokenize("s", "Tompkins played the priest in 1950.");
        let raw = "Predicate: played\nQuestion: Who played something?\nAnswer: Tompkins\n\
                   Question: When did someone play something?\nAnswer: 1950\nnoise\nAnswer: orphan";
        let qas = parse_verb_output(raw, &s);
        assert_eq!(
            qas,
            vec![
                VerbQa::new(Some(1), "Who played something?", "Tompkins"),
                VerbQa::new(Some(1), "When did someone play something?", "1950"),
            ]
        );
        assert!(PromptVerbSource::prompt(&s).ends_with("Sentence: Tompkins played the priest in 1950.\n"));
    }

    #[test]
    fn unreachable_verb_endpoint_is_transport_error() {
        let src = EndpointVerbSource::new("http://127.0.0.1:9/qasrl", Duration::from_millis(200), RetryPolicy::no_backoff(2)).unwrap();
        let err = src.verb_qas(&Sentence::tokenize("s", "It rained.")).unwrap_err();
        assert!(err.is_transport(), "{err}");
    }
}
