use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qanoun_core::schema::{NounTarget, QAPair, Sentence};

use crate::endpoint::{ChatMessage, Gateway};
use crate::error::{GatewayError, Result};

/// Single-pair entailment prompt; `{sentence}`, `{question}` and `{answer}`
/// are substituted.
pub const JUDGE_PROMPT: &str = include_str!("../fixtures/judge_prompt_v1.txt");
pub const JUDGE_PROMPT_VERSION: &str = "judge_prompt_v1";

/// Two-pair equivalence prompt used for redundancy clustering.
pub const PAIR_PROMPT: &str = include_str!("../fixtures/pair_entailment_v1.txt");
pub const PAIR_PROMPT_VERSION: &str = "pair_entailment_v1";

/// Follow-up sent once when the first reply is not a clean yes or no.
pub const REPROMPT: &str = "Answer with exactly one word: yes or no.";

pub fn prompt_hash(template: &str) -> String {
    hex::encode(Sha256::digest(template.as_bytes()))
}

/// A question-answer pair as shown to a judge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QaText {
    pub question: String,
    pub answer: String,
}

impl QaText {
    pub fn new(question: impl Into<String>, answer: impl Into<String>) -> Self {
        Self { question: question.into(), answer: answer.into() }
    }

    pub fn from_pair(qa: &QAPair, noun: &str) -> Result<Self> {
        Ok(Self::new(qa.question(noun)?, qa.answer_text.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntailmentVerdict {
    pub sentence_id: String,
    pub qa: QaText,
    pub entailed: bool,
    pub judge_model: String,
    /// Every reply received, in order.
    pub raw_response: Vec<String>,
    pub reprompted: bool,
    pub prompt_version: String,
    pub prompt_hash: String,
}

/// Maps a reply to a verdict when it is an unambiguous yes or no.
pub fn parse_yes_no(reply: &str) -> Option<bool> {
    let word = reply
        .trim()
        .trim_matches(|c: char| c.is_ascii_punctuation() || c.is_whitespace())
        .to_ascii_lowercase();
    match word.as_str() {
        "yes" => Some(true),
        "no" => Some(false),
        _ => None,
    }
}

/// Outcome of a yes/no exchange with at most one reprompt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YesNo {
    pub answer: bool,
    pub replies: Vec<String>,
    pub reprompted: bool,
}

pub fn ask_yes_no(gateway: &Gateway, prompt: &str) -> Result<YesNo> {
    let mut messages = vec![ChatMessage::user(prompt)];
    let first = gateway.complete(&messages)?;
    if let Some(answer) = parse_yes_no(&first) {
        return Ok(YesNo { answer, replies: vec![first], reprompted: false });
    }
    messages.push(ChatMessage::assistant(first.clone()));
    messages.push(ChatMessage::user(REPROMPT));
    let second = gateway.complete(&messages)?;
    match parse_yes_no(&second) {
        Some(answer) => Ok(YesNo { answer, replies: vec![first, second], reprompted: true }),
        None => Err(GatewayError::IndeterminateVerdict { response: second }),
    }
}

pub fn render_judge_prompt(sentence: &Sentence, qa: &QaText) -> String {
    JUDGE_PROMPT
        .replace("{sentence}", &sentence.text)
        .replace("{question}", &qa.question)
        .replace("{answer}", &qa.answer)
}

pub fn render_pair_prompt(sentence: &Sentence, a: &QaText, b: &QaText) -> String {
    PAIR_PROMPT
        .replace("{sentence}", &sentence.text)
        .replace("{question_a}", &a.question)
        .replace("{answer_a}", &a.answer)
        .replace("{question_b}", &b.question)
        .replace("{answer_b}", &b.answer)
}

/// Asks whether a rendered question and its answer follow from the sentence.
pub fn judge_text(sentence: &Sentence, qa: &QaText, gateway: &Gateway) -> Result<EntailmentVerdict> {
    let yn = ask_yes_no(gateway, &render_judge_prompt(sentence, qa))?;
    Ok(EntailmentVerdict {
        sentence_id: sentence.id.clone(),
        qa: qa.clone(),
        entailed: yn.answer,
        judge_model: gateway.model().to_string(),
        raw_response: yn.replies,
        reprompted: yn.reprompted,
        prompt_version: JUDGE_PROMPT_VERSION.to_string(),
        prompt_hash: prompt_hash(JUDGE_PROMPT),
    })
}

/// Judges a QA about `target`, presented as its question and answer.
pub fn judge_entailment(
    sentence: &Sentence,
    target: &NounTarget,
    qa: &QAPair,
    gateway: &Gateway,
) -> Result<EntailmentVerdict> {
    judge_text(sentence, &QaText::from_pair(qa, &target.surface)?, gateway)
}

/// Whether two QAs state the same fact according to the judge.
pub fn judge_equivalent(sentence: &Sentence, a: &QaText, b: &QaText, gateway: &Gateway) -> Result<YesNo> {
    ask_yes_no(gateway, &render_pair_prompt(sentence, a, b))
}
