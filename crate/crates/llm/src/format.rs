use std::fmt;

use serde::{Deserialize, Serialize};

use qanoun_core::schema::grammar::parse_question;
use qanoun_core::schema::{NounTarget, QAPair, Sentence, TemplateId};

use crate::error::Result;

/// Output emitted when the target has no arguments.
pub const NO_QAS_SENTINEL: &str = "There are no QAs generated.";

const HEADER: &str = "QAs:";
const NUMBER_PREFIX: &str = "Question template number:";
const QUESTION_PREFIX: &str = "Question:";
const ANSWER_PREFIX: &str = "Answer:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    UnrecognizedLine,
    IncompleteBlock,
    BadTemplateNumber,
    UnparseableQuestion,
    TemplateMismatch,
    UngroundedAnswer,
    AmbiguousAnswer,
    DuplicateAnswer,
}

impl DiagnosticKind {
    pub fn code(self) -> &'static str {
        match self {
            DiagnosticKind::UnrecognizedLine => "unrecognized-line",
            DiagnosticKind::IncompleteBlock => "incomplete-block",
            DiagnosticKind::BadTemplateNumber => "bad-template-number",
            DiagnosticKind::UnparseableQuestion => "unparseable-question",
            DiagnosticKind::TemplateMismatch => "template-mismatch",
            DiagnosticKind::UngroundedAnswer => "ungrounded-answer",
            DiagnosticKind::AmbiguousAnswer => "ambiguous-answer",
            DiagnosticKind::DuplicateAnswer => "duplicate-answer",
        }
    }

    /// Whether the QA the note refers to was kept in the outcome.
    pub fn keeps_qa(self) -> bool {
        matches!(self, DiagnosticKind::AmbiguousAnswer)
    }
}

/// A per-line note produced while parsing model output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    /// 1-based line number in the raw text.
    pub line: usize,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.kind.code(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseOutcome {
    pub qas: Vec<QAPair>,
    pub raw_text: String,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn has(&self, kind: DiagnosticKind) -> bool {
        self.diagnostics.iter().any(|d| d.kind == kind)
    }
}

/// Renders `(template number, question, answer)` triples as a `QAs:` block.
pub(crate) fn render_block<'a>(items: impl IntoIterator<Item = (u8, &'a str, &'a str)>) -> String {
    let mut out = String::from(HEADER);
    for (n, q, a) in items {
        out.push_str(&format!("\n{NUMBER_PREFIX} {n}\n{QUESTION_PREFIX} {q}\n{ANSWER_PREFIX} {a}"));
    }
    out
}

/// Renders QAs about `noun` in the three-line output format, ordered by
/// template number (stable within a template).
pub fn render_output(qas: &[QAPair], noun: &str) -> Result<String> {
    if qas.is_empty() {
        return Ok(NO_QAS_SENTINEL.to_string());
    }
    let mut rows = Vec::with_capacity(qas.len());
    for qa in qas {
        rows.push((qa.form.template.number(), qa.question(noun)?, qa.answer_text.clone()));
    }
    rows.sort_by_key(|r| r.0);
    Ok(render_block(rows.iter().map(|(n, q, a)| (*n, q.as_str(), a.as_str()))))
}

#[derive(Default)]
struct Pending {
    start: usize,
    number: Option<String>,
    question: Option<String>,
}

struct Parser<'a> {
    sentence: &'a Sentence,
    target: &'a NounTarget,
    qas: Vec<QAPair>,
    diagnostics: Vec<Diagnostic>,
}

impl Parser<'_> {
    fn note(&mut self, line: usize, kind: DiagnosticKind, message: String) {
        self.diagnostics.push(Diagnostic { line, kind, message });
    }

    fn incomplete(&mut self, p: &Pending, missing: &str) {
        self.note(p.start, DiagnosticKind::IncompleteBlock, format!("block is missing its {missing} line"));
    }

    fn finish(&mut self, p: Pending, line: usize, answer: &str) {
        let (Some(number), Some(question)) = (p.number, p.question) else {
            self.note(line, DiagnosticKind::IncompleteBlock, "answer without a complete block".into());
            return;
        };
        let Some(template) = number.parse::<u8>().ok().and_then(TemplateId::from_number) else {
            self.note(p.start, DiagnosticKind::BadTemplateNumber, format!("{number:?} is not a template number"));
            return;
        };
        let form = match parse_question(&question, &self.target.surface) {
            Ok(f) => f,
            Err(e) => {
                self.note(line - 1, DiagnosticKind::UnparseableQuestion, e.to_string());
                return;
            }
        };
        if form.template != template {
            self.note(
                p.start,
                DiagnosticKind::TemplateMismatch,
                format!("question {question:?} matches template {} not {}", form.template.number(), template.number()),
            );
            return;
        }
        let hits = self.sentence.find_phrase(answer);
        let Some(&range) = hits.first() else {
            self.note(line, DiagnosticKind::UngroundedAnswer, format!("{answer:?} does not occur in the sentence"));
            return;
        };
        if self.qas.iter().any(|qa| qa.answer == range) {
            self.note(line, DiagnosticKind::DuplicateAnswer, format!("{answer:?} already answers another question"));
            return;
        }
        if hits.len() > 1 {
            self.note(
                line,
                DiagnosticKind::AmbiguousAnswer,
                format!("{answer:?} occurs {} times; grounded at {range}", hits.len()),
            );
        }
        let answer_text = self.sentence.range_text(range).unwrap_or(answer).to_string();
        self.qas.push(QAPair { form, answer: range, answer_text });
    }
}

fn strip<'a>(line: &'a str, prefix: &str) -> Option<&'a str> {
    let head = line.get(..prefix.len())?;
    head.eq_ignore_ascii_case(prefix).then(|| line[prefix.len()..].trim())
}

/// Parses model output into grounded QAs about `target`. Malformed blocks
/// become diagnostics; parsing never fails as a whole.
pub fn parse_output(raw: &str, sentence: &Sentence, target: &NounTarget) -> ParseOutcome {
    let mut p = Parser {
        sentence,
        target,
        qas: Vec::new(),
        diagnostics: Vec::new(),
    };
    let mut pending: Option<Pending> = None;
    for (i, line) in raw.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() || line.eq_ignore_ascii_case(HEADER) || line == NO_QAS_SENTINEL {
            continue;
        }
        if let Some(rest) = strip(line, NUMBER_PREFIX) {
            if let Some(prev) = pending.take() {
                p.incomplete(&prev, if prev.question.is_some() { "answer" } else { "question" });
            }
            pending = Some(Pending {
                start: n,
                number: Some(rest.to_string()),
                question: None,
            });
        } else if let Some(rest) = strip(line, QUESTION_PREFIX) {
            match pending.as_mut() {
                Some(b) if b.question.is_none() => b.question = Some(rest.to_string()),
                _ => {
                    if let Some(prev) = pending.take() {
                        p.incomplete(&prev, "answer");
                    }
                    p.note(n, DiagnosticKind::IncompleteBlock, "question without a template number".into());
                }
            }
        } else if let Some(rest) = strip(line, ANSWER_PREFIX) {
            let block = pending.take().unwrap_or(Pending { start: n, ..Pending::default() });
            p.finish(block, n, rest);
        } else {
            p.note(n, DiagnosticKind::UnrecognizedLine, format!("{line:?}"));
        }
    }
    if let Some(prev) = pending.take() {
        p.incomplete(&prev, if prev.question.is_some() { "answer" } else { "question" });
    }
    ParseOutcome {
        qas: p.qas,
        raw_text: raw.to_string(),
        diagnostics: p.diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qanoun_core::schema::{QuestionForm, TokenRange};

    fn album() -> (Sentence, NounTarget) {
        let s = Sentence::tokenize("s1", "The album was released in 1971.");
        let t = NounTarget::new(&s, 1).unwrap();
        (s, t)
    }

    #[test]
    fn possession_block() {
        let s = Sentence::tokenize("s", "She wrote the articles last year.");
        let t = NounTarget::new(&s, 3).unwrap();
        let out = parse_output("QAs:\nQuestion template number: 2\nQuestion: Whose articles?\nAnswer: She", &s, &t);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        assert_eq!(out.qas.len(), 1);
        assert_eq!(out.qas[0].form, QuestionForm::possession());
        assert_eq!(out.qas[0].answer, TokenRange::single(0));
    }

    #[test]
    fn sentinel_is_empty() {
        let (s, t) = album();
        let out = parse_output(NO_QAS_SENTINEL, &s, &t);
        assert!(out.qas.is_empty() && out.diagnostics.is_empty());
    }

    #[test]
    fn ungrounded_answer_noted() {
        let (s, t) = album();
        let raw = "QAs:\nQuestion template number: 9\nQuestion: When is the album?\nAnswer: 1971\n\
                   Question template number: 2\nQuestion: Whose album?\nAnswer: The Beatles";
        let out = parse_output(raw, &s, &t);
        assert_eq!(out.qas.len(), 1);
        assert!(out.has(DiagnosticKind::UngroundedAnswer));
    }

    #[test]
    fn malformed_blocks_do_not_abort() {
        let (s, t) = album();
        let raw = "QAs:\nQuestion template number: 12\nQuestion: When is the album?\nAnswer: 1971\n\
                   Question template number: 7\nQuestion: When is the album?\nAnswer: 1971\n\
                   Question template number: 9\nQuestion: Whenever album?\nAnswer: 1971\n\
                   Question template number: 9\nQuestion: When is the album?\n\
                   noise\n\
                   Question template number: 9\nQuestion: When is the album?\nAnswer: 1971\n\
                   Question template number: 1\nQuestion: What is the [year] of the album?\nAnswer: 1971";
        let out = parse_output(raw, &s, &t);
        let kinds: Vec<_> = out.diagnostics.iter().map(|d| d.kind).collect();
        assert_eq!(
            kinds,
            vec![
                DiagnosticKind::BadTemplateNumber,
                DiagnosticKind::TemplateMismatch,
                DiagnosticKind::UnparseableQuestion,
                DiagnosticKind::UnrecognizedLine,
                DiagnosticKind::IncompleteBlock,
                DiagnosticKind::DuplicateAnswer,
            ]
        );
        assert_eq!(out.qas.len(), 1);
        assert_eq!(out.qas[0].form, QuestionForm::time());
    }

    #[test]
    fn ambiguous_answer_takes_first_occurrence() {
        let s = Sentence::tokenize("s", "The red car passed the red house.");
        let t = NounTarget::new(&s, 2).unwrap();
        let out = parse_output("Question template number: 1\nQuestion: What is the [color] of the car?\nAnswer: red", &s, &t);
        assert_eq!(out.qas[0].answer, TokenRange::single(1));
        assert!(out.has(DiagnosticKind::AmbiguousAnswer));
    }

    #[test]
    fn render_sorts_by_template() {
        let (s, _) = album();
        let qas = vec![
            QAPair::from_range(&s, QuestionForm::time(), TokenRange::single(5)).unwrap(),
            QAPair::from_range(&s, QuestionForm::property("status", true), TokenRange::single(3)).unwrap(),
        ];
        let text = render_output(&qas, "album").unwrap();
        assert_eq!(
            text,
            "QAs:\nQuestion template number: 1\nQuestion: What is the [status] of the album?\nAnswer: released\n\
             Question template number: 9\nQuestion: When is the album?\nAnswer: 1971"
        );
        assert_eq!(render_output(&[], "album").unwrap(), NO_QAS_SENTINEL);
    }
}
