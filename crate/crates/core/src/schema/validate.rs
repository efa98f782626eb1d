use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::record::AnnotationRecord;
use super::sentence::Sentence;
use super::span::TokenRange;

/// Which guideline or structural rule a record breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    InvalidTokens,
    SentenceMismatch,
    TargetOutOfRange,
    TargetSurfaceMismatch,
    TargetNotNoun,
    InvalidForm,
    QuestionMismatch,
    NonContiguousAnswer,
    AnswerOutOfBounds,
    TextMismatch,
    DuplicateAnswer,
}

impl Rule {
    pub fn code(self) -> &'static str {
        match self {
            Rule::InvalidTokens => "invalid-tokens",
            Rule::SentenceMismatch => "sentence-mismatch",
            Rule::TargetOutOfRange => "target-out-of-range",
            Rule::TargetSurfaceMismatch => "target-surface-mismatch",
            Rule::TargetNotNoun => "target-not-noun",
            Rule::InvalidForm => "invalid-form",
            Rule::QuestionMismatch => "question-mismatch",
            Rule::NonContiguousAnswer => "non-contiguous-answer",
            Rule::AnswerOutOfBounds => "answer-out-of-bounds",
            Rule::TextMismatch => "text-mismatch",
            Rule::DuplicateAnswer => "duplicate-answer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    /// Index of the offending QA in the record, when the rule is per-QA.
    pub qa: Option<usize>,
    pub answer: Option<TokenRange>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qa {
            Some(i) => write!(f, "{} (qa {i}): {}", self.rule.code(), self.detail),
            None => write!(f, "{}: {}", self.rule.code(), self.detail),
        }
    }
}

fn violation(rule: Rule, qa: Option<usize>, answer: Option<TokenRange>, detail: String) -> Violation {
    Violation {
        rule,
        qa,
        answer,
        detail,
    }
}

/// Checks a record against its sentence. An empty result means valid.
pub fn validate_record(record: &AnnotationRecord, sentence: &Sentence) -> Vec<Violation> {
    let mut out = Vec::new();
    let target = &record.target;
    if target.sentence_id != sentence.id {
        out.push(violation(
            Rule::SentenceMismatch,
            None,
            None,
            format!("record targets sentence {:?}, checked against {:?}", target.sentence_id, sentence.id),
        ));
    }
    match sentence.token_text(target.token_index) {
        None => out.push(violation(
            Rule::TargetOutOfRange,
            None,
            None,
            format!("target token {} outside {} tokens", target.token_index, sentence.len()),
        )),
        Some(surface) if surface != target.surface => out.push(violation(
            Rule::TargetSurfaceMismatch,
            None,
            None,
            format!("target surface {:?} but token reads {surface:?}", target.surface),
        )),
        Some(_) => {}
    }

    let mut seen: HashMap<TokenRange, usize> = HashMap::new();
    for (i, qa) in record.qas.iter().enumerate() {
        let answer = Some(qa.answer);
        if let Err(e) = qa.form.check() {
            out.push(violation(Rule::InvalidForm, Some(i), answer, e.to_string()));
        }
        if !qa.answer.is_valid() {
            out.push(violation(
                Rule::NonContiguousAnswer,
                Some(i),
                answer,
                format!("answer range {} is inverted or empty", qa.answer),
            ));
        } else if qa.answer.last >= sentence.len() {
            out.push(violation(
                Rule::AnswerOutOfBounds,
                Some(i),
                answer,
                format!("answer range {} outside {} tokens", qa.answer, sentence.len()),
            ));
        } else {
            let covered = sentence.range_text(qa.answer).unwrap_or_default();
            if covered != qa.answer_text {
                out.push(violation(
                    Rule::TextMismatch,
                    Some(i),
                    answer,
                    format!("answer text {:?} but range {} covers {covered:?}", qa.answer_text, qa.answer),
                ));
            }
        }
        if let Some(&first) = seen.get(&qa.answer) {
            out.push(violation(
                Rule::DuplicateAnswer,
                Some(i),
                answer,
                format!("answer range {} already used by qa {first}", qa.answer),
            ));
        } else {
            seen.insert(qa.answer, i);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{NounTarget, Phase, QAPair, QuestionForm};

    fn setup() -> (Sentence, AnnotationRecord) {
        let s = Sentence::tokenize("s1", "The album was released in 1971 by Apple Records.");
        let target = NounTarget::new(&s, 1).unwrap();
        (s, AnnotationRecord::new(target, "a1", Phase::Independent))
    }

    #[test]
    fn empty_record_is_valid() {
        let (s, r) = setup();
        assert!(validate_record(&r, &s).is_empty());
    }

    #[test]
    fn duplicate_answer_flagged() {
        let (s, r) = setup();
        let r = r.with_qas(vec![
            QAPair::from_range(&s, QuestionForm::time(), TokenRange::single(5)).unwrap(),
            QAPair::from_range(&s, QuestionForm::property("year", true), TokenRange::single(5)).unwrap(),
        ]);
        let v = validate_record(&r, &s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::DuplicateAnswer);
        assert_eq!(v[0].qa, Some(1));
    }

    #[test]
    fn text_mismatch_flagged() {
        let (s, r) = setup();
        let mut qa = QAPair::from_range(&s, QuestionForm::possession(), TokenRange::new(7, 8)).unwrap();
        qa.answer_text = "Apple".into();
        let v = validate_record(&r.with_qas(vec![qa]), &s);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].rule, Rule::TextMismatch);
    }

    #[test]
    fn structural_problems() {
        let (s, mut r) = setup();
        r.qas.push(QAPair {
            form: QuestionForm::time(),
            answer: TokenRange::new(4, 2),
            answer_text: String::new(),
        });
        r.qas.push(QAPair {
            form: QuestionForm::time(),
            answer: TokenRange::new(8, 40),
            answer_text: String::new(),
        });
        let mut bad = QuestionForm::location();
        bad.use_article = true;
        r.qas.push(QAPair::from_range(&s, bad, TokenRange::single(0)).unwrap());
        r.target.surface = "song".into();
        let rules: Vec<Rule> = validate_record(&r, &s).into_iter().map(|v| v.rule).collect();
        assert_eq!(
            rules,
            [
                Rule::TargetSurfaceMismatch,
                Rule::NonContiguousAnswer,
                Rule::AnswerOutOfBounds,
                Rule::InvalidForm
            ]
        );
        let other = Sentence::tokenize("s2", "x");
        let rules: Vec<Rule> = validate_record(&r, &other).into_iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::SentenceMismatch));
        assert!(rules.contains(&Rule::TargetOutOfRange));
    }
}
