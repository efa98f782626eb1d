//! Line-delimited dataset format: one JSON object per sentence.
//!
//! Unknown fields at any level are kept in `extra` maps and written back
//! after the known fields, so read → write is lossless and write → read →
//! write is byte-stable.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::grammar::{parse_question, render_question};
use super::record::{AnnotationRecord, NounTarget, Phase, QAPair};
use super::sentence::Sentence;
use super::span::{TokenRange, TokenSpan};
use super::tagger::NounTagger;
use super::template::{Amount, PartMember, QuestionForm, TemplateId, WhChoice};
use super::validate::{validate_record, Rule, Violation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaEntry {
    pub template: TemplateId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wh: Option<WhChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part_member: Option<PartMember>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub much_many: Option<Amount>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub article: Option<bool>,
    pub question: String,
    pub answer: TokenRange,
    pub answer_text: String,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl QaEntry {
    pub fn form(&self) -> QuestionForm {
        QuestionForm {
            template: self.template,
            property_word: self.property.clone(),
            wh_choice: self.wh,
            part_member_choice: self.part_member,
            amount_choice: self.much_many,
            use_article: self.article.unwrap_or(false),
        }
    }

    pub fn to_pair(&self) -> QAPair {
        QAPair {
            form: self.form(),
            answer: self.answer,
            answer_text: self.answer_text.clone(),
        }
    }

    /// Builds an entry, rendering the question for `noun`. Invalid forms get
    /// an empty question so the problem is still reported by validation.
    pub fn from_pair(pair: &QAPair, noun: &str) -> Self {
        let f = &pair.form;
        Self {
            template: f.template,
            property: f.property_word.clone(),
            wh: f.wh_choice,
            part_member: f.part_member_choice,
            much_many: f.amount_choice,
            article: f.template.takes_article().then_some(f.use_article),
            question: render_question(f, noun).unwrap_or_default(),
            answer: pair.answer,
            answer_text: pair.answer_text.clone(),
            extra: Map::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordEntry {
    pub annotator: String,
    pub phase: Phase,
    #[serde(default)]
    pub qas: Vec<QaEntry>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub token_index: usize,
    #[serde(default)]
    pub records: Vec<RecordEntry>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl TargetEntry {
    /// The record that stands for this target: the consolidated one when
    /// present, otherwise the only record.
    pub fn final_record(&self) -> Option<&RecordEntry> {
        self.records
            .iter()
            .find(|r| r.phase == Phase::Consolidated)
            .or(match self.records.as_slice() {
                [only] => Some(only),
                _ => None,
            })
    }
}

/// One line of a dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: String,
    pub text: String,
    pub tokens: Vec<TokenSpan>,
    pub split: Split,
    #[serde(default)]
    pub targets: Vec<TargetEntry>,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

/// A violation located within a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetViolation {
    pub sentence_id: String,
    pub token_index: Option<usize>,
    pub annotator: Option<String>,
    #[serde(flatten)]
    pub violation: Violation,
}

impl fmt::Display for DatasetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sentence_id)?;
        if let Some(t) = self.token_index {
            write!(f, " target {t}")?;
        }
        if let Some(a) = &self.annotator {
            write!(f, " annotator {a}")?;
        }
        write!(f, ": {}", self.violation)
    }
}

impl DatasetRecord {
    pub fn from_parts(sentence: &Sentence, split: Split, targets: Vec<(usize, Vec<AnnotationRecord>)>) -> Self {
        let targets = targets
            .into_iter()
            .map(|(token_index, records)| {
                let noun = sentence.token_text(token_index).unwrap_or_default().to_string();
                TargetEntry {
                    token_index,
                    records: records
                        .iter()
                        .map(|r| RecordEntry {
                            annotator: r.annotator_id.clone(),
                            phase: r.phase,
                            qas: r.qas.iter().map(|qa| QaEntry::from_pair(qa, &noun)).collect(),
                            extra: Map::new(),
                        })
                        .collect(),
                    extra: Map::new(),
                }
            })
            .collect();
        Self {
            id: sentence.id.clone(),
            text: sentence.text.clone(),
            tokens: sentence.tokens.clone(),
            split,
            targets,
            extra: Map::new(),
        }
    }

    /// The sentence without token checks.
    pub fn sentence_unchecked(&self) -> Sentence {
        Sentence {
            id: self.id.clone(),
            text: self.text.clone(),
            tokens: self.tokens.clone(),
        }
    }

    pub fn sentence(&self) -> Result<Sentence> {
        let s = self.sentence_unchecked();
        s.check()?;
        Ok(s)
    }

    fn noun_target(&self, sentence: &Sentence, token_index: usize) -> NounTarget {
        NounTarget {
            sentence_id: self.id.clone(),
            token_index,
            surface: sentence.token_text(token_index).unwrap_or_default().to_string(),
        }
    }

    pub fn to_annotation_record(&self, sentence: &Sentence, target: &TargetEntry, record: &RecordEntry) -> AnnotationRecord {
        AnnotationRecord {
            target: self.noun_target(sentence, target.token_index),
            annotator_id: record.annotator.clone(),
            phase: record.phase,
            qas: record.qas.iter().map(QaEntry::to_pair).collect(),
        }
    }

    /// All violations in this line: token invariants, per-record rules, and
    /// stored questions that do not parse to the stored slots. When a tagger
    /// is supplied, targets it does not consider nouns are reported too.
    pub fn validate(&self, tagger: Option<&dyn NounTagger>) -> Vec<DatasetViolation> {
        let mut out = Vec::new();
        let at = |token_index: Option<usize>, annotator: Option<&str>, violation: Violation| DatasetViolation {
            sentence_id: self.id.clone(),
            token_index,
            annotator: annotator.map(str::to_string),
            violation,
        };
        let sentence = match self.sentence() {
            Ok(s) => s,
            Err(e) => {
                out.push(at(
                    None,
                    None,
                    Violation {
                        rule: Rule::InvalidTokens,
                        qa: None,
                        answer: None,
                        detail: e.to_string(),
                    },
                ));
                return out;
            }
        };
        let nouns = tagger.and_then(|t| t.noun_indices(&sentence).ok());
        for target in &self.targets {
            let ti = Some(target.token_index);
            if let (Some(nouns), Some(_)) = (&nouns, sentence.token_text(target.token_index)) {
                if !nouns.contains(&target.token_index) {
                    out.push(at(
                        ti,
                        None,
                        Violation {
                            rule: Rule::TargetNotNoun,
                            qa: None,
                            answer: None,
                            detail: format!("token {} is not tagged as a noun", target.token_index),
                        },
                    ));
                }
            }
            for record in &target.records {
                let annotation = self.to_annotation_record(&sentence, target, record);
                for v in validate_record(&annotation, &sentence) {
                    out.push(at(ti, Some(&record.annotator), v));
                }
                let noun = &annotation.target.surface;
                for (i, qa) in record.qas.iter().enumerate() {
                    let form = qa.form();
                    if form.check().is_err() || noun.is_empty() {
                        continue;
                    }
                    let agrees = parse_question(&qa.question, noun).map(|parsed| parsed == form).unwrap_or(false);
                    if !agrees {
                        let expected = render_question(&form, noun).unwrap_or_default();
                        out.push(at(
                            ti,
                            Some(&record.annotator),
                            Violation {
                                rule: Rule::QuestionMismatch,
                                qa: Some(i),
                                answer: Some(qa.answer),
                                detail: format!("question {:?} does not match its slots ({expected:?})", qa.question),
                            },
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Reads a dataset, one object per nonblank line.
pub fn read_dataset(reader: impl BufRead) -> Result<Vec<DatasetRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DatasetRecord = serde_json::from_str(&line).map_err(|e| Error::Ingestion {
            line: i + 1,
            record_id: serde_json::from_str::<Value>(&line)
                .ok()
                .and_then(|v| v.get("id").and_then(Value::as_str).map(str::to_string)),
            message: e.to_string(),
        })?;
        out.push(record);
    }
    Ok(out)
}

pub fn read_dataset_file(path: impl AsRef<std::path::Path>) -> Result<Vec<DatasetRecord>> {
    let file = std::fs::File::open(path)?;
    read_dataset(std::io::BufReader::new(file))
}

pub fn write_dataset(mut writer: impl Write, records: &[DatasetRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}

pub fn dataset_to_string(records: &[DatasetRecord]) -> String {
    let mut buf = Vec::new();
    write_dataset(&mut buf, records).expect("writing to memory");
    String::from_utf8(buf).expect("json is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{"id":"s1","text":"The album was released in 1971.","tokens":[{"start":0,"end":3},{"start":4,"end":9},{"start":10,"end":13},{"start":14,"end":22},{"start":23,"end":25},{"start":26,"end":30},{"start":30,"end":31}],"split":"test","targets":[{"token_index":1,"records":[{"annotator":"a1","phase":"consolidated","qas":[{"template":9,"question":"When is the album?","answer":{"first_token":5,"last_token":5},"answer_text":"1971","confidence":0.9}],"note":"ok"}]}],"source":"wikinews"}"#;

    #[test]
    fn unknown_fields_survive_rewrite() {
        let records = read_dataset(LINE.as_bytes()).unwrap();
        assert_eq!(records[0].extra.get("source"), Some(&Value::from("wikinews")));
        let out = dataset_to_string(&records);
        assert_eq!(out, format!("{LINE}\n"));
        assert!(records[0].validate(None).is_empty());
    }

    #[test]
    fn malformed_line_reports_position() {
        let bad = format!("{LINE}\n{{\"id\":\"s2\",\"text\":3}}\n");
        match read_dataset(bad.as_bytes()) {
            Err(Error::Ingestion { line, record_id, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(record_id.as_deref(), Some("s2"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad_template = LINE.replace("\"template\":9", "\"template\":10");
        assert!(read_dataset(bad_template.as_bytes()).is_err());
    }

    #[test]
    fn question_slot_disagreement_is_reported() {
        let edited = LINE.replace("When is the album?", "Whose album?");
        let records = read_dataset(edited.as_bytes()).unwrap();
        let v = records[0].validate(None);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].violation.rule, Rule::QuestionMismatch);
    }

    #[test]
    fn final_record_prefers_consolidated() {
        let mut t = TargetEntry {
            token_index: 0,
            records: vec![],
            extra: Map::new(),
        };
        assert!(t.final_record().is_none());
        let rec = |a: &str, phase| RecordEntry {
            annotator: a.into(),
            phase,
            qas: vec![],
            extra: Map::new(),
        };
        t.records.push(rec("a", Phase::Independent));
        assert_eq!(t.final_record().unwrap().annotator, "a");
        t.records.push(rec("b", Phase::Independent));
        assert!(t.final_record().is_none());
        t.records.push(rec("c", Phase::Consolidated));
        assert_eq!(t.final_record().unwrap().annotator, "c");
    }
}
