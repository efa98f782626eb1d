#![allow(dead_code)]

use std::path::{Path, PathBuf};

use qanoun_core::schema::dataset::{dataset_to_string, DatasetRecord, Split};
use qanoun_core::schema::{AnnotationRecord, NounTarget, Phase, QAPair, QuestionForm, Sentence, TokenRange};

pub const WORKED_TEXT: &str = "Officials from the city council said the new stadium will open next year";
pub const WORKED_TARGET: usize = 8;
pub const WORKED_PRED: [(usize, usize); 2] = [(0, 2), (5, 8)];
pub const WORKED_GOLD: [(usize, usize); 3] = [(1, 2), (5, 6), (10, 11)];

pub fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qanoun").chain(args.iter().copied());
    let code = qanoun_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn record(sentence: &Sentence, who: &str, phase: Phase, spans: &[(usize, usize)]) -> AnnotationRecord {
    let qas = spans
        .iter()
        .map(|&(a, b)| QAPair::from_range(sentence, QuestionForm::possession(), TokenRange::new(a, b)).unwrap())
        .collect();
    AnnotationRecord::new(NounTarget::new(sentence, WORKED_TARGET).unwrap(), who, phase).with_qas(qas)
}

pub fn write_lines(path: &Path, lines: &[DatasetRecord]) -> PathBuf {
    std::fs::write(path, dataset_to_string(lines)).unwrap();
    path.to_path_buf()
}

/// Predicted and gold files for the worked scoring example.
pub fn worked_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let s = Sentence::tokenize("w1", WORKED_TEXT);
    let pred = DatasetRecord::from_parts(&s, Split::Test, vec![(WORKED_TARGET, vec![record(&s, "model", Phase::Independent, &WORKED_PRED)])]);
    let gold = DatasetRecord::from_parts(&s, Split::Test, vec![(WORKED_TARGET, vec![record(&s, "gold", Phase::Consolidated, &WORKED_GOLD)])]);
    (write_lines(&dir.join("pred.jsonl"), &[pred]), write_lines(&dir.join("gold.jsonl"), &[gold]))
}

pub fn scripted_corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../decomp/tests/fixtures/scripted_corpus.json")
}
