use qanoun_core::schema::{validate_record, AnnotationRecord, NounTarget, Phase, QAPair, QuestionForm, Sentence, TokenRange};
use qanoun_llm::format::{parse_output, render_output, NO_QAS_SENTINEL};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

const WORDS: &[&str] = &[
    "the", "old", "river", "bank", "of", "Paris", "red", "car", "three", "dogs", "mayor", "city", "near", "a",
    "station", "in", "1999", "large", "team's", "coach", "engine", "blue",
];
const PROPERTIES: &[&str] = &["color", "size", "purpose", "name", "cause", "status", "place of origin"];

/// A random sentence, target and valid QA set whose answers sit at the first
/// occurrence of their text, so grounding recovers them exactly.
fn random_case(rng: &mut ChaCha8Rng) -> (Sentence, NounTarget, Vec<QAPair>) {
    let n = rng.random_range(3..=14);
    let text = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect::<Vec<_>>().join(" ") + ".";
    let s = Sentence::tokenize("r", text);
    let target = NounTarget::new(&s, rng.random_range(0..n)).unwrap();
    let props: Vec<&str> = PROPERTIES.choose_multiple(rng, 2).copied().collect();
    let grid = QuestionForm::slot_grid(&props);
    let mut qas: Vec<QAPair> = Vec::new();
    let want = if rng.random_bool(0.1) { 0 } else { rng.random_range(1..=6) };
    for _ in 0..want * 4 {
        if qas.len() == want {
            break;
        }
        let first = rng.random_range(0..n);
        let last = (first + rng.random_range(0..3)).min(n - 1);
        let range = TokenRange::new(first, last);
        let text = s.range_text(range).unwrap();
        if s.find_phrase(text).first() != Some(&range) || qas.iter().any(|q| q.answer == range) {
            continue;
        }
        let form = grid.choose(rng).unwrap().clone();
        qas.push(QAPair::from_range(&s, form, range).unwrap());
    }
    qas.sort_by_key(|q| q.form.template);
    (s, target, qas)
}

#[test]
fn five_hundred_sets_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sentinels = 0;
    for case in 0..500 {
        let (s, t, qas) = random_case(&mut rng);
        let text = render_output(&qas, &t.surface).unwrap();
        if qas.is_empty() {
            assert_eq!(text, NO_QAS_SENTINEL);
            sentinels += 1;
        }
        let out = parse_output(&text, &s, &t);
        let unexpected: Vec<_> = out.diagnostics.iter().filter(|d| !d.kind.keeps_qa()).collect();
        assert!(unexpected.is_empty(), "case {case}: {unexpected:?}\n{text}");
        assert_eq!(out.qas, qas, "case {case}\n{text}");
    }
    assert!(sentinels > 0, "the sentinel case was never exercised");
}

#[test]
fn parsed_qas_always_pass_span_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let (s, t, _) = random_case(&mut rng);
        let mut raw = String::from("QAs:");
        for _ in 0..rng.random_range(0..8) {
            let a = rng.random_range(0..s.len());
            let b = (a + rng.random_range(0..3)).min(s.len() - 1);
            let answer = if rng.random_bool(0.2) {
                "missing words".to_string()
            } else {
                s.range_text(TokenRange::new(a, b)).unwrap().to_string()
            };
            raw.push_str(&format!(
                "\nQuestion template number: 9\nQuestion: When is the {}?\nAnswer: {answer}",
                t.surface
            ));
        }
        let out = parse_output(&raw, &s, &t);
        let record = AnnotationRecord::new(t.clone(), "model", Phase::Independent).with_qas(out.qas);
        assert_eq!(validate_record(&record, &s), vec![], "{raw}");
    }
}
