//! Statistics on a synthetic corpus shaped like the released dataset.

use qanoun_core::reference;
use qanoun_core::schema::dataset::{DatasetRecord, Split};
use qanoun_core::schema::stats::compare_with_published;
use qanoun_core::schema::{dataset_stats, PartMember, WhChoice};
use qanoun_core::{AnnotationRecord, NounTarget, Phase, QAPair, QuestionForm, Sentence, TemplateId, TokenRange};

fn form_for(t: TemplateId) -> QuestionForm {
    match t {
        TemplateId::Property => QuestionForm::property("name", true),
        TemplateId::Possession => QuestionForm::possession(),
        TemplateId::Location => QuestionForm::location(),
        TemplateId::Quantity => QuestionForm::quantity(qanoun_core::schema::Amount::Many),
        TemplateId::PartMemberOf => QuestionForm::part_member_of(PartMember::Member),
        TemplateId::HasPartMember => QuestionForm::has_part_member(WhChoice::Who, PartMember::Member),
        TemplateId::Copular => QuestionForm::copular(WhChoice::Who, true),
        TemplateId::SubSpecification => QuestionForm::sub_specification(),
        TemplateId::Time => QuestionForm::time(),
    }
}

/// 1,686 sentences and 2,029 targets carrying the published per-template
/// counts, spread round-robin.
fn synthetic_corpus() -> Vec<DatasetRecord> {
    let words: Vec<String> = (0..12).map(|i| format!("w{i}")).collect();
    let text = words.join(" ");
    let mut arguments: Vec<TemplateId> = Vec::new();
    for (t, &n) in TemplateId::ALL.iter().zip(&reference::TEMPLATE_TABLE) {
        arguments.extend(std::iter::repeat_n(*t, n));
    }
    let mut per_target: Vec<Vec<TemplateId>> = vec![Vec::new(); reference::DATASET_PREDICATES];
    for (i, t) in arguments.into_iter().enumerate() {
        per_target[i % reference::DATASET_PREDICATES].push(t);
    }
    let mut lines = Vec::new();
    let mut target_iter = per_target.into_iter();
    for s in 0..reference::DATASET_SENTENCES {
        let sentence = Sentence::tokenize(format!("s{s}"), text.clone());
        // the first 343 sentences carry two targets
        let n_targets = if s < reference::DATASET_PREDICATES - reference::DATASET_SENTENCES { 2 } else { 1 };
        let mut targets = Vec::new();
        for k in 0..n_targets {
            let templates = target_iter.next().unwrap();
            let target = NounTarget::new(&sentence, k).unwrap();
            let qas = templates
                .iter()
                .enumerate()
                .map(|(j, t)| QAPair::from_range(&sentence, form_for(*t), TokenRange::single(2 + j)).unwrap())
                .collect();
            let rec = AnnotationRecord::new(target, "c", Phase::Consolidated).with_qas(qas);
            targets.push((k, vec![rec]));
        }
        let split = match s % 10 {
            0..=4 => Split::Train,
            5 => Split::Dev,
            _ => Split::Test,
        };
        lines.push(DatasetRecord::from_parts(&sentence, split, targets));
    }
    lines
}

#[test]
fn reproduces_table_shape_and_flags_total() {
    let corpus = synthetic_corpus();
    let stats = dataset_stats(&corpus).unwrap();
    assert_eq!(stats.sentences, 1686);
    assert_eq!(stats.predicates, 2029);
    assert_eq!(stats.template_count(TemplateId::Property), 1146);
    assert_eq!(stats.template_count(TemplateId::Time), 140);
    assert_eq!(stats.arguments, 4909);

    let notes = compare_with_published(&stats);
    // the computed argument count and the published table inconsistency
    assert_eq!(notes.len(), 2, "{notes:?}");
    assert_eq!(notes[0].quantity, "arguments");
    assert_eq!((notes[0].published, notes[0].computed), (4869, 4909));
    assert_eq!((notes[1].published, notes[1].computed), (4869, 4909));

    let table = stats.to_string();
    assert!(table.contains("1146"));
    assert!(table.contains("sentences: 1686  predicates: 2029  arguments: 4909"));
}

#[test]
fn unresolved_targets_are_counted_separately() {
    let s = Sentence::tokenize("s", "a b c");
    let t = NounTarget::new(&s, 0).unwrap();
    let qa = QAPair::from_range(&s, QuestionForm::possession(), TokenRange::single(1)).unwrap();
    let a = AnnotationRecord::new(t.clone(), "a", Phase::Independent).with_qas(vec![qa.clone()]);
    let b = AnnotationRecord::new(t, "b", Phase::Independent).with_qas(vec![qa]);
    let line = DatasetRecord::from_parts(&s, Split::Dev, vec![(0, vec![a, b])]);
    let stats = dataset_stats(&[line]).unwrap();
    assert_eq!(stats.arguments, 0);
    assert_eq!(stats.unresolved_targets, 1);
}
