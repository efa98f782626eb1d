use std::sync::Arc;

use proptest::prelude::*;
use qanoun_core::schema::tagger::FixedTagger;
use qanoun_core::schema::{parse_question, NounTarget, QAPair, Sentence};
use qanoun_decomp::error::DecompError;
use qanoun_decomp::sources::AlwaysEntailed;
use qanoun_decomp::{MeaningUnit, Pipeline, VerbQa};

const VERBS: [(&str, &str); 4] = [
    ("Who sold something?", "The old man"),
    ("What did someone sell?", "three boats"),
    ("When did someone sell something?", "in June"),
    ("Who bought something?", "the man"),
];

fn pipeline(order: Vec<usize>) -> Pipeline {
    let nouns = |s: &Sentence, t: &NounTarget| {
        let form = parse_question("What is the [age] of the man?", &t.surface)?;
        let range = s.find_phrase("old")[0];
        Ok::<_, DecompError>(vec![QAPair::from_range(s, form, range)?])
    };
    let verbs = move |_: &Sentence| {
        Ok::<_, DecompError>(order.iter().map(|&i| VerbQa::new(Some(3), VERBS[i].0, VERBS[i].1)).collect())
    };
    // Equivalence depends on content only.
    let judge = |_: &Sentence, a: &MeaningUnit, b: &MeaningUnit| {
        Ok::<_, DecompError>(a.answer_text.contains("man") && b.answer_text.contains("man"))
    };
    Pipeline {
        tagger: Arc::new(FixedTagger::new([("s".to_string(), vec![2])].into_iter().collect())),
        nouns: Arc::new(nouns),
        verbs: Arc::new(verbs),
        redundancy: Arc::new(judge),
        entailment: Arc::new(AlwaysEntailed),
        within_source: true,
    }
}

proptest! {
    #[test]
    fn permuting_source_output_keeps_counts(order in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let s = Sentence::tokenize("s", "The old man sold three boats in June to the man.");
        let base = pipeline(vec![0, 1, 2, 3]).run_sentence(&s).unwrap().counts();
        let perm = pipeline(order).run_sentence(&s).unwrap().counts();
        prop_assert_eq!(base, perm);
    }
}
