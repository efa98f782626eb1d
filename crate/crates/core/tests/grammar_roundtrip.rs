use std::collections::HashSet;

use proptest::prelude::*;
use qanoun_core::schema::{parse_question, render_question, QuestionForm};

const NOUNS: [&str; 20] = [
    "album", "aunt", "camp", "committee", "bridge", "officer", "role", "movement", "articles",
    "teams", "skills", "position", "exhibition catalogs", "Paris", "water", "president", "bill",
    "department", "journal", "New York Yankees",
];

const PROPERTIES: [&str; 6] = ["year", "size", "purpose", "name", "release date", "cause"];

#[test]
fn full_grid_round_trips() {
    let grid = QuestionForm::slot_grid(&PROPERTIES);
    for noun in NOUNS {
        for form in &grid {
            let q = render_question(form, noun).unwrap();
            assert_eq!(&parse_question(&q, noun).unwrap(), form, "{q}");
        }
    }
}

#[test]
fn renderings_are_distinct_per_noun() {
    let grid = QuestionForm::slot_grid(&PROPERTIES);
    for noun in NOUNS {
        let rendered: HashSet<String> = grid.iter().map(|f| render_question(f, noun).unwrap()).collect();
        assert_eq!(rendered.len(), grid.len(), "collision for {noun}");
    }
}

fn property_word() -> impl Strategy<Value = String> {
    proptest::collection::vec("[a-z][a-z'-]{0,8}", 1..=4).prop_map(|ws| ws.join(" "))
}

proptest! {
    #[test]
    fn property_forms_round_trip(word in property_word(), article: bool, noun in "[A-Za-z][a-z]{1,10}") {
        let form = QuestionForm::property(word, article);
        let q = render_question(&form, &noun).unwrap();
        prop_assert_eq!(parse_question(&q, &noun).unwrap(), form);
    }

    #[test]
    fn case_and_spacing_do_not_matter(idx in 0usize..18, noun in "[a-z]{2,10}") {
        let form = QuestionForm::slot_grid(&["year"])[idx].clone();
        let q = render_question(&form, &noun).unwrap();
        let mut chars = q.chars();
        let first = chars.next().unwrap().to_lowercase().to_string();
        let messy = format!("  {first}{}  ", chars.as_str().replace(' ', "   "));
        prop_assert_eq!(parse_question(&messy, &noun).unwrap(), form);
    }
}
