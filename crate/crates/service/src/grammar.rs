//! Machine-readable description of the question grammar for clients.

use serde::{Deserialize, Serialize};

use qanoun_core::schema::template::MAX_PROPERTY_WORDS;
use qanoun_core::schema::dataset::QaEntry;
use qanoun_core::schema::{render_question, Amount, PartMember, QAPair, QuestionForm, TemplateId, TokenRange, WhChoice};

/// Noun and descriptors used for the rendered examples.
pub const EXAMPLE_NOUN: &str = "camp";
pub const EXAMPLE_PROPERTIES: [&str; 2] = ["size", "home city"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSlots {
    pub property: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub wh: Vec<WhChoice>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub part_member: Vec<PartMember>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub much_many: Vec<Amount>,
    pub article: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateInfo {
    pub number: u8,
    pub name: String,
    pub slots: TemplateSlots,
    /// Rendering with placeholder noun `NOUN` and descriptor `PROPERTY`,
    /// using the article where one is allowed.
    pub shape: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarExample {
    pub noun: String,
    /// The form in dataset encoding, with a placeholder answer.
    pub form: QaEntry,
    pub question: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarFixtures {
    pub version: u32,
    pub max_property_words: usize,
    pub templates: Vec<TemplateInfo>,
    pub examples: Vec<GrammarExample>,
}

fn slots(t: TemplateId) -> TemplateSlots {
    let mut s = TemplateSlots {
        property: t == TemplateId::Property,
        wh: Vec::new(),
        part_member: Vec::new(),
        much_many: Vec::new(),
        article: t.takes_article(),
    };
    match t {
        TemplateId::Quantity => s.much_many = Amount::ALL.to_vec(),
        TemplateId::PartMemberOf => s.part_member = PartMember::ALL.to_vec(),
        TemplateId::HasPartMember => {
            s.wh = WhChoice::ALL.to_vec();
            s.part_member = PartMember::ALL.to_vec();
        }
        TemplateId::Copular => s.wh = WhChoice::ALL.to_vec(),
        _ => {}
    }
    s
}

fn shape(t: TemplateId) -> String {
    let form = QuestionForm::slot_grid(&["PROPERTY"])
        .into_iter()
        .find(|f| f.template == t)
        .expect("every template has a grid entry");
    render_question(&form, "NOUN").expect("grid forms render")
}

/// Templates, slot choices and every slot combination rendered for a sample
/// noun. Deterministic, so it can be checked in as a golden file.
pub fn grammar_fixtures() -> GrammarFixtures {
    let templates = TemplateId::ALL
        .iter()
        .map(|&t| TemplateInfo {
            number: t.number(),
            name: t.name().to_string(),
            slots: slots(t),
            shape: shape(t),
        })
        .collect();
    let examples = QuestionForm::slot_grid(&EXAMPLE_PROPERTIES)
        .into_iter()
        .map(|form| {
            let pair = QAPair {
                form,
                answer: TokenRange::single(0),
                answer_text: String::new(),
            };
            let entry = QaEntry::from_pair(&pair, EXAMPLE_NOUN);
            GrammarExample {
                noun: EXAMPLE_NOUN.to_string(),
                question: entry.question.clone(),
                form: entry,
            }
        })
        .collect();
    GrammarFixtures {
        version: 1,
        max_property_words: MAX_PROPERTY_WORDS,
        templates,
        examples,
    }
}

pub fn grammar_fixtures_json() -> String {
    let mut s = serde_json::to_string_pretty(&grammar_fixtures()).expect("fixtures serialize");
    s.push('\n');
    s
}
