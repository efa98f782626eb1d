use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The nine question templates, numbered as in the parser prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum TemplateId {
    Property = 1,
    Possession = 2,
    Location = 3,
    Quantity = 4,
    PartMemberOf = 5,
    HasPartMember = 6,
    Copular = 7,
    SubSpecification = 8,
    Time = 9,
}

impl TemplateId {
    pub const ALL: [TemplateId; 9] = [
        TemplateId::Property,
        TemplateId::Possession,
        TemplateId::Location,
        TemplateId::Quantity,
        TemplateId::PartMemberOf,
        TemplateId::HasPartMember,
        TemplateId::Copular,
        TemplateId::SubSpecification,
        TemplateId::Time,
    ];

    pub fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            TemplateId::Property => "Property",
            TemplateId::Possession => "Possession",
            TemplateId::Location => "Location",
            TemplateId::Quantity => "Quantity",
            TemplateId::PartMemberOf => "PartMemberOf",
            TemplateId::HasPartMember => "HasPartMember",
            TemplateId::Copular => "Copular",
            TemplateId::SubSpecification => "SubSpecification",
            TemplateId::Time => "Time",
        }
    }

    /// Whether the pattern has an optional "(the)" before the noun.
    pub fn takes_article(self) -> bool {
        matches!(self, TemplateId::Property | TemplateId::Copular)
    }
}

impl From<TemplateId> for u8 {
    fn from(t: TemplateId) -> u8 {
        t.number()
    }
}

impl TryFrom<u8> for TemplateId {
    type Error = String;

    fn try_from(n: u8) -> std::result::Result<Self, String> {
        TemplateId::from_number(n).ok_or_else(|| format!("template number {n} outside 1..=9"))
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WhChoice {
    What,
    Who,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PartMember {
    Part,
    Member,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Amount {
    Much,
    Many,
}

impl WhChoice {
    pub const ALL: [WhChoice; 2] = [WhChoice::What, WhChoice::Who];

    pub fn word(self) -> &'static str {
        match self {
            WhChoice::What => "what",
            WhChoice::Who => "who",
        }
    }
}

impl PartMember {
    pub const ALL: [PartMember; 2] = [PartMember::Part, PartMember::Member];

    pub fn word(self) -> &'static str {
        match self {
            PartMember::Part => "part",
            PartMember::Member => "member",
        }
    }
}

impl Amount {
    pub const ALL: [Amount; 2] = [Amount::Much, Amount::Many];

    pub fn word(self) -> &'static str {
        match self {
            Amount::Much => "much",
            Amount::Many => "many",
        }
    }
}

/// A template together with its slot fillers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuestionForm {
    pub template: TemplateId,
    pub property_word: Option<String>,
    pub wh_choice: Option<WhChoice>,
    pub part_member_choice: Option<PartMember>,
    pub amount_choice: Option<Amount>,
    pub use_article: bool,
}

/// Longest property descriptor accepted, in words.
pub const MAX_PROPERTY_WORDS: usize = 4;

impl QuestionForm {
    fn bare(template: TemplateId) -> Self {
        Self {
            template,
            property_word: None,
            wh_choice: None,
            part_member_choice: None,
            amount_choice: None,
            use_article: false,
        }
    }

    pub fn property(word: impl Into<String>, use_article: bool) -> Self {
        Self {
            property_word: Some(word.into()),
            use_article,
            ..Self::bare(TemplateId::Property)
        }
    }

    pub fn possession() -> Self {
        Self::bare(TemplateId::Possession)
    }

    pub fn location() -> Self {
        Self::bare(TemplateId::Location)
    }

    pub fn quantity(amount: Amount) -> Self {
        Self {
            amount_choice: Some(amount),
            ..Self::bare(TemplateId::Quantity)
        }
    }

    pub fn part_member_of(choice: PartMember) -> Self {
        Self {
            part_member_choice: Some(choice),
            ..Self::bare(TemplateId::PartMemberOf)
        }
    }

    pub fn has_part_member(wh: WhChoice, choice: PartMember) -> Self {
        Self {
            wh_choice: Some(wh),
            part_member_choice: Some(choice),
            ..Self::bare(TemplateId::HasPartMember)
        }
    }

    pub fn copular(wh: WhChoice, use_article: bool) -> Self {
        Self {
            wh_choice: Some(wh),
            use_article,
            ..Self::bare(TemplateId::Copular)
        }
    }

    pub fn sub_specification() -> Self {
        Self::bare(TemplateId::SubSpecification)
    }

    pub fn time() -> Self {
        Self::bare(TemplateId::Time)
    }

    /// Checks slot presence rules for the template.
    pub fn check(&self) -> Result<()> {
        let t = self.template;
        let needs_property = t == TemplateId::Property;
        let needs_wh = matches!(t, TemplateId::HasPartMember | TemplateId::Copular);
        let needs_pm = matches!(t, TemplateId::PartMemberOf | TemplateId::HasPartMember);
        let needs_amount = t == TemplateId::Quantity;

        let slot = |name: &str, present: bool, needed: bool| -> Result<()> {
            match (present, needed) {
                (true, false) => Err(Error::InvalidForm(format!("{t} does not take a {name}"))),
                (false, true) => Err(Error::InvalidForm(format!("{t} requires a {name}"))),
                _ => Ok(()),
            }
        };
        slot("property word", self.property_word.is_some(), needs_property)?;
        slot("what/who choice", self.wh_choice.is_some(), needs_wh)?;
        slot("part/member choice", self.part_member_choice.is_some(), needs_pm)?;
        slot("much/many choice", self.amount_choice.is_some(), needs_amount)?;
        if self.use_article && !t.takes_article() {
            return Err(Error::InvalidForm(format!("{t} has no optional article")));
        }
        if let Some(word) = &self.property_word {
            check_property_word(word)?;
        }
        Ok(())
    }

    /// Every valid slot combination for all nine templates, with the Property
    /// template instantiated once per supplied descriptor.
    pub fn slot_grid(property_words: &[&str]) -> Vec<QuestionForm> {
        let mut forms = Vec::new();
        for &t in &TemplateId::ALL {
            match t {
                TemplateId::Property => {
                    for w in property_words {
                        for article in [true, false] {
                            forms.push(Self::property(*w, article));
                        }
                    }
                }
                TemplateId::Quantity => forms.extend(Amount::ALL.map(Self::quantity)),
                TemplateId::PartMemberOf => forms.extend(PartMember::ALL.map(Self::part_member_of)),
                TemplateId::HasPartMember => {
                    for wh in WhChoice::ALL {
                        forms.extend(PartMember::ALL.map(|pm| Self::has_part_member(wh, pm)));
                    }
                }
                TemplateId::Copular => {
                    for wh in WhChoice::ALL {
                        forms.extend([true, false].map(|a| Self::copular(wh, a)));
                    }
                }
                other => forms.push(Self::bare(other)),
            }
        }
        forms
    }
}

fn check_property_word(word: &str) -> Result<()> {
    if word.trim().is_empty() {
        return Err(Error::InvalidForm("property word is empty".into()));
    }
    if word != word.trim() || word.contains("  ") || word.chars().any(|c| c.is_whitespace() && c != ' ') {
        return Err(Error::InvalidForm(format!(
            "property word {word:?} must be single-spaced without surrounding whitespace"
        )));
    }
    if word.chars().any(|c| matches!(c, '[' | ']' | '<' | '>' | '?')) {
        return Err(Error::InvalidForm(format!(
            "property word {word:?} contains a reserved character"
        )));
    }
    if word.split(' ').count() > MAX_PROPERTY_WORDS {
        return Err(Error::InvalidForm(format!(
            "property word {word:?} is longer than {MAX_PROPERTY_WORDS} words"
        )));
    }
    Ok(())
}
