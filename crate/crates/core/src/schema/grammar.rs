//! Rendering and parsing of template questions.
//!
//! Canonical renderings put the property descriptor in square brackets
//! ("What is the [year] of the album?"). Parsing also accepts the
//! angle-bracket form used in the parser prompt, a bare descriptor, `<f></f>`
//! noun markers, any case on the first letter, and runs of spaces.

use super::template::{Amount, PartMember, QuestionForm, TemplateId, WhChoice};
use crate::error::{Error, Result};

/// Renders the question for `form` about `noun`.
pub fn render_question(form: &QuestionForm, noun: &str) -> Result<String> {
    form.check()?;
    let noun = normalize_spaces(noun);
    if noun.is_empty() {
        return Err(Error::InvalidForm("noun surface is empty".into()));
    }
    Ok(capitalize(&render_lower(form, &noun)))
}

fn the(use_article: bool) -> &'static str {
    if use_article {
        "the "
    } else {
        ""
    }
}

fn render_lower(form: &QuestionForm, noun: &str) -> String {
    // Slots are guaranteed by QuestionForm::check; fall back to placeholders
    // so diagnostics can render partial forms.
    let wh = form.wh_choice.map_or("what", WhChoice::word);
    let pm = form.part_member_choice.map_or("part", PartMember::word);
    match form.template {
        TemplateId::Property => format!(
            "what is the [{}] of {}{noun}?",
            form.property_word.as_deref().unwrap_or("property"),
            the(form.use_article)
        ),
        TemplateId::Possession => format!("whose {noun}?"),
        TemplateId::Location => format!("where is the {noun}?"),
        TemplateId::Quantity => format!("how {} {noun}?", form.amount_choice.map_or("much", Amount::word)),
        TemplateId::PartMemberOf => format!("what is the {noun} a {pm} of?"),
        TemplateId::HasPartMember => format!("{wh} is a {pm} of {noun}?"),
        TemplateId::Copular => format!("{wh} is {}{noun}?", the(form.use_article)),
        TemplateId::SubSpecification => format!("what kind of {noun}?"),
        TemplateId::Time => format!("when is the {noun}?"),
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn lower_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn normalize_spaces(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Normalizes a question for comparison: strips noun markers, collapses
/// whitespace and lowercases the first letter.
fn normalize_question(q: &str) -> String {
    let stripped = q.replace("<f>", "").replace("</f>", "");
    lower_first(&normalize_spaces(&stripped))
}

/// Every non-Property form; each has a fixed rendering given the noun.
fn fixed_forms() -> Vec<QuestionForm> {
    QuestionForm::slot_grid(&[])
}

/// Parses `question` back into the unique form that renders to it.
pub fn parse_question(question: &str, noun: &str) -> Result<QuestionForm> {
    let noun = normalize_spaces(&noun.replace("<f>", "").replace("</f>", ""));
    let q = normalize_question(question);
    if noun.is_empty() {
        return Err(Error::Usage("noun surface is empty".into()));
    }

    for form in fixed_forms() {
        if render_lower(&form, &noun) == q {
            return Ok(form);
        }
    }
    if let Some(form) = parse_property(&q, &noun) {
        if form.check().is_ok() {
            return Ok(form);
        }
        return Err(Error::UnparseableQuestion {
            question: question.to_string(),
            nearest: Some(TemplateId::Property),
            diagnostic: format!(
                "property descriptor {:?} is not a valid slot filler",
                form.property_word.unwrap_or_default()
            ),
        });
    }

    let (nearest, shared) = nearest_template(&q, &noun);
    Err(Error::UnparseableQuestion {
        question: question.to_string(),
        nearest: Some(nearest),
        diagnostic: format!(
            "no template matches for noun {noun:?}; closest is {nearest} (shares {shared} leading characters)"
        ),
    })
}

fn parse_property(q: &str, noun: &str) -> Option<QuestionForm> {
    let rest = q.strip_prefix("what is the ")?;
    let (with_article, without_article) = (format!(" of the {noun}?"), format!(" of {noun}?"));
    let (descriptor, use_article) = if let Some(d) = rest.strip_suffix(&with_article) {
        (d, true)
    } else {
        (rest.strip_suffix(&without_article)?, false)
    };
    let inner = descriptor
        .strip_prefix('[')
        .and_then(|d| d.strip_suffix(']'))
        .or_else(|| descriptor.strip_prefix('<').and_then(|d| d.strip_suffix('>')))
        .unwrap_or(descriptor)
        .trim();
    if inner.is_empty() {
        return None;
    }
    Some(QuestionForm::property(inner, use_article))
}

fn nearest_template(q: &str, noun: &str) -> (TemplateId, usize) {
    let mut best = (TemplateId::Property, 0);
    let mut candidates = fixed_forms();
    candidates.push(QuestionForm::property("property", true));
    for form in candidates {
        let rendered = render_lower(&form, noun);
        let shared = rendered
            .chars()
            .zip(q.chars())
            .take_while(|(a, b)| a == b)
            .count();
        if shared > best.1 {
            best = (form.template, shared);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_documented_examples() {
        assert_eq!(
            render_question(&QuestionForm::property("year", true), "album").unwrap(),
            "What is the [year] of the album?"
        );
        assert_eq!(render_question(&QuestionForm::possession(), "aunt").unwrap(), "Whose aunt?");
        assert_eq!(
            render_question(
                &QuestionForm::has_part_member(WhChoice::Who, PartMember::Member),
                "committee"
            )
            .unwrap(),
            "Who is a member of committee?"
        );
        assert_eq!(render_question(&QuestionForm::time(), "album").unwrap(), "When is the album?");
        assert_eq!(
            render_question(&QuestionForm::part_member_of(PartMember::Part), "officer").unwrap(),
            "What is the officer a part of?"
        );
        assert_eq!(
            render_question(&QuestionForm::quantity(Amount::Many), "teams").unwrap(),
            "How many teams?"
        );
        assert_eq!(
            render_question(&QuestionForm::copular(WhChoice::Who, false), "chair").unwrap(),
            "Who is chair?"
        );
        assert_eq!(
            render_question(&QuestionForm::sub_specification(), "camp").unwrap(),
            "What kind of camp?"
        );
        assert_eq!(render_question(&QuestionForm::location(), "bridge").unwrap(), "Where is the bridge?");
    }

    #[test]
    fn render_rejects_invalid_form() {
        let mut f = QuestionForm::time();
        f.amount_choice = Some(Amount::Much);
        assert!(matches!(render_question(&f, "album"), Err(Error::InvalidForm(_))));
    }

    #[test]
    fn parses_documented_examples() {
        assert_eq!(parse_question("Whose articles?", "articles").unwrap(), QuestionForm::possession());
        assert_eq!(
            parse_question("What is the [size] of the camp?", "camp").unwrap(),
            QuestionForm::property("size", true)
        );
        let err = parse_question("Where was the album?", "album").unwrap_err();
        match err {
            Error::UnparseableQuestion { nearest, .. } => assert_eq!(nearest, Some(TemplateId::Location)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_tolerates_surface_variation() {
        assert_eq!(
            parse_question("what is the <purpose> of   the camp?", "camp").unwrap(),
            QuestionForm::property("purpose", true)
        );
        assert_eq!(
            parse_question("What is the purpose of camp?", "camp").unwrap(),
            QuestionForm::property("purpose", false)
        );
        assert_eq!(
            parse_question("Whose <f>role</f>?", "role").unwrap(),
            QuestionForm::possession()
        );
        assert_eq!(
            parse_question("  when is the album? ", "album").unwrap(),
            QuestionForm::time()
        );
    }

    #[test]
    fn parse_rejects_wrong_noun_and_bad_descriptor() {
        assert!(parse_question("Whose aunt?", "uncle").is_err());
        assert!(parse_question("What is the [] of the camp?", "camp").is_err());
        assert!(parse_question("What is the [a b c d e] of the camp?", "camp").is_err());
        assert!(parse_question("", "camp").is_err());
    }

    #[test]
    fn noun_phrase_with_article_inside() {
        let f = QuestionForm::property("x", false);
        let q = render_question(&f, "the y").unwrap();
        assert_eq!(parse_question(&q, "the y").unwrap(), f);
    }
}
