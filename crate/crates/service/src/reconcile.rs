use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qanoun_core::schema::dataset::QaEntry;
use qanoun_core::schema::QAPair;

use crate::disagree::{align, Disagreement, DisagreementKind};
use crate::error::{Result, ServiceError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    /// Adopt the left annotator's view; for a right-only argument this drops it.
    KeepLeft,
    /// Adopt the right annotator's view; for a left-only argument this drops it.
    KeepRight,
    /// Replace the disputed QA with a new one.
    Edit { qa: QaEntry },
    /// Add an argument neither annotator found. Takes no disagreement.
    Add { qa: QaEntry },
    Drop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disagreement: Option<usize>,
    #[serde(flatten)]
    pub action: Action,
}

impl Decision {
    pub fn on(disagreement: usize, action: Action) -> Self {
        Self { disagreement: Some(disagreement), action }
    }

    pub fn add(qa: QaEntry) -> Self {
        Self { disagreement: None, action: Action::Add { qa } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconcileRequest {
    pub decisions: Vec<Decision>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co_signer: Option<String>,
    /// Free-text record of remaining dissent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn bad(msg: String) -> ServiceError {
    ServiceError::BadRequest(msg)
}

/// Orders consolidated QAs by answer span, then template and question.
pub fn canonical_order(qas: &mut [QaEntry]) {
    qas.sort_by(|a, b| {
        (a.answer.first, a.answer.last, a.template.number(), &a.question).cmp(&(
            b.answer.first,
            b.answer.last,
            b.template.number(),
            &b.question,
        ))
    });
}

/// Applies decisions to two records and returns the consolidated QA list in
/// canonical order. `noun` is the target's surface form, used to regenerate
/// questions for pairs whose form and span come from different sides.
pub fn apply_decisions(
    left: &[QaEntry],
    right: &[QaEntry],
    disagreements: &[Disagreement],
    decisions: &[Decision],
    noun: &str,
) -> Result<Vec<QaEntry>> {
    let mut by_id: BTreeMap<usize, &Action> = BTreeMap::new();
    let mut added = Vec::new();
    for d in decisions {
        match (d.disagreement, &d.action) {
            (None, Action::Add { qa }) => added.push(qa.clone()),
            (None, _) => return Err(bad("only add decisions may omit the disagreement".into())),
            (Some(id), Action::Add { .. }) => return Err(bad(format!("add decision must not name disagreement {id}"))),
            (Some(id), action) => {
                if id >= disagreements.len() {
                    return Err(bad(format!("no disagreement {id}")));
                }
                if by_id.insert(id, action).is_some() {
                    return Err(bad(format!("disagreement {id} has more than one decision")));
                }
            }
        }
    }
    let missing: Vec<String> = (0..disagreements.len())
        .filter(|id| !by_id.contains_key(id))
        .map(|id| id.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(bad(format!("disagreements without a decision: {}", missing.join(", "))));
    }

    let mut out = Vec::new();
    let al = align(left, right);
    for &(i, j) in &al.matched {
        let entries: Vec<&Disagreement> = disagreements
            .iter()
            .filter(|d| d.left.as_ref().map(|r| r.index) == Some(i) && d.right.as_ref().map(|r| r.index) == Some(j))
            .collect();
        if entries.is_empty() {
            out.push(left[i].clone());
            continue;
        }
        let actions: Vec<(DisagreementKind, &Action)> = entries.iter().map(|d| (d.kind, by_id[&d.id])).collect();
        if actions.iter().any(|(_, a)| matches!(a, Action::Drop)) {
            continue;
        }
        let edits: Vec<&QaEntry> = actions
            .iter()
            .filter_map(|(_, a)| if let Action::Edit { qa } = a { Some(qa) } else { None })
            .collect();
        match edits.as_slice() {
            [] => {}
            [qa] => {
                out.push((*qa).clone());
                continue;
            }
            [a, rest @ ..] => {
                if rest.iter().all(|b| b == a) {
                    out.push((*a).clone());
                    continue;
                }
                return Err(bad(format!("conflicting edits for left QA {i} and right QA {j}")));
            }
        }
        let side = |kind: DisagreementKind| {
            actions
                .iter()
                .find(|(k, _)| *k == kind)
                .map(|(_, a)| matches!(a, Action::KeepRight))
                .unwrap_or(false)
        };
        let form_source = if side(DisagreementKind::Role) { &right[j] } else { &left[i] };
        let span_source = if side(DisagreementKind::Extent) { &right[j] } else { &left[i] };
        if std::ptr::eq(form_source, span_source) {
            out.push(form_source.clone());
        } else {
            let pair = QAPair {
                form: form_source.form(),
                answer: span_source.answer,
                answer_text: span_source.answer_text.clone(),
            };
            out.push(QaEntry::from_pair(&pair, noun));
        }
    }
    for d in disagreements.iter().filter(|d| d.kind == DisagreementKind::Coverage) {
        match (by_id[&d.id], &d.left, &d.right) {
            (Action::KeepLeft, Some(l), None) => out.push(l.qa.clone()),
            (Action::KeepRight, None, Some(r)) => out.push(r.qa.clone()),
            (Action::Edit { qa }, _, _) => out.push(qa.clone()),
            _ => {}
        }
    }
    out.extend(added);
    canonical_order(&mut out);
    Ok(out)
}
