use serde::{Deserialize, Serialize};

use qanoun_core::eval::match_arguments;
use qanoun_core::schema::dataset::QaEntry;
use qanoun_core::schema::TokenRange;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DisagreementKind {
    /// Matched spans with different question forms.
    Role,
    /// Matched spans with different boundaries.
    Extent,
    /// An argument only one side found.
    Coverage,
}

/// A QA from one annotator's current record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaRef {
    pub annotator: String,
    /// Position in that annotator's record.
    pub index: usize,
    pub qa: QaEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub id: usize,
    pub kind: DisagreementKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<QaRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<QaRef>,
}

/// Aligned positions of two records: matched index pairs plus the
/// unmatched indices on each side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub matched: Vec<(usize, usize)>,
    pub left_only: Vec<usize>,
    pub right_only: Vec<usize>,
}

fn sort_key(qas: &[QaEntry]) -> Vec<(usize, usize, u8, &str)> {
    let mut k: Vec<_> = qas
        .iter()
        .map(|q| (q.answer.first, q.answer.last, q.template.number(), q.question.as_str()))
        .collect();
    k.sort();
    k
}

/// Aligns two QA lists by maximum-weight span matching. The matching is
/// always computed in one canonical orientation so that swapping the inputs
/// swaps the result.
pub fn align(left: &[QaEntry], right: &[QaEntry]) -> Alignment {
    let flip = sort_key(left) > sort_key(right);
    let (a, b) = if flip { (right, left) } else { (left, right) };
    let ranges = |qas: &[QaEntry]| qas.iter().map(|q| q.answer).collect::<Vec<TokenRange>>();
    let m = match_arguments(&ranges(a), &ranges(b));
    let mut matched: Vec<(usize, usize)> = m
        .pairs
        .iter()
        .map(|p| if flip { (p.gold, p.predicted) } else { (p.predicted, p.gold) })
        .collect();
    matched.sort();
    let left_only = (0..left.len()).filter(|i| !matched.iter().any(|m| m.0 == *i)).collect();
    let right_only = (0..right.len()).filter(|j| !matched.iter().any(|m| m.1 == *j)).collect();
    Alignment { matched, left_only, right_only }
}

/// Whether two entries ask the same question in the same way.
pub fn same_form(a: &QaEntry, b: &QaEntry) -> bool {
    a.form() == b.form()
}

/// Disagreements between two annotators' records. A matched pair that
/// differs in both form and boundaries yields a role and an extent entry.
pub fn compute_disagreements(left_id: &str, left: &[QaEntry], right_id: &str, right: &[QaEntry]) -> Vec<Disagreement> {
    let r = |annotator: &str, qas: &[QaEntry], index: usize| QaRef {
        annotator: annotator.to_string(),
        index,
        qa: qas[index].clone(),
    };
    let al = align(left, right);
    let mut out = Vec::new();
    let mut push = |kind, l: Option<usize>, rr: Option<usize>| {
        out.push(Disagreement {
            id: out.len(),
            kind,
            left: l.map(|i| r(left_id, left, i)),
            right: rr.map(|j| r(right_id, right, j)),
        })
    };
    for &(i, j) in &al.matched {
        if !same_form(&left[i], &right[j]) {
            push(DisagreementKind::Role, Some(i), Some(j));
        }
        if left[i].answer != right[j].answer {
            push(DisagreementKind::Extent, Some(i), Some(j));
        }
    }
    for &i in &al.left_only {
        push(DisagreementKind::Coverage, Some(i), None);
    }
    for &j in &al.right_only {
        push(DisagreementKind::Coverage, None, Some(j));
    }
    out
}
