use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use qanoun_core::eval::is_match_eligible;
use qanoun_core::schema::Sentence;

use crate::error::{DecompError, Result};
use crate::sources::RedundancyJudge;
use crate::unit::{MeaningUnit, Source};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict", content = "detail")]
pub enum PairVerdict {
    Equivalent,
    Distinct,
    /// The judge failed; the pair is treated as distinct.
    JudgeError(String),
}

/// A candidate pair that passed the overlap pre-filter, with its verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvidence {
    pub a: usize,
    pub b: usize,
    #[serde(flatten)]
    pub verdict: PairVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RedundancyCluster {
    /// Unit ids, ascending.
    pub members: Vec<usize>,
    pub representative: usize,
    /// Judged pairs inside this cluster.
    pub evidence: Vec<PairEvidence>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterOutcome {
    /// Ordered by smallest member id; together they partition the units.
    pub clusters: Vec<RedundancyCluster>,
    /// Representatives in id order.
    pub kept: Vec<MeaningUnit>,
    pub judge_failures: usize,
}

/// Whether a pair goes to the judge: answers overlap with IoU above one
/// half, and the units come from different sources unless `within_source`.
pub fn is_candidate(a: &MeaningUnit, b: &MeaningUnit, within_source: bool) -> bool {
    (within_source || a.source != b.source) && is_match_eligible(a.answer, b.answer)
}

/// Clusters mutually entailing units and keeps one per cluster, preferring a
/// noun-sourced representative, then the lowest id. Unit ids must be
/// `0..units.len()` in order.
pub fn filter_redundant(
    sentence: &Sentence,
    units: &[MeaningUnit],
    judge: &dyn RedundancyJudge,
    within_source: bool,
) -> Result<FilterOutcome> {
    if let Some(u) = units.iter().enumerate().find(|(i, u)| u.id != *i || u.sentence_id != sentence.id) {
        return Err(DecompError::Config(format!(
            "unit {} ({}) is out of place for sentence {}",
            u.0, u.1.sentence_id, sentence.id
        )));
    }
    let mut uf = UnionFind::<usize>::new(units.len());
    let mut evidence = Vec::new();
    let mut judge_failures = 0;
    for (i, a) in units.iter().enumerate() {
        for b in &units[i + 1..] {
            if !is_candidate(a, b, within_source) {
                continue;
            }
            let verdict = match judge.equivalent(sentence, a, b) {
                Ok(true) => {
                    uf.union(a.id, b.id);
                    PairVerdict::Equivalent
                }
                Ok(false) => PairVerdict::Distinct,
                Err(e) => {
                    log::warn!("{}: judging units {} and {} failed: {e}", sentence.id, a.id, b.id);
                    judge_failures += 1;
                    PairVerdict::JudgeError(e.to_string())
                }
            };
            evidence.push(PairEvidence { a: a.id, b: b.id, verdict });
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for u in units {
        groups.entry(uf.find(u.id)).or_default().push(u.id);
    }
    let mut clusters: Vec<RedundancyCluster> = groups
        .into_values()
        .map(|members| {
            let representative = members
                .iter()
                .copied()
                .find(|&m| units[m].source == Source::Noun)
                .unwrap_or(members[0]);
            let evidence = evidence
                .iter()
                .filter(|e| members.binary_search(&e.a).is_ok() && members.binary_search(&e.b).is_ok())
                .cloned()
                .collect();
            RedundancyCluster { members, representative, evidence }
        })
        .collect();
    clusters.sort_by_key(|c| c.members[0]);
    let mut kept: Vec<MeaningUnit> = clusters.iter().map(|c| units[c.representative].clone()).collect();
    kept.sort_by_key(|u| u.id);
    Ok(FilterOutcome { clusters, kept, judge_failures })
}
