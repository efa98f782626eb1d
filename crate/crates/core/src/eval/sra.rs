//! Bookkeeping for human judgments of role soundness on matched arguments.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::matching::MatchResult;
use crate::error::{Error, Result};

/// A predicted QA, addressed by target and its index in the predicted record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QaRef {
    pub sentence_id: String,
    pub token_index: usize,
    pub qa_index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Sound,
    Unsound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SraJudgment {
    pub qa: QaRef,
    pub judge_id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SraReport {
    pub per_judge: BTreeMap<String, BigRational>,
    pub average: BigRational,
}

/// Collects judgments, accepting only those on QAs whose argument matched gold.
#[derive(Debug, Default, Clone)]
pub struct SraLedger {
    matched: HashSet<QaRef>,
    judgments: HashMap<(String, QaRef), Verdict>,
}

impl SraLedger {
    pub fn new(matched: impl IntoIterator<Item = QaRef>) -> Self {
        Self {
            matched: matched.into_iter().collect(),
            judgments: HashMap::new(),
        }
    }

    /// Registers the predicted side of every matched pair for one target.
    pub fn add_matches(&mut self, sentence_id: &str, token_index: usize, result: &MatchResult) {
        for p in &result.pairs {
            self.matched.insert(QaRef {
                sentence_id: sentence_id.to_string(),
                token_index,
                qa_index: p.predicted,
            });
        }
    }

    /// Records a judgment; a later judgment by the same judge on the same
    /// QA replaces the earlier one.
    pub fn record(&mut self, judgment: SraJudgment) -> Result<()> {
        if !self.matched.contains(&judgment.qa) {
            return Err(Error::Usage(format!(
                "judgment by {} on {}:{} qa {} whose argument did not match gold",
                judgment.judge_id, judgment.qa.sentence_id, judgment.qa.token_index, judgment.qa.qa_index
            )));
        }
        self.judgments.insert((judgment.judge_id, judgment.qa), judgment.verdict);
        Ok(())
    }

    pub fn report(&self) -> Result<SraReport> {
        let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for ((judge, _), verdict) in &self.judgments {
            let c = counts.entry(judge.clone()).or_default();
            c.1 += 1;
            if *verdict == Verdict::Sound {
                c.0 += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::Usage("no role judgments recorded".into()));
        }
        let per_judge: BTreeMap<String, BigRational> = counts
            .into_iter()
            .map(|(j, (sound, total))| (j, BigRational::new(BigInt::from(sound), BigInt::from(total))))
            .collect();
        let sum = per_judge.values().fold(BigRational::zero(), |a, b| a + b);
        let average = sum / BigRational::from_integer(BigInt::from(per_judge.len()));
        Ok(SraReport { per_judge, average })
    }
}

/// Per-judge sound proportions and their mean, rejecting any judgment on an
/// unmatched QA.
pub fn sra_report(judgments: &[SraJudgment], matched: impl IntoIterator<Item = QaRef>) -> Result<SraReport> {
    let mut ledger = SraLedger::new(matched);
    for j in judgments {
        ledger.record(j.clone())?;
    }
    ledger.report()
}
