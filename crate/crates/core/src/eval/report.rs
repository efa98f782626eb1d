//! Score reports with values rendered to four decimal places.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::matching::MatchResult;
use super::scores::{match_corpus, ua_scores, AveragingMode, UAScores};
use crate::error::Result;
use crate::schema::dataset::DatasetRecord;
use crate::schema::TokenRange;

/// Rounds half away from zero to four decimals.
pub fn fixed4(x: &BigRational) -> String {
    let scaled = x.abs() * BigRational::from_integer(BigInt::from(10_000));
    let rounded = (scaled + BigRational::new(BigInt::from(1), BigInt::from(2))).floor().to_integer();
    let (int, frac) = rounded.div_rem(&BigInt::from(10_000));
    let sign = if x.is_negative() && rounded != BigInt::from(0) { "-" } else { "" };
    format!("{sign}{int}.{:0>4}", frac.to_string())
}

/// An exact value serialized as a JSON number with four decimals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixed4(pub BigRational);

impl Serialize for Fixed4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(fixed4(&self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl fmt::Display for Fixed4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fixed4(&self.0))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetScore {
    pub sentence_id: String,
    pub token_index: usize,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: Fixed4,
    pub recall: Fixed4,
    pub f1: Fixed4,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScoreReport {
    pub mode: AveragingMode,
    pub precision: Fixed4,
    pub recall: Fixed4,
    pub f1: Fixed4,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_target: Option<Vec<TargetScore>>,
}

impl ScoreReport {
    pub fn new(mode: AveragingMode, scores: &UAScores) -> Self {
        Self {
            mode,
            precision: Fixed4(scores.precision.clone()),
            recall: Fixed4(scores.recall.clone()),
            f1: Fixed4(scores.f1.clone()),
            per_target: None,
        }
    }

    pub fn with_targets(mut self, targets: &[(String, usize, MatchResult)]) -> Self {
        self.per_target = Some(
            targets
                .iter()
                .map(|(sid, ti, m)| {
                    let s = UAScores::from_match(m);
                    TargetScore {
                        sentence_id: sid.clone(),
                        token_index: *ti,
                        tp: m.tp,
                        fp: m.fp,
                        fn_: m.fn_,
                        precision: Fixed4(s.precision),
                        recall: Fixed4(s.recall),
                        f1: Fixed4(s.f1),
                    }
                })
                .collect(),
        );
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for ScoreReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode={} P={} R={} F1={}", self.mode, self.precision, self.recall, self.f1)
    }
}

type TargetKey = (String, usize);

fn final_ranges(records: &[DatasetRecord]) -> BTreeMap<TargetKey, Vec<TokenRange>> {
    let mut out = BTreeMap::new();
    for r in records {
        for t in &r.targets {
            let ranges = t
                .final_record()
                .map(|rec| rec.qas.iter().map(|qa| qa.answer).collect())
                .unwrap_or_default();
            out.insert((r.id.clone(), t.token_index), ranges);
        }
    }
    out
}

/// Scores predicted against gold datasets target by target, using each
/// target's final record. A target present on one side only scores against
/// an empty span list.
pub fn evaluate_corpus(predicted: &[DatasetRecord], gold: &[DatasetRecord], mode: AveragingMode) -> Result<ScoreReport> {
    let pred = final_ranges(predicted);
    let gold = final_ranges(gold);
    let keys: Vec<TargetKey> = gold.keys().chain(pred.keys()).cloned().collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let pairs: Vec<(Vec<TokenRange>, Vec<TokenRange>)> = keys
        .iter()
        .map(|k| (pred.get(k).cloned().unwrap_or_default(), gold.get(k).cloned().unwrap_or_default()))
        .collect();
    let results = match_corpus(&pairs);
    let scores = ua_scores(&results, mode)?;
    let per_target: Vec<(String, usize, MatchResult)> = keys
        .into_iter()
        .zip(results)
        .map(|((s, t), m)| (s, t, m))
        .collect();
    Ok(ScoreReport::new(mode, &scores).with_targets(&per_target))
}
