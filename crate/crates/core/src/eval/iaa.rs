use serde::Serialize;

use super::matching::{match_arguments, MatchResult};
use super::scores::{ua_scores, AveragingMode, UAScores};
use crate::error::{Error, Result};
use crate::schema::dataset::DatasetRecord;
use crate::schema::{AnnotationRecord, Phase, TokenRange};

/// Per-target agreement between two annotation records.
#[derive(Debug, Clone, Serialize)]
pub struct TargetAgreement {
    pub sentence_id: String,
    pub token_index: usize,
    pub result: MatchResult,
}

#[derive(Debug, Clone)]
pub struct IaaReport {
    pub scores: UAScores,
    pub targets: Vec<TargetAgreement>,
}

/// Macro-averaged UA agreement over targets that each carry exactly two
/// records. One record plays "predicted" and the other "gold"; F1 does not
/// depend on which.
pub fn iaa(groups: &[Vec<AnnotationRecord>]) -> Result<IaaReport> {
    let mut targets = Vec::with_capacity(groups.len());
    for group in groups {
        let [left, right] = group.as_slice() else {
            let t = group.first().map(|r| format!("{}:{}", r.target.sentence_id, r.target.token_index));
            return Err(Error::Usage(format!(
                "agreement needs exactly two records per target, target {} has {}",
                t.unwrap_or_default(),
                group.len()
            )));
        };
        targets.push(TargetAgreement {
            sentence_id: left.target.sentence_id.clone(),
            token_index: left.target.token_index,
            result: match_arguments(&left.answer_ranges(), &right.answer_ranges()),
        });
    }
    let results: Vec<MatchResult> = targets.iter().map(|t| t.result.clone()).collect();
    let scores = ua_scores(&results, AveragingMode::Macro)?;
    Ok(IaaReport { scores, targets })
}

/// Agreement over the consolidated records in a dataset. Every target that
/// has consolidated records must have exactly two.
pub fn iaa_from_dataset(records: &[DatasetRecord]) -> Result<IaaReport> {
    let mut groups = Vec::new();
    for record in records {
        let sentence = record.sentence_unchecked();
        for target in &record.targets {
            let consolidated: Vec<AnnotationRecord> = target
                .records
                .iter()
                .filter(|r| r.phase == Phase::Consolidated)
                .map(|r| record.to_annotation_record(&sentence, target, r))
                .collect();
            if !consolidated.is_empty() {
                groups.push(consolidated);
            }
        }
    }
    iaa(&groups)
}

/// Convenience for span lists that are already paired.
pub fn iaa_ranges(pairs: &[(Vec<TokenRange>, Vec<TokenRange>)]) -> Result<UAScores> {
    let results: Vec<MatchResult> = pairs.iter().map(|(a, b)| match_arguments(a, b)).collect();
    ua_scores(&results, AveragingMode::Macro)
}
