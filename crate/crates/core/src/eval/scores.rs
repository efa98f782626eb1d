use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matching::{match_arguments, MatchResult};
use crate::error::{Error, Result};
use crate::schema::TokenRange;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AveragingMode {
    /// Pool tp/fp/fn over all targets, then compute the ratios.
    Micro,
    /// Average per-target precision, recall and F1.
    Macro,
}

impl std::fmt::Display for AveragingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AveragingMode::Micro => "micro",
            AveragingMode::Macro => "macro",
        })
    }
}

impl std::str::FromStr for AveragingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "micro" => Ok(Self::Micro),
            "macro" => Ok(Self::Macro),
            other => Err(format!("unknown averaging mode {other:?}")),
        }
    }
}

/// Unlabeled argument precision, recall and F1 as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UAScores {
    pub precision: BigRational,
    pub recall: BigRational,
    pub f1: BigRational,
}

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl UAScores {
    /// Scores from counts. When nothing is predicted precision is 1; when
    /// there is no gold recall is 1; so two empty sides score 1/1/1.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Self {
        let precision = if tp + fp == 0 { BigRational::one() } else { ratio(tp, tp + fp) };
        let recall = if tp + fn_ == 0 { BigRational::one() } else { ratio(tp, tp + fn_) };
        let sum = &precision + &recall;
        let f1 = if sum.is_zero() {
            BigRational::zero()
        } else {
            BigRational::from_integer(BigInt::from(2)) * &precision * &recall / sum
        };
        Self { precision, recall, f1 }
    }

    pub fn from_match(m: &MatchResult) -> Self {
        Self::from_counts(m.tp, m.fp, m.fn_)
    }

    pub fn precision_f64(&self) -> f64 {
        self.precision.to_f64().unwrap_or(f64::NAN)
    }

    pub fn recall_f64(&self) -> f64 {
        self.recall.to_f64().unwrap_or(f64::NAN)
    }

    pub fn f1_f64(&self) -> f64 {
        self.f1.to_f64().unwrap_or(f64::NAN)
    }
}

/// Aggregates per-target match results.
pub fn ua_scores(results: &[MatchResult], mode: AveragingMode) -> Result<UAScores> {
    if results.is_empty() {
        return Err(Error::Usage("cannot score an empty list of match results".into()));
    }
    match mode {
        AveragingMode::Micro => {
            let (tp, fp, fn_) = results
                .iter()
                .fold((0, 0, 0), |(a, b, c), m| (a + m.tp, b + m.fp, c + m.fn_));
            Ok(UAScores::from_counts(tp, fp, fn_))
        }
        AveragingMode::Macro => {
            let n = BigRational::from_integer(BigInt::from(results.len()));
            let mut p = BigRational::zero();
            let mut r = BigRational::zero();
            let mut f = BigRational::zero();
            for s in results.iter().map(UAScores::from_match) {
                p += s.precision;
                r += s.recall;
                f += s.f1;
            }
            Ok(UAScores {
                precision: p / &n,
                recall: r / &n,
                f1: f / n,
            })
        }
    }
}

/// Matches every target's predicted spans against its gold spans. Targets
/// are independent; results keep input order.
pub fn match_corpus(targets: &[(Vec<TokenRange>, Vec<TokenRange>)]) -> Vec<MatchResult> {
    targets
        .par_iter()
        .map(|(pred, gold)| match_arguments(pred, gold))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn worked_counts() {
        let s = ua_scores(&[MatchResult::from_counts(1, 1, 2)], AveragingMode::Micro).unwrap();
        assert_eq!(s.precision, q(1, 2));
        assert_eq!(s.recall, q(1, 3));
        assert_eq!(s.f1, q(2, 5));
    }

    #[test]
    fn macro_mean_of_f1() {
        // per-target F1 1 and 2/5
        let results = [MatchResult::from_counts(2, 0, 0), MatchResult::from_counts(1, 1, 2)];
        let s = ua_scores(&results, AveragingMode::Macro).unwrap();
        assert_eq!(s.f1, q(7, 10));
        let micro = ua_scores(&results, AveragingMode::Micro).unwrap();
        assert_eq!(micro.precision, q(3, 4));
        assert_eq!(micro.recall, q(3, 5));
    }

    #[test]
    fn zero_denominator_conventions() {
        let both = UAScores::from_counts(0, 0, 0);
        assert_eq!((both.precision.clone(), both.recall.clone(), both.f1.clone()), (q(1, 1), q(1, 1), q(1, 1)));
        let no_pred = UAScores::from_counts(0, 0, 3);
        assert_eq!((no_pred.precision, no_pred.recall, no_pred.f1), (q(1, 1), q(0, 1), q(0, 1)));
        let no_gold = UAScores::from_counts(0, 2, 0);
        assert_eq!((no_gold.precision, no_gold.recall, no_gold.f1), (q(0, 1), q(1, 1), q(0, 1)));
    }

    #[test]
    fn empty_input_is_usage_error() {
        assert!(matches!(ua_scores(&[], AveragingMode::Micro), Err(Error::Usage(_))));
    }
}
