//! Span-alignment evaluation: UA precision/recall/F1, agreement, role
//! soundness bookkeeping and bootstrap intervals.

pub mod bootstrap;
pub mod iaa;
pub mod iou;
pub mod matching;
pub mod report;
pub mod scores;
pub mod sra;

pub use bootstrap::{bootstrap_ci, BootstrapCI, Statistic};
pub use iaa::{iaa, iaa_from_dataset, IaaReport};
pub use iou::{is_match_eligible, token_iou};
pub use matching::{match_arguments, match_arguments_with, MatchResult, MatchStrategy, MatchedPair};
pub use report::{evaluate_corpus, fixed4, ScoreReport};
pub use scores::{ua_scores, AveragingMode, UAScores};
pub use sra::{sra_report, SraJudgment, SraLedger, SraReport, Verdict};
