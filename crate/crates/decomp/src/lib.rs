//! Sentence decomposition into atomic QA meaning units.
//!
//! Noun QAs come from a QA-Noun parser per detected noun and verb QAs from a
//! verbal parser per sentence. Units with overlapping answers are judged for
//! mutual entailment and merged into clusters, each cluster keeps one
//! representative, and the survivors are judged against the sentence.
//! [`report::decomp_report`] summarises the per-sentence counts.

pub mod error;
pub mod pipeline;
pub mod redundancy;
pub mod report;
pub mod sources;
pub mod stub;
pub mod unit;

pub use error::{DecompError, Result};
pub use pipeline::{decompose, Decomposition, Pipeline, SentenceOutcome};
pub use redundancy::{filter_redundant, FilterOutcome, PairEvidence, PairVerdict, RedundancyCluster};
pub use report::{decomp_report, report_outcomes, DecompReport, ReportConfig, SentenceCounts, SentenceFailure};
pub use sources::{NounQaSource, RedundancyJudge, UnitJudge, VerbUnitSource};
pub use unit::{MeaningUnit, Source, VerbQa};
