use std::fmt;

use serde::{Deserialize, Serialize};

use qanoun_core::eval::bootstrap::{DEFAULT_LEVEL, DEFAULT_REPLICATES};
use qanoun_core::eval::{bootstrap_ci, BootstrapCI, Statistic};

use crate::error::{DecompError, Result};
use crate::pipeline::SentenceOutcome;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceCounts {
    pub sentence_id: String,
    pub generated: usize,
    pub non_redundant: usize,
    pub entailed: usize,
}

impl SentenceCounts {
    pub fn is_monotone(&self) -> bool {
        self.entailed <= self.non_redundant && self.non_redundant <= self.generated
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceFailure {
    pub sentence_id: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub replicates: usize,
    pub level: f64,
    pub seed: u64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            level: DEFAULT_LEVEL,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompReport {
    pub sentences: Vec<SentenceCounts>,
    pub failures: Vec<SentenceFailure>,
    pub mean_generated: f64,
    pub mean_non_redundant: f64,
    pub mean_entailed: f64,
    /// Bootstrap interval on the mean entailed count.
    pub entailed_ci: BootstrapCI,
}

fn mean(xs: impl Iterator<Item = usize>, n: usize) -> f64 {
    xs.sum::<usize>() as f64 / n as f64
}

/// Summarises per-sentence counts. Failed sentences are listed but excluded
/// from the means.
pub fn decomp_report(counts: &[SentenceCounts], failures: Vec<SentenceFailure>, config: ReportConfig) -> Result<DecompReport> {
    if let Some(bad) = counts.iter().find(|c| !c.is_monotone()) {
        return Err(DecompError::Config(format!("counts for {} are not monotone: {bad:?}", bad.sentence_id)));
    }
    let n = counts.len();
    let entailed: Vec<f64> = counts.iter().map(|c| c.entailed as f64).collect();
    let entailed_ci = bootstrap_ci(&entailed, Statistic::Mean, config.replicates, config.level, config.seed)?;
    Ok(DecompReport {
        sentences: counts.to_vec(),
        failures,
        mean_generated: mean(counts.iter().map(|c| c.generated), n),
        mean_non_redundant: mean(counts.iter().map(|c| c.non_redundant), n),
        mean_entailed: mean(counts.iter().map(|c| c.entailed), n),
        entailed_ci,
    })
}

/// Splits pipeline results into counts and failures and reports them.
pub fn report_outcomes(
    sentence_ids: &[String],
    outcomes: &[Result<SentenceOutcome>],
    config: ReportConfig,
) -> Result<DecompReport> {
    let mut counts = Vec::new();
    let mut failures = Vec::new();
    for (id, o) in sentence_ids.iter().zip(outcomes) {
        match o {
            Ok(o) => counts.push(o.counts()),
            Err(e) => failures.push(SentenceFailure {
                sentence_id: id.clone(),
                message: e.to_string(),
            }),
        }
    }
    decomp_report(&counts, failures, config)
}

impl DecompReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for DecompReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>10} {:>14} {:>14}", "Sentences", "Generated", "Non-Redundant", "Entailed")?;
        writeln!(
            f,
            "{:<10} {:>10.2} {:>14.2} {:>14}",
            self.sentences.len(),
            self.mean_generated,
            self.mean_non_redundant,
            format!("{:.2} ± {:.2}", self.mean_entailed, self.entailed_ci.half_width())
        )?;
        writeln!(
            f,
            "{:.0}% CI on entailed: [{:.4}, {:.4}] ({} replicates)",
            self.entailed_ci.level * 100.0,
            self.entailed_ci.lower,
            self.entailed_ci.upper,
            self.entailed_ci.replicates
        )?;
        if !self.failures.is_empty() {
            writeln!(f, "failed sentences: {}", self.failures.len())?;
            for fail in &self.failures {
                writeln!(f, "  {}: {}", fail.sentence_id, fail.message)?;
            }
        }
        Ok(())
    }
}
