use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::dataset::{DatasetRecord, Split};
use super::template::TemplateId;
use crate::error::{Error, Result};
use crate::reference;

/// Corpus totals and the per-template argument histogram.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub sentences: usize,
    pub predicates: usize,
    pub arguments: usize,
    /// Argument count per template number, all nine always present.
    pub per_template: BTreeMap<u8, usize>,
    pub per_split: BTreeMap<String, usize>,
    /// Targets with several independent records and no consolidated one;
    /// their arguments are not counted.
    pub unresolved_targets: usize,
}

impl DatasetStats {
    pub fn template_count(&self, t: TemplateId) -> usize {
        self.per_template.get(&t.number()).copied().unwrap_or(0)
    }

    pub fn template_sum(&self) -> usize {
        self.per_template.values().sum()
    }
}

/// Counts sentences, targets and final-record arguments per template.
pub fn dataset_stats(records: &[DatasetRecord]) -> Result<DatasetStats> {
    let mut stats = DatasetStats {
        sentences: 0,
        predicates: 0,
        arguments: 0,
        per_template: TemplateId::ALL.iter().map(|t| (t.number(), 0)).collect(),
        per_split: [Split::Train, Split::Dev, Split::Test]
            .iter()
            .map(|s| (s.to_string(), 0))
            .collect(),
        unresolved_targets: 0,
    };
    for (line, record) in records.iter().enumerate() {
        let malformed = |message: String| Error::Ingestion {
            line: line + 1,
            record_id: Some(record.id.clone()),
            message,
        };
        stats.sentences += 1;
        *stats.per_split.entry(record.split.to_string()).or_default() += 1;
        for target in &record.targets {
            if target.token_index >= record.tokens.len() {
                return Err(malformed(format!(
                    "target token {} outside {} tokens",
                    target.token_index,
                    record.tokens.len()
                )));
            }
            stats.predicates += 1;
            match target.final_record() {
                Some(final_record) => {
                    for qa in &final_record.qas {
                        stats.arguments += 1;
                        *stats.per_template.entry(qa.template.number()).or_default() += 1;
                    }
                }
                None if target.records.is_empty() => {}
                None => stats.unresolved_targets += 1,
            }
        }
    }
    Ok(stats)
}

/// A difference between computed statistics and the published figures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PublishedDiscrepancy {
    pub quantity: String,
    pub published: usize,
    pub computed: usize,
}

/// Compares against the published dataset figures. The published template
/// table sums to a different total than the published argument count; that
/// inconsistency is always reported as its own entry.
pub fn compare_with_published(stats: &DatasetStats) -> Vec<PublishedDiscrepancy> {
    let mut out = Vec::new();
    let mut check = |quantity: &str, published: usize, computed: usize| {
        if published != computed {
            out.push(PublishedDiscrepancy {
                quantity: quantity.to_string(),
                published,
                computed,
            });
        }
    };
    check("sentences", reference::DATASET_SENTENCES, stats.sentences);
    check("predicates", reference::DATASET_PREDICATES, stats.predicates);
    check("arguments", reference::DATASET_ARGUMENTS, stats.arguments);
    for (t, published) in TemplateId::ALL.iter().zip(reference::TEMPLATE_TABLE) {
        check(&format!("template {}", t.name()), published, stats.template_count(*t));
    }
    let table_sum: usize = reference::TEMPLATE_TABLE.iter().sum();
    out.push(PublishedDiscrepancy {
        quantity: "published template table sum vs published argument total".to_string(),
        published: reference::DATASET_ARGUMENTS,
        computed: table_sum,
    });
    out
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = TemplateId::ALL.iter().map(|t| t.name()).collect();
        let widths: Vec<usize> = names.iter().map(|n| n.len().max(6)).collect();
        write!(f, "{:<7}", "")?;
        for (n, w) in names.iter().zip(&widths) {
            write!(f, " {n:>w$}")?;
        }
        writeln!(f)?;
        write!(f, "{:<7}", "Total")?;
        for (t, w) in TemplateId::ALL.iter().zip(&widths) {
            write!(f, " {:>w$}", self.template_count(*t))?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "sentences: {}  predicates: {}  arguments: {}",
            self.sentences, self.predicates, self.arguments
        )?;
        let splits: Vec<String> = self.per_split.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "splits: {}", splits.join(" "))?;
        if self.unresolved_targets > 0 {
            write!(f, "\nunresolved targets (no consolidated record): {}", self.unresolved_targets)?;
        }
        Ok(())
    }
}
