use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qanoun_core::schema::{NounTagger, NounTarget, Sentence};

use crate::error::Result;
use crate::redundancy::{filter_redundant, FilterOutcome};
use crate::report::SentenceCounts;
use crate::sources::{NounQaSource, RedundancyJudge, UnitJudge, VerbUnitSource};
use crate::unit::{MeaningUnit, Source};

/// Units for one sentence plus notes about QAs that could not be grounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub units: Vec<MeaningUnit>,
    pub ungrounded: Vec<String>,
}

/// Collects noun units for every tagged noun, then verb units, numbering
/// them in that order. Verb answers are grounded at their first exact
/// occurrence; answers absent from the sentence are reported, not kept.
pub fn decompose(
    sentence: &Sentence,
    tagger: &dyn NounTagger,
    nouns: &dyn NounQaSource,
    verbs: &dyn VerbUnitSource,
) -> Result<Decomposition> {
    let mut units = Vec::new();
    let mut ungrounded = Vec::new();
    for idx in tagger.noun_indices(sentence)? {
        let target = NounTarget::new(sentence, idx)?;
        for qa in nouns.noun_qas(sentence, &target)? {
            if sentence.range_text(qa.answer) != Some(qa.answer_text.as_str()) {
                ungrounded.push(format!("noun {idx}: {:?} does not match its span {}", qa.answer_text, qa.answer));
                continue;
            }
            units.push(MeaningUnit::from_noun_qa(units.len(), sentence, &target, &qa)?);
        }
    }
    for qa in verbs.verb_qas(sentence)? {
        let Some(&range) = sentence.find_phrase(&qa.answer).first() else {
            ungrounded.push(format!("verb: {:?} does not occur in the sentence", qa.answer));
            continue;
        };
        units.push(MeaningUnit {
            id: units.len(),
            sentence_id: sentence.id.clone(),
            source: Source::Verb,
            question: qa.question,
            answer: range,
            answer_text: sentence.range_text(range).unwrap_or_default().to_string(),
            predicate: qa.predicate_index,
        });
    }
    Ok(Decomposition { units, ungrounded })
}

/// Everything computed for one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceOutcome {
    pub sentence_id: String,
    pub decomposition: Decomposition,
    pub filter: FilterOutcome,
    /// Ids of kept units the judge accepted.
    pub entailed: Vec<usize>,
    pub judge_failures: usize,
}

impl SentenceOutcome {
    pub fn counts(&self) -> SentenceCounts {
        SentenceCounts {
            sentence_id: self.sentence_id.clone(),
            generated: self.decomposition.units.len(),
            non_redundant: self.filter.kept.len(),
            entailed: self.entailed.len(),
        }
    }
}

/// The configured components of a decomposition run.
#[derive(Clone)]
pub struct Pipeline {
    pub tagger: Arc<dyn NounTagger>,
    pub nouns: Arc<dyn NounQaSource>,
    pub verbs: Arc<dyn VerbUnitSource>,
    pub redundancy: Arc<dyn RedundancyJudge>,
    pub entailment: Arc<dyn UnitJudge>,
    /// Also judge pairs of units from the same source.
    pub within_source: bool,
}

impl Pipeline {
    /// Decomposes, filters and judges one sentence. A unit the judge fails
    /// on counts as not entailed.
    pub fn run_sentence(&self, sentence: &Sentence) -> Result<SentenceOutcome> {
        let decomposition = decompose(sentence, self.tagger.as_ref(), self.nouns.as_ref(), self.verbs.as_ref())?;
        let filter = filter_redundant(sentence, &decomposition.units, self.redundancy.as_ref(), self.within_source)?;
        let mut entailed = Vec::new();
        let mut judge_failures = filter.judge_failures;
        for unit in &filter.kept {
            match self.entailment.entailed(sentence, unit) {
                Ok(true) => entailed.push(unit.id),
                Ok(false) => {}
                Err(e) => {
                    log::warn!("{}: judging unit {} failed: {e}", sentence.id, unit.id);
                    judge_failures += 1;
                }
            }
        }
        Ok(SentenceOutcome {
            sentence_id: sentence.id.clone(),
            decomposition,
            filter,
            entailed,
            judge_failures,
        })
    }

    /// Runs every sentence in parallel. Failures stay with their sentence;
    /// output order follows input order.
    pub fn run(&self, sentences: &[Sentence]) -> Vec<Result<SentenceOutcome>> {
        sentences.par_iter().map(|s| self.run_sentence(s)).collect()
    }
}
