//! Scripted components for offline runs and tests.
//!
//! A [`Script`] lists, per sentence, the noun QAs each tagged noun yields,
//! the verb QAs, which question pairs the redundancy judge calls
//! equivalent or fails on, and which questions the entailment judge
//! rejects. Questions identify units, so they must be unique per sentence.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use qanoun_core::schema::tagger::FixedTagger;
use qanoun_core::schema::{parse_question, NounTarget, QAPair, Sentence};

use crate::error::{DecompError, Result};
use crate::pipeline::Pipeline;
use crate::sources::{NounQaSource, RedundancyJudge, UnitJudge, VerbUnitSource};
use crate::unit::{MeaningUnit, VerbQa};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedQa {
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedSentence {
    pub id: String,
    pub text: String,
    /// Noun token index to the QAs produced for it. Every key is tagged.
    #[serde(default)]
    pub nouns: BTreeMap<usize, Vec<ScriptedQa>>,
    #[serde(default)]
    pub verbs: Vec<VerbQa>,
    #[serde(default)]
    pub equivalent: Vec<[String; 2]>,
    #[serde(default)]
    pub judge_errors: Vec<[String; 2]>,
    #[serde(default)]
    pub not_entailed: Vec<String>,
    /// Make both unit sources fail for this sentence.
    #[serde(default)]
    pub source_down: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Script {
    pub sentences: Vec<ScriptedSentence>,
}

impl Script {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn sentences(&self) -> Vec<Sentence> {
        self.sentences.iter().map(|s| Sentence::tokenize(s.id.clone(), s.text.clone())).collect()
    }

    pub fn pipeline(&self) -> Pipeline {
        let inner = Arc::new(Indexed::new(self));
        let nouns: HashMap<String, Vec<usize>> = self
            .sentences
            .iter()
            .map(|s| (s.id.clone(), s.nouns.keys().copied().collect()))
            .collect();
        Pipeline {
            tagger: Arc::new(FixedTagger::new(nouns)),
            nouns: Arc::new(ScriptNouns(inner.clone())),
            verbs: Arc::new(ScriptVerbs(inner.clone())),
            redundancy: Arc::new(ScriptRedundancy(inner.clone())),
            entailment: Arc::new(ScriptEntailment(inner)),
            within_source: false,
        }
    }
}

type Pair = (String, String);

fn pair(a: &str, b: &str) -> Pair {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

struct Entry {
    sentence: ScriptedSentence,
    equivalent: HashSet<Pair>,
    errors: HashSet<Pair>,
    rejected: HashSet<String>,
}

struct Indexed(HashMap<String, Entry>);

impl Indexed {
    fn new(script: &Script) -> Self {
        Self(
            script
                .sentences
                .iter()
                .map(|s| {
                    let entry = Entry {
                        sentence: s.clone(),
                        equivalent: s.equivalent.iter().map(|[a, b]| pair(a, b)).collect(),
                        errors: s.judge_errors.iter().map(|[a, b]| pair(a, b)).collect(),
                        rejected: s.not_entailed.iter().cloned().collect(),
                    };
                    (s.id.clone(), entry)
                })
                .collect(),
        )
    }

    fn get(&self, id: &str) -> Result<&Entry> {
        self.0
            .get(id)
            .ok_or_else(|| DecompError::Config(format!("sentence {id} is not in the script")))
    }

    fn live(&self, id: &str) -> Result<&Entry> {
        let e = self.get(id)?;
        if e.sentence.source_down {
            return Err(DecompError::Source(format!("scripted outage for {id}")));
        }
        Ok(e)
    }
}

struct ScriptNouns(Arc<Indexed>);
struct ScriptVerbs(Arc<Indexed>);
struct ScriptRedundancy(Arc<Indexed>);
struct ScriptEntailment(Arc<Indexed>);

impl NounQaSource for ScriptNouns {
    fn noun_qas(&self, sentence: &Sentence, target: &NounTarget) -> Result<Vec<QAPair>> {
        let entry = self.0.live(&sentence.id)?;
        let Some(qas) = entry.sentence.nouns.get(&target.token_index) else {
            return Ok(Vec::new());
        };
        qas.iter()
            .map(|qa| {
                let form = parse_question(&qa.question, &target.surface)?;
                let range = *sentence.find_phrase(&qa.answer).first().ok_or_else(|| {
                    DecompError::Config(format!("{}: scripted answer {:?} not in sentence", sentence.id, qa.answer))
                })?;
                Ok(QAPair::from_range(sentence, form, range)?)
            })
            .collect()
    }
}

impl VerbUnitSource for ScriptVerbs {
    fn verb_qas(&self, sentence: &Sentence) -> Result<Vec<VerbQa>> {
        Ok(self.0.live(&sentence.id)?.sentence.verbs.clone())
    }
}

impl RedundancyJudge for ScriptRedundancy {
    fn equivalent(&self, sentence: &Sentence, a: &MeaningUnit, b: &MeaningUnit) -> Result<bool> {
        let entry = self.0.get(&sentence.id)?;
        let key = pair(&a.question, &b.question);
        if entry.errors.contains(&key) {
            return Err(DecompError::Source(format!("scripted judge failure on {key:?}")));
        }
        Ok(entry.equivalent.contains(&key))
    }
}

impl UnitJudge for ScriptEntailment {
    fn entailed(&self, sentence: &Sentence, unit: &MeaningUnit) -> Result<bool> {
        Ok(!self.0.get(&sentence.id)?.rejected.contains(&unit.question))
    }
}
