use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qanoun_core::schema::dataset::{QaEntry, RecordEntry, TargetEntry};
use qanoun_core::schema::{DatasetRecord, Phase, Sentence, Split, TokenSpan};

use crate::error::{Result, ServiceError};
use crate::reconcile::Decision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// One annotator per target, assigned round-robin.
    Single,
    /// Two annotators per target followed by reconciliation.
    Paired,
}

/// A sentence as supplied when creating a project. Tokens default to the
/// built-in tokenizer and targets to the service's noun tagger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceInput {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<TokenSpan>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split: Option<Split>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CreateProject {
    pub id: String,
    pub sentences: Vec<SentenceInput>,
    pub roster: Vec<String>,
    pub policy: Policy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectSentence {
    #[serde(flatten)]
    pub sentence: Sentence,
    pub split: Split,
}

/// One noun to annotate. Targets are numbered by position in the project.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub sentence: usize,
    pub token_index: usize,
    pub surface: String,
    pub assignees: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectSpec {
    pub id: String,
    pub policy: Policy,
    pub roster: Vec<String>,
    pub sentences: Vec<ProjectSentence>,
    pub targets: Vec<TargetSpec>,
    pub created_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordVersion {
    pub version: u32,
    pub qas: Vec<QaEntry>,
    pub submitted_at: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Consolidation {
    pub actor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub co_signer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub decisions: Vec<Decision>,
    pub qas: Vec<QaEntry>,
    pub at: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TargetState {
    /// Version history per annotator, oldest first.
    pub submissions: BTreeMap<String, Vec<RecordVersion>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consolidated: Option<Consolidation>,
}

impl TargetState {
    pub fn current(&self, annotator: &str) -> Option<&RecordVersion> {
        self.submissions.get(annotator).and_then(|v| v.last())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetStatus {
    Pending,
    InProgress,
    AwaitingReconciliation,
    Done,
}

/// Every state change, in log order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Created { spec: ProjectSpec },
    Submitted { target: usize, annotator: String, qas: Vec<QaEntry>, at: String },
    Reconciled { target: usize, consolidation: Consolidation },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoggedEvent {
    pub seq: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectState {
    /// Sequence number of the last applied event.
    pub seq: u64,
    pub spec: ProjectSpec,
    pub targets: Vec<TargetState>,
}

impl ProjectState {
    pub fn new(spec: ProjectSpec) -> Self {
        let targets = vec![TargetState::default(); spec.targets.len()];
        Self { seq: 1, spec, targets }
    }

    pub fn from_event(e: &LoggedEvent) -> Result<Self> {
        match &e.event {
            Event::Created { spec } => Ok(Self { seq: e.seq, ..Self::new(spec.clone()) }),
            _ => Err(ServiceError::Conflict(format!("event {} is not a project creation", e.seq))),
        }
    }

    pub fn target_spec(&self, target: usize) -> Result<&TargetSpec> {
        self.spec
            .targets
            .get(target)
            .ok_or_else(|| ServiceError::NotFound(format!("project {} has no target {target}", self.spec.id)))
    }

    pub fn sentence_of(&self, target: usize) -> Result<&ProjectSentence> {
        Ok(&self.spec.sentences[self.target_spec(target)?.sentence])
    }

    pub fn status(&self, target: usize) -> TargetStatus {
        let spec = &self.spec.targets[target];
        let state = &self.targets[target];
        let submitted = spec.assignees.iter().filter(|a| state.current(a).is_some()).count();
        if state.consolidated.is_some() || (self.spec.policy == Policy::Single && submitted == spec.assignees.len()) {
            TargetStatus::Done
        } else if submitted == spec.assignees.len() {
            TargetStatus::AwaitingReconciliation
        } else if submitted > 0 {
            TargetStatus::InProgress
        } else {
            TargetStatus::Pending
        }
    }

    /// Applies an event that has already been checked.
    pub fn apply(&mut self, e: &LoggedEvent) -> Result<()> {
        if e.seq <= self.seq {
            return Err(ServiceError::Conflict(format!("event {} does not follow {}", e.seq, self.seq)));
        }
        match &e.event {
            Event::Created { .. } => {
                return Err(ServiceError::Conflict(format!("project {} already exists", self.spec.id)));
            }
            Event::Submitted { target, annotator, qas, at } => {
                self.target_spec(*target)?;
                let history = self.targets[*target].submissions.entry(annotator.clone()).or_default();
                history.push(RecordVersion {
                    version: history.len() as u32 + 1,
                    qas: qas.clone(),
                    submitted_at: at.clone(),
                });
            }
            Event::Reconciled { target, consolidation } => {
                self.target_spec(*target)?;
                self.targets[*target].consolidated = Some(consolidation.clone());
            }
        }
        self.seq = e.seq;
        Ok(())
    }

    /// One dataset line per sentence, holding every target that has at
    /// least one record.
    pub fn to_dataset(&self) -> Vec<DatasetRecord> {
        let mut out: Vec<DatasetRecord> = self
            .spec
            .sentences
            .iter()
            .map(|ps| DatasetRecord {
                id: ps.sentence.id.clone(),
                text: ps.sentence.text.clone(),
                tokens: ps.sentence.tokens.clone(),
                split: ps.split,
                targets: Vec::new(),
                extra: Default::default(),
            })
            .collect();
        for (t, spec) in self.spec.targets.iter().enumerate() {
            let state = &self.targets[t];
            let mut records: Vec<RecordEntry> = spec
                .assignees
                .iter()
                .filter_map(|a| {
                    state.current(a).map(|v| RecordEntry {
                        annotator: a.clone(),
                        phase: Phase::Independent,
                        qas: v.qas.clone(),
                        extra: Default::default(),
                    })
                })
                .collect();
            if let Some(c) = &state.consolidated {
                records.push(RecordEntry {
                    annotator: c.actor.clone(),
                    phase: Phase::Consolidated,
                    qas: c.qas.clone(),
                    extra: Default::default(),
                });
            }
            if !records.is_empty() {
                out[spec.sentence].targets.push(TargetEntry {
                    token_index: spec.token_index,
                    records,
                    extra: Default::default(),
                });
            }
        }
        out
    }
}
