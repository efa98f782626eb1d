use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};

use qanoun_core::eval::report::ScoreReport;
use qanoun_core::eval::{iaa, AveragingMode};
use qanoun_core::schema::dataset::{dataset_to_string, DatasetViolation, QaEntry, RecordEntry, TargetEntry};
use qanoun_core::schema::{AnnotationRecord, DatasetRecord, NounTagger, NounTarget, Phase, Sentence, Split};

use crate::disagree::{compute_disagreements, Disagreement};
use crate::error::{Result, ServiceError};
use crate::model::{
    Consolidation, CreateProject, Event, Policy, ProjectSentence, ProjectSpec, ProjectState, TargetSpec, TargetStatus,
};
use crate::reconcile::{apply_decisions, ReconcileRequest};
use crate::store::{ProjectStore, DEFAULT_SNAPSHOT_EVERY, LOG_FILE};

/// Source of event timestamps.
pub type Clock = Arc<dyn Fn() -> String + Send + Sync>;

pub fn system_clock() -> Clock {
    Arc::new(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true))
}

struct ProjectHandle {
    store: Mutex<ProjectStore>,
    current: RwLock<Arc<ProjectState>>,
}

impl ProjectHandle {
    fn new(store: ProjectStore) -> Self {
        let current = RwLock::new(Arc::new(store.state().clone()));
        Self { store: Mutex::new(store), current }
    }

    fn read(&self) -> Arc<ProjectState> {
        self.current.read().clone()
    }

    /// Serialises writers on this project. `f` sees the latest state and
    /// returns the event to append, or `None` to change nothing.
    fn write<T>(&self, f: impl FnOnce(&ProjectState) -> Result<(Option<Event>, T)>) -> Result<T> {
        let mut store = self.store.lock();
        let (event, out) = f(store.state())?;
        if let Some(event) = event {
            let state = store.append(event)?.clone();
            *self.current.write() = Arc::new(state);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SubmitOutcome {
    Accepted { version: u32 },
    Rejected { violations: Vec<DatasetViolation> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ReconcileOutcome {
    Consolidated { qas: Vec<QaEntry> },
    Rejected { violations: Vec<DatasetViolation> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetView {
    pub target: usize,
    pub sentence_id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub token_index: usize,
    pub surface: String,
    pub marked_text: String,
    pub assignees: Vec<String>,
    pub status: TargetStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectView {
    pub id: String,
    pub policy: Policy,
    pub roster: Vec<String>,
    pub sentences: usize,
    pub targets: Vec<TargetSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSummary {
    pub target: usize,
    pub sentence_id: String,
    pub token_index: usize,
    pub surface: String,
    pub assignees: Vec<String>,
    pub status: TargetStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentRecord {
    pub annotator: String,
    pub version: u32,
    pub history: usize,
    pub qas: Vec<QaEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExportBundle {
    pub project: String,
    pub partial: bool,
    pub targets_total: usize,
    pub targets_done: usize,
    /// Dataset lines, one JSON object per sentence.
    pub dataset: String,
    /// Macro agreement between the two independent records of paired targets.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iaa: Option<ScoreReport>,
}

fn valid_project_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 128 && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Validates a record the way the dataset validator would.
fn check_record(sentence: &Sentence, token_index: usize, annotator: &str, phase: Phase, qas: &[QaEntry]) -> Vec<DatasetViolation> {
    let line = DatasetRecord {
        id: sentence.id.clone(),
        text: sentence.text.clone(),
        tokens: sentence.tokens.clone(),
        split: Split::Train,
        targets: vec![TargetEntry {
            token_index,
            records: vec![RecordEntry {
                annotator: annotator.to_string(),
                phase,
                qas: qas.to_vec(),
                extra: Default::default(),
            }],
            extra: Default::default(),
        }],
        extra: Default::default(),
    };
    line.validate(None)
}

/// Annotation projects stored under one data directory.
pub struct Service {
    root: PathBuf,
    tagger: Arc<dyn NounTagger>,
    clock: Clock,
    snapshot_every: usize,
    projects: RwLock<HashMap<String, Arc<ProjectHandle>>>,
    creating: Mutex<()>,
}

impl Service {
    /// Opens every project found under `root`, creating the directory if needed.
    pub fn open(root: impl Into<PathBuf>, tagger: Arc<dyn NounTagger>) -> Result<Self> {
        Self::open_with(root, tagger, system_clock(), DEFAULT_SNAPSHOT_EVERY)
    }

    pub fn open_with(root: impl Into<PathBuf>, tagger: Arc<dyn NounTagger>, clock: Clock, snapshot_every: usize) -> Result<Self> {
        let root = root.into();
        std::fs::create_dir_all(&root)?;
        let mut projects = HashMap::new();
        let mut entries: Vec<_> = std::fs::read_dir(&root)?.collect::<std::io::Result<_>>()?;
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let path = entry.path();
            if !path.join(LOG_FILE).is_file() {
                continue;
            }
            let store = ProjectStore::open(&path, snapshot_every)?;
            projects.insert(store.state().spec.id.clone(), Arc::new(ProjectHandle::new(store)));
        }
        Ok(Self {
            root,
            tagger,
            clock,
            snapshot_every,
            projects: RwLock::new(projects),
            creating: Mutex::new(()),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn project_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.projects.read().keys().cloned().collect();
        ids.sort();
        ids
    }

    fn handle(&self, id: &str) -> Result<Arc<ProjectHandle>> {
        self.projects
            .read()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(format!("no project {id:?}")))
    }

    pub fn state(&self, id: &str) -> Result<Arc<ProjectState>> {
        Ok(self.handle(id)?.read())
    }

    /// Tokenizes sentences, detects targets and assigns annotators: both
    /// roster members in rotation for paired projects, one in rotation for
    /// single projects.
    pub fn create_project(&self, req: CreateProject) -> Result<ProjectView> {
        if !valid_project_id(&req.id) {
            return Err(ServiceError::BadRequest(format!("project id {:?} must be 1-128 of [A-Za-z0-9_-]", req.id)));
        }
        if req.sentences.is_empty() {
            return Err(ServiceError::Config("a project needs at least one sentence".into()));
        }
        let roster: Vec<String> = req.roster.iter().map(|a| a.trim().to_string()).collect();
        if roster.iter().any(String::is_empty) || roster.iter().collect::<BTreeSet<_>>().len() != roster.len() {
            return Err(ServiceError::Config("roster entries must be distinct and nonempty".into()));
        }
        let needed = match req.policy {
            Policy::Single => 1,
            Policy::Paired => 2,
        };
        if roster.len() < needed {
            return Err(ServiceError::Config(format!(
                "{:?} policy needs at least {needed} annotator(s), roster has {}",
                req.policy,
                roster.len()
            )));
        }

        let mut sentences = Vec::with_capacity(req.sentences.len());
        let mut targets = Vec::new();
        let mut seen_ids = BTreeSet::new();
        for (si, input) in req.sentences.iter().enumerate() {
            if !seen_ids.insert(input.id.clone()) {
                return Err(ServiceError::BadRequest(format!("duplicate sentence id {:?}", input.id)));
            }
            let sentence = match &input.tokens {
                Some(tokens) => Sentence::new(input.id.clone(), input.text.clone(), tokens.clone())?,
                None => Sentence::tokenize(input.id.clone(), input.text.clone()),
            };
            let mut nouns = match &input.targets {
                Some(t) => t.clone(),
                None => self.tagger.noun_indices(&sentence)?,
            };
            nouns.sort_unstable();
            nouns.dedup();
            for idx in nouns {
                let target = NounTarget::new(&sentence, idx)?;
                let k = targets.len();
                let assignees = (0..needed).map(|o| roster[(k * needed + o) % roster.len()].clone()).collect();
                targets.push(TargetSpec {
                    sentence: si,
                    token_index: idx,
                    surface: target.surface,
                    assignees,
                });
            }
            sentences.push(ProjectSentence {
                sentence,
                split: input.split.unwrap_or(Split::Train),
            });
        }
        let spec = ProjectSpec {
            id: req.id.clone(),
            policy: req.policy,
            roster,
            sentences,
            targets,
            created_at: (self.clock)(),
        };

        let _guard = self.creating.lock();
        if self.projects.read().contains_key(&req.id) {
            return Err(ServiceError::Conflict(format!("project {} already exists", req.id)));
        }
        let store = ProjectStore::create(self.root.join(&req.id), spec, self.snapshot_every)?;
        let handle = Arc::new(ProjectHandle::new(store));
        let view = project_view(&handle.read());
        self.projects.write().insert(req.id, handle);
        Ok(view)
    }

    pub fn project(&self, id: &str) -> Result<ProjectView> {
        Ok(project_view(&*self.state(id)?))
    }

    pub fn assignments(&self, id: &str, annotator: &str) -> Result<Vec<TargetSummary>> {
        Ok(project_view(&*self.state(id)?)
            .targets
            .into_iter()
            .filter(|t| t.assignees.iter().any(|a| a == annotator))
            .collect())
    }

    pub fn target(&self, id: &str, target: usize) -> Result<TargetView> {
        let state = self.state(id)?;
        let spec = state.target_spec(target)?;
        let s = &state.spec.sentences[spec.sentence].sentence;
        Ok(TargetView {
            target,
            sentence_id: s.id.clone(),
            text: s.text.clone(),
            tokens: (0..s.len()).filter_map(|i| s.token_text(i).map(str::to_string)).collect(),
            token_index: spec.token_index,
            surface: spec.surface.clone(),
            marked_text: s.marked_text(spec.token_index).unwrap_or_default(),
            assignees: spec.assignees.clone(),
            status: state.status(target),
        })
    }

    /// Validates and stores an annotator's independent record. A new
    /// submission becomes the current version; earlier ones stay in history.
    pub fn submit(&self, id: &str, target: usize, annotator: &str, qas: Vec<QaEntry>) -> Result<SubmitOutcome> {
        let now = (self.clock)();
        self.handle(id)?.write(|state| {
            let spec = state.target_spec(target)?;
            if !spec.assignees.iter().any(|a| a == annotator) {
                return Err(ServiceError::Forbidden(format!("{annotator} is not assigned to target {target}")));
            }
            if state.targets[target].consolidated.is_some() {
                return Err(ServiceError::Conflict(format!("target {target} is already consolidated")));
            }
            let sentence = &state.spec.sentences[spec.sentence].sentence;
            let violations = check_record(sentence, spec.token_index, annotator, Phase::Independent, &qas);
            if !violations.is_empty() {
                return Ok((None, SubmitOutcome::Rejected { violations }));
            }
            let version = state.targets[target].submissions.get(annotator).map_or(0, Vec::len) as u32 + 1;
            let event = Event::Submitted {
                target,
                annotator: annotator.to_string(),
                qas,
                at: now,
            };
            Ok((Some(event), SubmitOutcome::Accepted { version }))
        })
    }

    pub fn records(&self, id: &str, target: usize) -> Result<Vec<CurrentRecord>> {
        let state = self.state(id)?;
        let spec = state.target_spec(target)?;
        let t = &state.targets[target];
        Ok(spec
            .assignees
            .iter()
            .filter_map(|a| {
                let history = t.submissions.get(a)?;
                let v = history.last()?;
                Some(CurrentRecord {
                    annotator: a.clone(),
                    version: v.version,
                    history: history.len(),
                    qas: v.qas.clone(),
                })
            })
            .collect())
    }

    pub fn history_len(&self, id: &str, target: usize, annotator: &str) -> Result<usize> {
        let state = self.state(id)?;
        state.target_spec(target)?;
        Ok(state.targets[target].submissions.get(annotator).map_or(0, Vec::len))
    }

    /// Disagreements between the two current records of a paired target,
    /// with the first assignee on the left.
    pub fn disagreements(&self, id: &str, target: usize) -> Result<Vec<Disagreement>> {
        disagreements_in(&*self.state(id)?, target)
    }

    /// Applies decisions and stores the consolidated record, or rejects the
    /// whole request if the result would be invalid.
    pub fn reconcile(&self, id: &str, target: usize, actor: &str, req: ReconcileRequest) -> Result<ReconcileOutcome> {
        let now = (self.clock)();
        self.handle(id)?.write(|state| {
            let spec = state.target_spec(target)?;
            if !spec.assignees.iter().any(|a| a == actor) {
                return Err(ServiceError::Forbidden(format!("{actor} is not assigned to target {target}")));
            }
            if let Some(co) = &req.co_signer {
                if co == actor || !spec.assignees.contains(co) {
                    return Err(ServiceError::BadRequest(format!("co-signer {co} must be the other assignee")));
                }
            }
            let disagreements = disagreements_in(state, target)?;
            let (left, right) = (&spec.assignees[0], &spec.assignees[1]);
            let t = &state.targets[target];
            let lq = &t.current(left).expect("checked by disagreements_in").qas;
            let rq = &t.current(right).expect("checked by disagreements_in").qas;
            let qas = apply_decisions(lq, rq, &disagreements, &req.decisions, &spec.surface)?;
            let sentence = &state.spec.sentences[spec.sentence].sentence;
            let violations = check_record(sentence, spec.token_index, actor, Phase::Consolidated, &qas);
            if !violations.is_empty() {
                return Ok((None, ReconcileOutcome::Rejected { violations }));
            }
            let consolidation = Consolidation {
                actor: actor.to_string(),
                co_signer: req.co_signer.clone(),
                note: req.note.clone(),
                decisions: req.decisions.clone(),
                qas: qas.clone(),
                at: now,
            };
            Ok((Some(Event::Reconciled { target, consolidation }), ReconcileOutcome::Consolidated { qas }))
        })
    }

    /// The project as dataset lines plus agreement. Without `partial`, every
    /// target must be done.
    pub fn export(&self, id: &str, partial: bool) -> Result<ExportBundle> {
        let state = self.state(id)?;
        export_state(&state, partial)
    }
}

fn disagreements_in(state: &ProjectState, target: usize) -> Result<Vec<Disagreement>> {
    let spec = state.target_spec(target)?;
    if state.spec.policy != Policy::Paired {
        return Err(ServiceError::Conflict(format!("target {target} has a single annotator")));
    }
    let t = &state.targets[target];
    let (left, right) = (&spec.assignees[0], &spec.assignees[1]);
    match (t.current(left), t.current(right)) {
        (Some(l), Some(r)) => Ok(compute_disagreements(left, &l.qas, right, &r.qas)),
        _ => Err(ServiceError::NotReady(format!("target {target} needs records from {left} and {right}"))),
    }
}

pub fn project_view(state: &ProjectState) -> ProjectView {
    ProjectView {
        id: state.spec.id.clone(),
        policy: state.spec.policy,
        roster: state.spec.roster.clone(),
        sentences: state.spec.sentences.len(),
        targets: state
            .spec
            .targets
            .iter()
            .enumerate()
            .map(|(i, t)| TargetSummary {
                target: i,
                sentence_id: state.spec.sentences[t.sentence].sentence.id.clone(),
                token_index: t.token_index,
                surface: t.surface.clone(),
                assignees: t.assignees.clone(),
                status: state.status(i),
            })
            .collect(),
    }
}

pub fn export_state(state: &ProjectState, partial: bool) -> Result<ExportBundle> {
    let total = state.spec.targets.len();
    let done = (0..total).filter(|&t| state.status(t) == TargetStatus::Done).count();
    if done < total && !partial {
        return Err(ServiceError::NotReady(format!(
            "{} of {total} targets are not done; request a partial export to proceed",
            total - done
        )));
    }
    let mut groups = Vec::new();
    let mut keys = Vec::new();
    if state.spec.policy == Policy::Paired {
        for (t, spec) in state.spec.targets.iter().enumerate() {
            let ts = &state.targets[t];
            let sentence = &state.spec.sentences[spec.sentence].sentence;
            let records: Vec<AnnotationRecord> = spec
                .assignees
                .iter()
                .filter_map(|a| ts.current(a).map(|v| (a, v)))
                .map(|(a, v)| AnnotationRecord {
                    target: NounTarget {
                        sentence_id: sentence.id.clone(),
                        token_index: spec.token_index,
                        surface: spec.surface.clone(),
                    },
                    annotator_id: a.clone(),
                    phase: Phase::Independent,
                    qas: v.qas.iter().map(QaEntry::to_pair).collect(),
                })
                .collect();
            if records.len() == 2 {
                keys.push((sentence.id.clone(), spec.token_index));
                groups.push(records);
            }
        }
    }
    let iaa = if groups.is_empty() {
        None
    } else {
        let report = iaa(&groups)?;
        let per_target: Vec<_> = keys
            .into_iter()
            .zip(report.targets.iter())
            .map(|((s, t), a)| (s, t, a.result.clone()))
            .collect();
        Some(ScoreReport::new(AveragingMode::Macro, &report.scores).with_targets(&per_target))
    };
    Ok(ExportBundle {
        project: state.spec.id.clone(),
        partial: done < total,
        targets_total: total,
        targets_done: done,
        dataset: dataset_to_string(&state.to_dataset()),
        iaa,
    })
}
