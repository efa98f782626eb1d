//! Annotation projects for QA-Noun: assignment, record submission,
//! disagreement detection, reconciliation and export, persisted as an
//! append-only event log per project and served over a JSON web API.

pub mod disagree;
pub mod error;
pub mod grammar;
pub mod http;
pub mod model;
pub mod reconcile;
pub mod service;
pub mod store;

pub use disagree::{compute_disagreements, Disagreement, DisagreementKind};
pub use error::{Result, ServiceError};
pub use grammar::{grammar_fixtures, grammar_fixtures_json, GrammarFixtures};
pub use http::{router, serve, ServeConfig, Tokens};
pub use model::{CreateProject, Policy, SentenceInput, TargetStatus};
pub use reconcile::{Action, Decision, ReconcileRequest};
pub use service::{ExportBundle, ReconcileOutcome, Service, SubmitOutcome};
pub use store::ProjectStore;
