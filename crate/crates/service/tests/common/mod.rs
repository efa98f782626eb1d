#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use qanoun_core::schema::dataset::QaEntry;
use qanoun_core::schema::tagger::FixedTagger;
use qanoun_core::schema::{QAPair, QuestionForm, Sentence, TokenRange};
use qanoun_service::model::{CreateProject, Policy, SentenceInput};
use qanoun_service::service::{Clock, Service};

pub const TEXT: &str = "the old red camp of the large team near Dallas opened today";
pub const TARGET_TOKEN: usize = 3;

pub fn sentence() -> Sentence {
    Sentence::tokenize("s1", TEXT)
}

/// Timestamps that advance by one second per call.
pub fn fake_clock() -> Clock {
    let n = Arc::new(AtomicU64::new(0));
    Arc::new(move || {
        let i = n.fetch_add(1, Ordering::SeqCst);
        format!("2024-01-01T00:{:02}:{:02}.000Z", (i / 60) % 60, i % 60)
    })
}

pub fn service(dir: &std::path::Path) -> Service {
    service_with(dir, 64)
}

pub fn service_with(dir: &std::path::Path, snapshot_every: usize) -> Service {
    let tagger = Arc::new(FixedTagger::new(HashMap::new()));
    Service::open_with(dir, tagger, fake_clock(), snapshot_every).unwrap()
}

pub fn input(id: &str, text: &str, targets: &[usize]) -> SentenceInput {
    SentenceInput {
        id: id.into(),
        text: text.into(),
        tokens: None,
        split: None,
        targets: Some(targets.to_vec()),
    }
}

pub fn one_target(id: &str, policy: Policy, roster: &[&str]) -> CreateProject {
    CreateProject {
        id: id.into(),
        sentences: vec![input("s1", TEXT, &[TARGET_TOKEN])],
        roster: roster.iter().map(|s| s.to_string()).collect(),
        policy,
    }
}

pub fn qa(form: QuestionForm, first: usize, last: usize) -> QaEntry {
    let s = sentence();
    let noun = s.token_text(TARGET_TOKEN).unwrap().to_string();
    QaEntry::from_pair(&QAPair::from_range(&s, form, TokenRange::new(first, last)).unwrap(), &noun)
}
