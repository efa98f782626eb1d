use std::collections::{HashMap, VecDeque};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::{GatewayError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub initial_backoff_ms: u64,
    pub max_backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: 3,
            initial_backoff_ms: 500,
            max_backoff_ms: 8_000,
        }
    }
}

impl RetryPolicy {
    pub fn no_backoff(max_attempts: u32) -> Self {
        Self {
            max_attempts,
            initial_backoff_ms: 0,
            max_backoff_ms: 0,
        }
    }

    /// Delay before retry number `retry` (1-based): doubling, capped.
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u64.checked_shl(retry.saturating_sub(1)).unwrap_or(u64::MAX);
        Duration::from_millis(self.initial_backoff_ms.saturating_mul(factor).min(self.max_backoff_ms))
    }
}

/// Where and how to reach a chat-completion server. The bearer token is
/// never stored here, only the name of the environment variable holding it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InferenceEndpoint {
    pub base_url: String,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_env: Option<String>,
    pub timeout_ms: u64,
    pub max_in_flight: usize,
    #[serde(default)]
    pub retry: RetryPolicy,
}

impl InferenceEndpoint {
    pub fn new(base_url: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            model: model.into(),
            token_env: None,
            timeout_ms: 60_000,
            max_in_flight: 4,
            retry: RetryPolicy::default(),
        }
    }

    /// A stand-in definition for scripted clients.
    pub fn stub(model: impl Into<String>) -> Self {
        Self {
            retry: RetryPolicy::no_backoff(3),
            ..Self::new("stub://", model)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ep: Self = serde_json::from_str(text)?;
        ep.check()?;
        Ok(ep)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn check(&self) -> Result<()> {
        let problem = if self.base_url.trim().is_empty() {
            "base_url is empty"
        } else if self.model.trim().is_empty() {
            "model is empty"
        } else if self.timeout_ms == 0 {
            "timeout must be positive"
        } else if self.max_in_flight == 0 {
            "max_in_flight must be at least 1"
        } else if self.retry.max_attempts == 0 {
            "retry.max_attempts must be at least 1"
        } else {
            return Ok(());
        };
        Err(GatewayError::Config(format!("endpoint {}: {problem}", self.base_url)))
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    /// Reads the bearer token from the configured environment variable.
    pub fn token(&self) -> Result<Option<String>> {
        match &self.token_env {
            None => Ok(None),
            Some(var) => std::env::var(var)
                .map(Some)
                .map_err(|_| GatewayError::Config(format!("environment variable {var} is not set"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: "system".into(), content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: "user".into(), content: content.into() }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self { role: "assistant".into(), content: content.into() }
    }
}

/// Outcome of one failed request attempt.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CallError {
    /// Worth retrying: connection problems, timeouts, 429 and 5xx.
    Retryable(String),
    /// Retrying will not help: bad request, auth failure, missing replay.
    Fatal(String),
}

impl CallError {
    pub fn message(&self) -> &str {
        match self {
            CallError::Retryable(m) | CallError::Fatal(m) => m,
        }
    }
}

/// A single chat-completion attempt against some provider.
pub trait ChatClient: Send + Sync {
    fn chat(&self, model: &str, messages: &[ChatMessage]) -> std::result::Result<String, CallError>;
}

/// OpenAI-style `POST {base_url}/chat/completions` client.
pub struct HttpChatClient {
    url: String,
    token: Option<String>,
    agent: ureq::Agent,
}

impl HttpChatClient {
    pub fn new(endpoint: &InferenceEndpoint) -> Result<Self> {
        endpoint.check()?;
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(endpoint.timeout()))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Self {
            url: format!("{}/chat/completions", endpoint.base_url.trim_end_matches('/')),
            token: endpoint.token()?,
            agent,
        })
    }
}

impl ChatClient for HttpChatClient {
    fn chat(&self, model: &str, messages: &[ChatMessage]) -> std::result::Result<String, CallError> {
        let body = json!({ "model": model, "messages": messages, "temperature": 0 });
        let mut req = self.agent.post(&self.url);
        if let Some(t) = &self.token {
            req = req.header("Authorization", &format!("Bearer {t}"));
        }
        let mut resp = req.send_json(&body).map_err(|e| CallError::Retryable(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 429 || status >= 500 {
            return Err(CallError::Retryable(format!("{} returned HTTP {status}", self.url)));
        }
        if status >= 400 {
            return Err(CallError::Fatal(format!("{} returned HTTP {status}", self.url)));
        }
        let value: serde_json::Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| CallError::Retryable(format!("unreadable response body: {e}")))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| CallError::Fatal(format!("response has no choices[0].message.content: {value}")))
    }
}

/// Replays a fixed script of outcomes in call order and records requests.
#[derive(Default)]
pub struct ScriptedClient {
    steps: Mutex<VecDeque<std::result::Result<String, CallError>>>,
    requests: Mutex<Vec<Vec<ChatMessage>>>,
}

impl ScriptedClient {
    pub fn new(steps: impl IntoIterator<Item = std::result::Result<String, CallError>>) -> Self {
        Self {
            steps: Mutex::new(steps.into_iter().collect()),
            requests: Mutex::default(),
        }
    }

    pub fn replies<S: Into<String>>(replies: impl IntoIterator<Item = S>) -> Self {
        Self::new(replies.into_iter().map(|r| Ok(r.into())))
    }

    /// A client whose every attempt fails with a retryable error.
    pub fn down() -> Self {
        Self::default()
    }

    pub fn requests(&self) -> Vec<Vec<ChatMessage>> {
        self.requests.lock().expect("scripted client lock").clone()
    }
}

impl ChatClient for ScriptedClient {
    fn chat(&self, _model: &str, messages: &[ChatMessage]) -> std::result::Result<String, CallError> {
        self.requests.lock().expect("scripted client lock").push(messages.to_vec());
        self.steps
            .lock()
            .expect("scripted client lock")
            .pop_front()
            .unwrap_or_else(|| Err(CallError::Retryable("connection refused".into())))
    }
}

/// Answers each request with a pure function of its messages, so results do
/// not depend on call order.
pub struct FnClient<F>(pub F);

impl<F> ChatClient for FnClient<F>
where
    F: Fn(&[ChatMessage]) -> std::result::Result<String, CallError> + Send + Sync,
{
    fn chat(&self, _model: &str, messages: &[ChatMessage]) -> std::result::Result<String, CallError> {
        (self.0)(messages)
    }
}

/// Content hash identifying a request in replay logs.
pub fn request_key(model: &str, messages: &[ChatMessage]) -> String {
    let canonical = json!({ "model": model, "messages": messages }).to_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayEntry {
    pub key: String,
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub response: String,
}

/// Append-only JSONL file of raw responses.
pub struct ReplayLog {
    path: PathBuf,
    file: Mutex<File>,
}

impl ReplayLog {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file: Mutex::new(file) })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, entry: &ReplayEntry) -> Result<()> {
        let mut line = serde_json::to_string(entry)?;
        line.push('\n');
        let mut f = self.file.lock().expect("replay log lock");
        f.write_all(line.as_bytes())?;
        f.flush()?;
        Ok(())
    }

    /// Reads every complete entry; a torn final line is skipped.
    pub fn read(path: impl AsRef<Path>) -> Result<Vec<ReplayEntry>> {
        let reader = BufReader::new(File::open(path)?);
        let mut out = Vec::new();
        for line in reader.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(&line) {
                Ok(e) => out.push(e),
                Err(e) if e.is_eof() => break,
                Err(e) => return Err(e.into()),
            }
        }
        Ok(out)
    }
}

/// Serves responses from a replay log for offline re-runs.
pub struct ReplayClient {
    responses: HashMap<String, String>,
}

impl ReplayClient {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(Self::from_entries(ReplayLog::read(path)?))
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ReplayEntry>) -> Self {
        Self {
            responses: entries.into_iter().map(|e| (e.key, e.response)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.responses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.responses.is_empty()
    }
}

impl ChatClient for ReplayClient {
    fn chat(&self, model: &str, messages: &[ChatMessage]) -> std::result::Result<String, CallError> {
        let key = request_key(model, messages);
        self.responses
            .get(&key)
            .cloned()
            .ok_or_else(|| CallError::Fatal(format!("no recorded response for request {key}")))
    }
}

/// Counting gate bounding simultaneous requests across all callers.
struct Slots {
    free: Mutex<usize>,
    released: Condvar,
}

impl Slots {
    fn new(n: usize) -> Self {
        Self { free: Mutex::new(n), released: Condvar::new() }
    }

    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().expect("slot lock");
        while *free == 0 {
            free = self.released.wait(free).expect("slot lock");
        }
        *free -= 1;
        SlotGuard(self)
    }
}

struct SlotGuard<'a>(&'a Slots);

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().expect("slot lock") += 1;
        self.0.released.notify_one();
    }
}

/// Retrying, concurrency-bounded front end to a [`ChatClient`].
#[derive(Clone)]
pub struct Gateway {
    endpoint: InferenceEndpoint,
    client: Arc<dyn ChatClient>,
    recorder: Option<Arc<ReplayLog>>,
    pool: Arc<rayon::ThreadPool>,
    slots: Arc<Slots>,
    attempts: Arc<AtomicUsize>,
}

impl Gateway {
    pub fn new(endpoint: InferenceEndpoint, client: Arc<dyn ChatClient>) -> Result<Self> {
        endpoint.check()?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(endpoint.max_in_flight)
            .thread_name(|i| format!("qanoun-llm-{i}"))
            .build()
            .map_err(|e| GatewayError::Config(format!("cannot start request pool: {e}")))?;
        Ok(Self {
            slots: Arc::new(Slots::new(endpoint.max_in_flight)),
            endpoint,
            client,
            recorder: None,
            pool: Arc::new(pool),
            attempts: Arc::default(),
        })
    }

    pub fn http(endpoint: InferenceEndpoint) -> Result<Self> {
        let client = HttpChatClient::new(&endpoint)?;
        Self::new(endpoint, Arc::new(client))
    }

    pub fn with_recorder(mut self, log: ReplayLog) -> Self {
        self.recorder = Some(Arc::new(log));
        self
    }

    pub fn endpoint(&self) -> &InferenceEndpoint {
        &self.endpoint
    }

    pub fn model(&self) -> &str {
        &self.endpoint.model
    }

    /// Total request attempts issued so far, retries included.
    pub fn attempts(&self) -> usize {
        self.attempts.load(Ordering::Relaxed)
    }

    /// Sends one request, retrying retryable failures per the policy. At most
    /// `max_in_flight` requests run at once across all clones of a gateway.
    pub fn complete(&self, messages: &[ChatMessage]) -> Result<String> {
        let policy = &self.endpoint.retry;
        let mut attempt = 0;
        loop {
            attempt += 1;
            self.attempts.fetch_add(1, Ordering::Relaxed);
            let reply = {
                let _slot = self.slots.acquire();
                self.client.chat(&self.endpoint.model, messages)
            };
            match reply {
                Ok(text) => {
                    if let Some(log) = &self.recorder {
                        log.append(&ReplayEntry {
                            key: request_key(&self.endpoint.model, messages),
                            model: self.endpoint.model.clone(),
                            messages: messages.to_vec(),
                            response: text.clone(),
                        })?;
                    }
                    return Ok(text);
                }
                Err(CallError::Retryable(m)) if attempt < policy.max_attempts => {
                    log::warn!("{}: attempt {attempt} failed: {m}", self.endpoint.base_url);
                    std::thread::sleep(policy.backoff(attempt));
                }
                Err(e) => {
                    return Err(GatewayError::Transport {
                        attempts: attempt,
                        message: e.message().to_string(),
                    })
                }
            }
        }
    }

    /// Issues every request with at most `max_in_flight` outstanding; results
    /// come back in input order.
    pub fn complete_all(&self, batch: &[Vec<ChatMessage>]) -> Vec<Result<String>> {
        self.pool.install(|| batch.par_iter().map(|m| self.complete(m)).collect())
    }

    /// Runs `f` over `items` inside the request pool, preserving order.
    pub fn map_bounded<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}
