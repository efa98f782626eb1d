//! JSON web API over [`Service`].

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use qanoun_core::schema::dataset::QaEntry;
use qanoun_core::schema::NounTagger;

use crate::error::{Result, ServiceError};
use crate::grammar::grammar_fixtures;
use crate::model::CreateProject;
use crate::reconcile::ReconcileRequest;
use crate::service::{ReconcileOutcome, Service, SubmitOutcome};

/// Bearer tokens mapped to annotator ids.
#[derive(Debug, Clone, Default)]
pub struct Tokens(HashMap<String, String>);

impl Tokens {
    pub fn new(map: HashMap<String, String>) -> Self {
        Self(map)
    }

    /// Reads a JSON object of `token: annotator` pairs.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::Config(format!("token file {}: {e}", path.display())))?;
        let map: HashMap<String, String> = serde_json::from_str(&text)
            .map_err(|e| ServiceError::Config(format!("token file {}: {e}", path.display())))?;
        if map.is_empty() {
            return Err(ServiceError::Config(format!("token file {} has no tokens", path.display())));
        }
        Ok(Self(map))
    }

    fn annotator(&self, headers: &HeaderMap) -> Result<String> {
        let value = headers
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .ok_or_else(|| ServiceError::Unauthorized("missing bearer token".into()))?;
        let token = value
            .strip_prefix("Bearer ")
            .ok_or_else(|| ServiceError::Unauthorized("authorization must be a bearer token".into()))?;
        self.0
            .get(token.trim())
            .cloned()
            .ok_or_else(|| ServiceError::Unauthorized("unknown token".into()))
    }
}

#[derive(Clone)]
struct AppState {
    service: Arc<Service>,
    tokens: Arc<Tokens>,
}

struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        Self(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self.0 {
            ServiceError::Config(_) | ServiceError::BadRequest(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            ServiceError::Json(_) => (StatusCode::BAD_REQUEST, "bad_request"),
            ServiceError::Unauthorized(_) => (StatusCode::UNAUTHORIZED, "unauthorized"),
            ServiceError::Forbidden(_) => (StatusCode::FORBIDDEN, "forbidden"),
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            ServiceError::NotReady(_) => (StatusCode::CONFLICT, "not_ready"),
            ServiceError::Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            ServiceError::Core(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid"),
            ServiceError::Corrupt { .. } | ServiceError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            log::error!("{}", self.0);
        }
        let mut resp = (status, Json(json!({"error": kind, "message": self.0.to_string()}))).into_response();
        if status == StatusCode::UNAUTHORIZED {
            resp.headers_mut()
                .insert(header::WWW_AUTHENTICATE, header::HeaderValue::from_static("Bearer"));
        }
        resp
    }
}

type ApiResult = std::result::Result<Response, ApiError>;

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| ServiceError::BadRequest(format!("request body: {e}")))
}

/// Runs a blocking service call off the async executor.
async fn blocking<T, F>(f: F) -> Result<T>
where
    F: FnOnce() -> Result<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ServiceError::Io(std::io::Error::other(e)))?
}

fn ok<T: serde::Serialize>(value: T) -> ApiResult {
    Ok(Json(value).into_response())
}

#[derive(Deserialize)]
struct SubmitBody {
    qas: Vec<QaEntry>,
}

#[derive(Deserialize)]
struct ExportQuery {
    #[serde(default)]
    partial: bool,
}

async fn create_project(State(app): State<AppState>, headers: HeaderMap, bytes: Bytes) -> ApiResult {
    app.tokens.annotator(&headers)?;
    let req: CreateProject = body(&bytes)?;
    let service = app.service.clone();
    let view = blocking(move || service.create_project(req)).await?;
    Ok((StatusCode::CREATED, Json(view)).into_response())
}

async fn get_project(State(app): State<AppState>, headers: HeaderMap, UrlPath(id): UrlPath<String>) -> ApiResult {
    app.tokens.annotator(&headers)?;
    ok(app.service.project(&id)?)
}

async fn get_assignments(State(app): State<AppState>, headers: HeaderMap, UrlPath(id): UrlPath<String>) -> ApiResult {
    let who = app.tokens.annotator(&headers)?;
    ok(app.service.assignments(&id, &who)?)
}

async fn get_target(
    State(app): State<AppState>,
    headers: HeaderMap,
    UrlPath((id, t)): UrlPath<(String, usize)>,
) -> ApiResult {
    app.tokens.annotator(&headers)?;
    ok(app.service.target(&id, t)?)
}

async fn put_record(
    State(app): State<AppState>,
    headers: HeaderMap,
    UrlPath((id, t)): UrlPath<(String, usize)>,
    bytes: Bytes,
) -> ApiResult {
    let who = app.tokens.annotator(&headers)?;
    let req: SubmitBody = body(&bytes)?;
    let service = app.service.clone();
    let outcome = blocking(move || service.submit(&id, t, &who, req.qas)).await?;
    let status = match outcome {
        SubmitOutcome::Accepted { .. } => StatusCode::OK,
        SubmitOutcome::Rejected { .. } => StatusCode::UNPROCESSABLE_ENTITY,
    };
    Ok((status, Json(outcome)).into_response())
}

async fn get_records(
    State(app): State<AppState>,
    headers: HeaderMap,
    UrlPath((id, t)): UrlPath<(String, usize)>,
) -> ApiResult {
    app.tokens.annotator(&headers)?;
    ok(app.service.records(&id, t)?)
}

async fn get_disagreements(
    State(app): State<AppState>,
    headers: HeaderMap,
    UrlPath((id, t)): UrlPath<(String, usize)>,
) -> ApiResult {
    app.tokens.annotator(&headers)?;
    ok(app.service.disagreements(&id, t)?)
}

async fn post_reconciliation(
    State(app): State<AppState>,
    headers: HeaderMap,
    UrlPath((id, t)): UrlPath<(String, usize)>,
    bytes: Bytes,
) -> ApiResult {
    let who = app.tokens.annotator(&headers)?;
    let req: ReconcileRequest = body(&bytes)?;
    let service = app.service.clone();
    let outcome = blocking(move || service.reconcile(&id, t, &who, req)).await?;
    let status = match outcome {
        ReconcileOutcome::Consolidated { .. } => StatusCode::OK,
        ReconcileOutcome::Rejected { .. } => StatusCode::UNPROCESSABLE_ENTITY,
    };
    Ok((status, Json(outcome)).into_response())
}

async fn get_export(
    State(app): State<AppState>,
    headers: HeaderMap,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<ExportQuery>,
) -> ApiResult {
    app.tokens.annotator(&headers)?;
    ok(app.service.export(&id, q.partial)?)
}

async fn get_grammar() -> ApiResult {
    ok(grammar_fixtures())
}

/// The API routes. Every route except `/grammar` requires a bearer token.
pub fn router(service: Arc<Service>, tokens: Tokens) -> Router {
    let state = AppState {
        service,
        tokens: Arc::new(tokens),
    };
    Router::new()
        .route("/grammar", get(get_grammar))
        .route("/projects", post(create_project))
        .route("/projects/{id}", get(get_project))
        .route("/projects/{id}/assignments", get(get_assignments))
        .route("/projects/{id}/targets/{t}", get(get_target))
        .route("/projects/{id}/targets/{t}/records", get(get_records).put(put_record))
        .route("/projects/{id}/targets/{t}/disagreements", get(get_disagreements))
        .route("/projects/{id}/targets/{t}/reconciliation", post(post_reconciliation))
        .route("/projects/{id}/export", get(get_export))
        .with_state(state)
}

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub data_dir: PathBuf,
    pub bind: SocketAddr,
    pub token_file: PathBuf,
}

/// Opens the data directory and serves until the process is stopped.
pub async fn serve(config: ServeConfig, tagger: Arc<dyn NounTagger>) -> Result<()> {
    let tokens = Tokens::load(&config.token_file)?;
    let data_dir = config.data_dir.clone();
    let service = blocking(move || Service::open(data_dir, tagger)).await?;
    let listener = tokio::net::TcpListener::bind(config.bind).await?;
    log::info!("serving {} projects on {}", service.project_ids().len(), config.bind);
    axum::serve(listener, router(Arc::new(service), tokens)).await?;
    Ok(())
}
