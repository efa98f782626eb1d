mod common;

use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use common::*;
use qanoun_core::schema::QuestionForm;
use qanoun_service::{router, Tokens};

fn app(dir: &std::path::Path) -> Router {
    let tokens = Tokens::new(HashMap::from([
        ("tok-al".to_string(), "al".to_string()),
        ("tok-bo".to_string(), "bo".to_string()),
        ("tok-cy".to_string(), "cy".to_string()),
    ]));
    router(Arc::new(service(dir)), tokens)
}

async fn call(app: &Router, method: Method, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() { Value::Null } else { serde_json::from_slice(&bytes).unwrap() };
    (status, value)
}

fn create_body() -> Value {
    json!({
        "id": "p",
        "sentences": [{"id": "s1", "text": TEXT, "targets": [TARGET_TOKEN]}],
        "roster": ["al", "bo"],
        "policy": "paired"
    })
}

#[tokio::test]
async fn full_workflow_over_http() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());

    let (s, v) = call(&app, Method::POST, "/projects", Some("tok-al"), Some(create_body())).await;
    assert_eq!(s, StatusCode::CREATED, "{v}");
    assert_eq!(v["targets"][0]["assignees"], json!(["al", "bo"]));

    let (s, v) = call(&app, Method::GET, "/projects/p/assignments", Some("tok-bo"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v.as_array().unwrap().len(), 1);
    let (_, v) = call(&app, Method::GET, "/projects/p/assignments", Some("tok-cy"), None).await;
    assert_eq!(v, json!([]));

    let (s, v) = call(&app, Method::GET, "/projects/p/targets/0", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["surface"], "camp");
    assert!(v["marked_text"].as_str().unwrap().contains("<f>camp</f>"));

    let left = vec![qa(QuestionForm::possession(), 5, 7), qa(QuestionForm::time(), 11, 11)];
    let right = vec![qa(QuestionForm::possession(), 5, 7)];
    let (s, v) = call(&app, Method::PUT, "/projects/p/targets/0/records", Some("tok-al"), Some(json!({"qas": left}))).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v, json!({"outcome": "accepted", "version": 1}));

    let (s, _) = call(&app, Method::GET, "/projects/p/targets/0/disagreements", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, _) = call(&app, Method::PUT, "/projects/p/targets/0/records", Some("tok-bo"), Some(json!({"qas": right}))).await;
    assert_eq!(s, StatusCode::OK);
    let (_, v) = call(&app, Method::GET, "/projects/p/targets/0/records", Some("tok-al"), None).await;
    assert_eq!(v.as_array().unwrap().len(), 2);

    let (s, v) = call(&app, Method::GET, "/projects/p/targets/0/disagreements", Some("tok-bo"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["kind"], "coverage");

    let decisions = json!({"decisions": [{"disagreement": 0, "action": "keep_left"}], "co_signer": "bo"});
    let (s, v) = call(&app, Method::POST, "/projects/p/targets/0/reconciliation", Some("tok-al"), Some(decisions)).await;
    assert_eq!(s, StatusCode::OK, "{v}");
    assert_eq!(v["outcome"], "consolidated");
    assert_eq!(v["qas"].as_array().unwrap().len(), 2);

    let (s, v) = call(&app, Method::GET, "/projects/p/export", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["partial"], false);
    assert_eq!(v["iaa"]["f1"].to_string(), "0.6667");
    assert_eq!(v["dataset"].as_str().unwrap().lines().count(), 1);
}

#[tokio::test]
async fn status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (s, _) = call(&app, Method::POST, "/projects", None, Some(create_body())).await;
    assert_eq!(s, StatusCode::UNAUTHORIZED);
    let (s, _) = call(&app, Method::POST, "/projects", Some("nope"), Some(create_body())).await;
    assert_eq!(s, StatusCode::UNAUTHORIZED);
    let (s, _) = call(&app, Method::POST, "/projects", Some("tok-al"), Some(json!({"id": "p"}))).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    let mut small = create_body();
    small["roster"] = json!(["al"]);
    let (s, _) = call(&app, Method::POST, "/projects", Some("tok-al"), Some(small)).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);

    call(&app, Method::POST, "/projects", Some("tok-al"), Some(create_body())).await;
    let (s, _) = call(&app, Method::POST, "/projects", Some("tok-al"), Some(create_body())).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, _) = call(&app, Method::GET, "/projects/zzz", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (s, _) = call(&app, Method::GET, "/projects/p/targets/5", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::NOT_FOUND);

    let ok = json!({"qas": [qa(QuestionForm::time(), 11, 11)]});
    let (s, _) = call(&app, Method::PUT, "/projects/p/targets/0/records", Some("tok-cy"), Some(ok)).await;
    assert_eq!(s, StatusCode::FORBIDDEN);

    let dup = json!({"qas": [qa(QuestionForm::time(), 11, 11), qa(QuestionForm::location(), 11, 11)]});
    let (s, v) = call(&app, Method::PUT, "/projects/p/targets/0/records", Some("tok-al"), Some(dup)).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["outcome"], "rejected");
    assert_eq!(v["violations"][0]["rule"], "duplicate-answer");

    let (s, _) = call(&app, Method::GET, "/projects/p/export", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::CONFLICT);
    let (s, v) = call(&app, Method::GET, "/projects/p/export?partial=true", Some("tok-al"), None).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["partial"], true);
}

#[tokio::test]
async fn grammar_is_public() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let (s, v) = call(&app, Method::GET, "/grammar", None, None).await;
    assert_eq!(s, StatusCode::OK);
    let golden: Value =
        serde_json::from_str(include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/grammar_fixtures.json"))).unwrap();
    assert_eq!(v, golden);
}
