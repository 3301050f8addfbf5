//! HTTP endpoints for one deployed survey.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, Method, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use survey_core::compiler::{Payload, RUNNER_BUNDLE};
use survey_core::csv_frontend::parse_survey;
use survey_core::{ResponseRecord, Survey, Terminal};
use thiserror::Error;
use tower_http::cors::{Any, CorsLayer};

use crate::store::{AppendOutcome, ResponseStore, StoreError};

/// File names inside a compiled survey directory.
pub const PAYLOAD_FILE: &str = "payload.json";
pub const HTML_FILE: &str = "index.html";
pub const SOURCE_FILE: &str = "survey.csv";
pub const STORE_FILE: &str = "responses.jsonl";

#[derive(Debug, Error)]
pub enum DeployError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// A compiled survey directory loaded for serving.
pub struct Deployment {
    pub survey: Survey,
    /// `payload.json` exactly as the compiler wrote it.
    pub payload_json: Bytes,
    pub html: String,
    pub runner_js: Option<Bytes>,
    pub store: ResponseStore,
}

impl Deployment {
    /// Loads `payload.json`, `index.html` and `survey.csv` from `dir` and
    /// opens the response log (`dir/responses.jsonl` unless given).
    pub fn load(dir: &Path, store_path: Option<PathBuf>) -> Result<Self, DeployError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read(&path).map_err(|source| DeployError::Io { path, source })
        };
        let payload_json = read(PAYLOAD_FILE)?;
        let html = String::from_utf8(read(HTML_FILE)?)
            .map_err(|_| DeployError::Invalid(format!("{HTML_FILE} is not UTF-8")))?;
        let source = String::from_utf8(read(SOURCE_FILE)?)
            .map_err(|_| DeployError::Invalid(format!("{SOURCE_FILE} is not UTF-8")))?;
        let runner_js = read(RUNNER_BUNDLE).ok().map(Bytes::from);

        let payload: Payload = serde_json::from_slice(&payload_json)
            .map_err(|e| DeployError::Invalid(format!("{PAYLOAD_FILE}: {e}")))?;
        let (survey, _) =
            parse_survey(&source).map_err(|e| DeployError::Invalid(format!("{SOURCE_FILE}: {e}")))?;
        if survey.source_digest != payload.source_digest {
            return Err(DeployError::Invalid(format!(
                "{SOURCE_FILE} does not match {PAYLOAD_FILE}; recompile"
            )));
        }
        let store = ResponseStore::open(store_path.unwrap_or_else(|| dir.join(STORE_FILE)))?;
        Ok(Deployment {
            survey,
            payload_json: Bytes::from(payload_json),
            html,
            runner_js,
            store,
        })
    }
}

pub fn router(deployment: Arc<Deployment>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/survey", get(survey_page))
        .route("/payload.json", get(payload))
        .route("/runner.js", get(runner))
        .route("/response", post(response))
        .route("/breakoff", post(breakoff))
        .route("/health", get(health))
        .layer(cors)
        .with_state(deployment)
}

async fn survey_page(State(d): State<Arc<Deployment>>) -> Html<String> {
    Html(d.html.clone())
}

async fn payload(State(d): State<Arc<Deployment>>) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], d.payload_json.clone()).into_response()
}

async fn runner(State(d): State<Arc<Deployment>>) -> Response {
    match &d.runner_js {
        Some(js) => ([(header::CONTENT_TYPE, "text/javascript")], js.clone()).into_response(),
        None => StatusCode::NOT_FOUND.into_response(),
    }
}

async fn health(State(d): State<Arc<Deployment>>) -> Json<serde_json::Value> {
    Json(json!({
        "status": "ok",
        "survey_id": d.survey.survey_id,
        "source_digest": d.survey.source_digest,
        "records": d.store.len(),
    }))
}

async fn response(State(d): State<Arc<Deployment>>, body: Bytes) -> Response {
    submit(d, body, Terminal::Completed).await
}

async fn breakoff(State(d): State<Arc<Deployment>>, body: Bytes) -> Response {
    submit(d, body, Terminal::Breakoff).await
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

async fn submit(d: Arc<Deployment>, body: Bytes, terminal: Terminal) -> Response {
    let record: ResponseRecord = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid record: {e}")),
    };
    if record.terminal != terminal {
        return error(
            StatusCode::BAD_REQUEST,
            format!("terminal must be {terminal:?} on this endpoint"),
        );
    }
    if record.source_digest != d.survey.source_digest {
        return error(
            StatusCode::CONFLICT,
            "record is for a different version of this survey",
        );
    }
    if let Err(e) = record.validate_against(&d.survey) {
        return error(StatusCode::BAD_REQUEST, e.to_string());
    }
    let outcome = tokio::task::spawn_blocking(move || d.store.append(&record)).await;
    match outcome {
        Ok(Ok(AppendOutcome::Stored)) => (StatusCode::CREATED, Json(json!({ "status": "stored" }))).into_response(),
        Ok(Ok(AppendOutcome::Duplicate)) => (StatusCode::OK, Json(json!({ "status": "duplicate" }))).into_response(),
        Ok(Err(e)) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}
