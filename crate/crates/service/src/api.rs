//! HTTP routes.

use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use riga_core::Answer;

use crate::error::ApiError;
use crate::session::{
    CreateRequest, Failure, QueryView, Recommendation, SessionState, SessionView,
};
use crate::store::Store;

/// How long a mutating request waits for the run to reach its next query.
pub const DEFAULT_WAIT_MS: u64 = 5_000;
pub const MAX_WAIT_MS: u64 = 60_000;

#[derive(Debug, Default, Deserialize)]
pub struct WaitParams {
    /// Milliseconds to wait while the session is `Computing`.
    pub wait_ms: Option<u64>,
}

impl WaitParams {
    fn duration(&self) -> Duration {
        Duration::from_millis(self.wait_ms.unwrap_or(DEFAULT_WAIT_MS).min(MAX_WAIT_MS))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub choice: Answer,
    /// Rejects the answer unless this query is the pending one.
    #[serde(default)]
    pub query_id: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct QueryResponse {
    pub state: SessionState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryView>,
    /// Where the recommendation lives once the session is `Finished`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(body);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let err = ApiError::bad_request("malformed_request", e.inner().to_string());
        if path == "." {
            err
        } else {
            err.with_field(path)
        }
    })
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(view))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/recommendation", get(recommendation))
        .with_state(store)
}

async fn healthz(State(store): State<Arc<Store>>) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "status": "ok", "sessions": store.len() }))
}

async fn create(
    State(store): State<Arc<Store>>,
    Query(wait): Query<WaitParams>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let request: CreateRequest = parse(&body)?;
    let session = store.create(request)?;
    session.settle(wait.duration()).await;
    Ok((StatusCode::CREATED, Json(session.view())))
}

async fn view(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> Result<Json<SessionView>, ApiError> {
    Ok(Json(store.get(&id)?.view()))
}

async fn query(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> Result<Json<QueryResponse>, ApiError> {
    let view = store.get(&id)?.view();
    Ok(Json(QueryResponse {
        state: view.state,
        query: view.pending,
        recommendation: (view.state == SessionState::Finished)
            .then(|| format!("/sessions/{id}/recommendation")),
        failure: view.failure,
    }))
}

async fn answer(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(wait): Query<WaitParams>,
    body: Bytes,
) -> Result<Json<SessionView>, ApiError> {
    let session = store.get(&id)?;
    let request: AnswerRequest = parse(&body)?;
    session.submit(request.choice, request.query_id)?;
    session.settle(wait.duration()).await;
    Ok(Json(session.view()))
}

async fn recommendation(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
) -> Result<Json<Recommendation>, ApiError> {
    Ok(Json(store.get(&id)?.recommendation()?))
}
