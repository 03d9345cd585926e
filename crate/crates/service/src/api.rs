use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::IntoResponse;
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::session::{AnswerOutcome, ModelView, Progress, Question, Session, SessionRequest, SessionView, UndoOutcome};
use crate::store::{new_session_id, now_secs, SessionStore};

pub type AppState = Arc<SessionStore>;

/// Any body that fails to parse is a 400, whatever the reason.
fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

#[derive(Serialize, Deserialize)]
pub struct Created {
    pub id: String,
    pub stage: Option<String>,
    pub question: Option<Question>,
    pub progress: Progress,
}

pub async fn create_session(State(store): State<AppState>, body: Bytes) -> Result<impl IntoResponse, ApiError> {
    let request: SessionRequest = parse_body(&body)?;
    let session = Session::create(new_session_id(), &request, now_secs())?;
    let created = Created {
        id: session.id.clone(),
        stage: session.stage().map(str::to_owned),
        question: session.question(),
        progress: session.progress(),
    };
    store.insert(session)?;
    Ok((StatusCode::CREATED, Json(created)))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnswerValue {
    Bool(bool),
    Int(u8),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRequest {
    vector: String,
    value: AnswerValue,
}

pub async fn answer(
    State(store): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<AnswerOutcome>, ApiError> {
    let request: AnswerRequest = parse_body(&body)?;
    let value = match request.value {
        AnswerValue::Bool(b) => b,
        AnswerValue::Int(0) => false,
        AnswerValue::Int(1) => true,
        AnswerValue::Int(other) => return Err(ApiError::BadRequest(format!("value {other} is not 0 or 1"))),
    };
    let now = now_secs();
    store.update(&id, |s| s.answer(&request.vector, value, now)).map(Json)
}

pub async fn undo(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<UndoOutcome>, ApiError> {
    let now = now_secs();
    store.update(&id, |s| s.undo(now)).map(Json)
}

pub async fn get_session(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    store.read(&id, Session::view).map(Json)
}

pub async fn get_model(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<ModelView>, ApiError> {
    store.read(&id, Session::model).map(Json)
}
