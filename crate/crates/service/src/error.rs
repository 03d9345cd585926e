use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use spi_discovery::monotone::MonotoneError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ApiError {
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("no session `{0}`")]
    NotFound(String),
    #[error("{found} is not the pending question (pending: {})", .expected.as_deref().unwrap_or("none"))]
    OutOfOrder { expected: Option<String>, found: String },
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("answer {vector}={value} contradicts {conflicting}={conflicting_value}")]
    Inconsistent {
        vector: String,
        value: u8,
        conflicting: String,
        conflicting_value: u8,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::OutOfOrder { .. } | ApiError::NothingToUndo => StatusCode::CONFLICT,
            ApiError::Inconsistent { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::BadRequest(_) => "bad_request",
            ApiError::NotFound(_) => "not_found",
            ApiError::OutOfOrder { .. } => "out_of_order",
            ApiError::NothingToUndo => "nothing_to_undo",
            ApiError::Inconsistent { .. } => "inconsistent",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl From<MonotoneError> for ApiError {
    fn from(e: MonotoneError) -> Self {
        match e {
            MonotoneError::Inconsistent {
                vector,
                value,
                conflicting,
                conflicting_value,
            } => ApiError::Inconsistent {
                vector: vector.to_string(),
                value: value.into(),
                conflicting: conflicting.to_string(),
                conflicting_value: conflicting_value.into(),
            },
            MonotoneError::OutOfOrder { expected, found } => ApiError::OutOfOrder {
                expected: expected.map(|v| v.to_string()),
                found: found.to_string(),
            },
            MonotoneError::NothingToUndo => ApiError::NothingToUndo,
            other => ApiError::BadRequest(other.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        match &self {
            ApiError::OutOfOrder { expected, found } => {
                body["expected"] = json!(expected);
                body["found"] = json!(found);
            }
            ApiError::Inconsistent {
                vector,
                value,
                conflicting,
                conflicting_value,
            } => {
                body["vector"] = json!(vector);
                body["value"] = json!(value);
                body["conflicting"] = json!({ "vector": conflicting, "value": conflicting_value });
            }
            _ => {}
        }
        (self.status(), Json(body)).into_response()
    }
}
