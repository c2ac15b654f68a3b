use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;

use draftgame::DraftError;

/// Rendered as `{"error": {"code", "message"}}`.
#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn conflict(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<DraftError> for ApiError {
    fn from(e: DraftError) -> Self {
        let (status, code) = match &e {
            DraftError::UnknownAgent(_) => (StatusCode::NOT_FOUND, "unknown_agent"),
            DraftError::InvalidPosition(_) => (StatusCode::CONFLICT, "illegal_move"),
            DraftError::TooLarge(_) => (StatusCode::BAD_REQUEST, "instance_too_large"),
            DraftError::BudgetExceeded { .. } => (StatusCode::SERVICE_UNAVAILABLE, "budget_exceeded"),
            DraftError::Parse { .. } | DraftError::DimensionMismatch { .. } | DraftError::DuplicateId(_) => {
                (StatusCode::BAD_REQUEST, "invalid_instance")
            }
            DraftError::Precondition(_) => (StatusCode::CONFLICT, "precondition"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"code": self.code, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}
