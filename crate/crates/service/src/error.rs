//! Mapping engine errors onto HTTP statuses. Every error body is a JSON
//! object with at least an `error` message.

use anp_core::model::JudgmentEditError;
use anp_core::network::ValidationReport;
use anp_core::{ModelError, SolveError, SupermatrixError};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::{json, Map, Value};

use crate::store::StoreError;

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: Map<String, Value>,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        let mut body = Map::new();
        body.insert("error".into(), Value::String(message.into()));
        Self { status, body }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body.insert(key.into(), value);
        self
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    pub fn bad_request(message: impl Into<String>, path: &str) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message).with("path", json!(path))
    }

    pub fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, message)
    }

    pub fn conflict(expected: u64, current: u64) -> Self {
        Self::new(
            StatusCode::CONFLICT,
            format!("revision conflict: request was based on revision {expected}, model is at {current}"),
        )
        .with("revision", json!(current))
    }

    pub fn invalid(report: &ValidationReport) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "network is invalid")
            .with("violations", json!(report.violations))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(Value::Object(self.body))).into_response()
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::SchemaError { path, .. } => Self::bad_request(e.to_string(), path),
            ModelError::UnsupportedVersion(_) => Self::bad_request(e.to_string(), "format_version"),
        }
    }
}

impl From<JudgmentEditError> for ApiError {
    fn from(e: JudgmentEditError) -> Self {
        match e {
            JudgmentEditError::UnknownSlot(_) | JudgmentEditError::UnknownPair(..) => {
                Self::not_found(e.to_string())
            }
            JudgmentEditError::OffScale(_) => Self::unprocessable(e.to_string()),
        }
    }
}

impl From<SolveError> for ApiError {
    fn from(e: SolveError) -> Self {
        match &e {
            SolveError::Incomplete(slots) => Self::new(StatusCode::CONFLICT, e.to_string()).with(
                "slots",
                json!(slots.iter().map(ToString::to_string).collect::<Vec<_>>()),
            ),
            SolveError::Inconsistent(failures) => {
                Self::unprocessable(e.to_string()).with("failures", json!(failures))
            }
            SolveError::Invalid(report) => Self::invalid(report),
            SolveError::Supermatrix(SupermatrixError::IncompleteModel(slots)) => {
                Self::new(StatusCode::CONFLICT, e.to_string()).with(
                    "slots",
                    json!(slots.iter().map(ToString::to_string).collect::<Vec<_>>()),
                )
            }
            _ => Self::unprocessable(e.to_string()),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string())
    }
}
