use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use rsvp_core::analytics::AnalyticsError;
use rsvp_core::dashboard::DashboardError;
use rsvp_core::data_model::{IngestError, MetadataError};
use rsvp_core::design_space::EncodingError;
use rsvp_core::layout::LayoutError;
use rsvp_core::visrec::VisRecError;
use rsvp_core::UnknownName;
use serde::Serialize;

/// A caller-facing failure: a stable code plus a readable message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("{code}: {message}")]
pub struct ApiError {
    pub code: String,
    pub message: String,
}

impl ApiError {
    pub fn new(code: impl Into<String>, message: impl Into<String>) -> Self {
        ApiError {
            code: code.into(),
            message: message.into(),
        }
    }

    pub fn invalid_request(message: impl Into<String>) -> Self {
        ApiError::new("InvalidRequest", message)
    }

    pub fn status(&self) -> StatusCode {
        match self.code.as_str() {
            "SessionNotFound" | "UnknownView" => StatusCode::NOT_FOUND,
            "NotEditMode" => StatusCode::CONFLICT,
            "RunLimitExceeded" => StatusCode::PAYLOAD_TOO_LARGE,
            "InvalidRequest" => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

macro_rules! from_coded {
    ($($t:ty),*) => {$(
        impl From<$t> for ApiError {
            fn from(e: $t) -> Self {
                ApiError::new(e.code(), e.to_string())
            }
        }
    )*};
}

from_coded!(
    IngestError,
    MetadataError,
    EncodingError,
    LayoutError,
    VisRecError,
    DashboardError,
    AnalyticsError
);

impl From<UnknownName> for ApiError {
    fn from(e: UnknownName) -> Self {
        ApiError::invalid_request(e.to_string())
    }
}
