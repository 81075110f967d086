use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use ndk_core::dialogue::DialogueError;
use ndk_core::text::ParseError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("parse error at {0}")]
    Parse(ParseError),
    #[error("{0}")]
    NotValid(DialogueError),
    #[error("judgement index {index} out of range ({count} judgements)")]
    BadIndex { index: usize, count: usize },
    #[error("no problem text given and no corpus loaded")]
    NoProblem,
    #[error("unknown session `{0}`")]
    UnknownSession(String),
    #[error("illegal move `{label}`")]
    IllegalMove { label: String, legal: Vec<String> },
    #[error("unsupported protocol version `{0}`")]
    Protocol(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<DialogueError> for ApiError {
    fn from(e: DialogueError) -> Self {
        match e {
            DialogueError::IllegalMove { label, legal } => ApiError::IllegalMove { label, legal },
            other => ApiError::NotValid(other),
        }
    }
}

impl ApiError {
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::Parse(_) => "ParseError",
            ApiError::NotValid(DialogueError::NoNormalForm(_)) => "NoNormalForm",
            ApiError::NotValid(_) => "NotValid",
            ApiError::BadIndex { .. } => "BadIndex",
            ApiError::NoProblem => "NoProblem",
            ApiError::UnknownSession(_) => "UnknownSession",
            ApiError::IllegalMove { .. } => "IllegalMove",
            ApiError::Protocol(_) => "UnsupportedProtocol",
            ApiError::Io(_) => "Internal",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::IllegalMove { .. } => StatusCode::CONFLICT,
            ApiError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        match &self {
            ApiError::Parse(p) => {
                body["line"] = json!(p.line);
                body["col"] = json!(p.col);
            }
            ApiError::NotValid(DialogueError::NotValid(c)) => {
                body["path"] = json!(ndk_core::reducer::render_path(&c.path));
            }
            ApiError::IllegalMove { legal, .. } => body["legal"] = json!(legal),
            _ => {}
        }
        (self.status(), Json(body)).into_response()
    }
}
