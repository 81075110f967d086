//! HTTP + server-sent-events front end for dialogue games.
//!
//! Every response carries `X-NDK-Protocol: 1`; requests that send the header
//! with another value are refused. See `docs/protocol.md` for the schema.

mod error;
mod session;
mod wire;

use std::collections::HashMap;
use std::convert::Infallible;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, Request, State};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;

pub use error::ApiError;
pub use session::{fold, initial_state, log_path, LogRecord, Session};

pub const PROTOCOL_HEADER: &str = "x-ndk-protocol";
pub const PROTOCOL_VERSION: &str = "1";

#[derive(Debug, Clone, Default)]
pub struct Config {
    /// Problem text used when a create request carries none.
    pub corpus: Option<String>,
    /// Directory of per-session log files.
    pub persist: Option<PathBuf>,
}

pub struct Gateway {
    config: Config,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
}

impl Gateway {
    /// Checks that the corpus parses and replays any persisted sessions.
    pub fn new(config: Config) -> Result<Gateway, ApiError> {
        if let Some(src) = &config.corpus {
            ndk_core::text::parse_problem(src).map_err(ApiError::Parse)?;
        }
        let mut sessions = HashMap::new();
        if let Some(dir) = &config.persist {
            std::fs::create_dir_all(dir)?;
            let mut paths: Vec<_> = std::fs::read_dir(dir)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            paths.sort();
            for p in paths {
                let s = Session::restore(&p)?;
                tracing::info!(session = %s.id, moves = s.event_count(), "restored");
                sessions.insert(s.id.clone(), Arc::new(s));
            }
        }
        Ok(Gateway { config, sessions: RwLock::new(sessions) })
    }

    pub fn create(&self, problem: Option<String>, index: usize) -> Result<Arc<Session>, ApiError> {
        let problem = problem.or_else(|| self.config.corpus.clone()).ok_or(ApiError::NoProblem)?;
        let s = Arc::new(Session::create(problem, index, self.config.persist.as_deref())?);
        tracing::info!(session = %s.id, index, "created");
        self.sessions.write().expect("sessions lock").insert(s.id.clone(), s.clone());
        Ok(s)
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().expect("sessions lock").len()
    }
}

#[derive(Debug, Deserialize)]
struct CreateRequest {
    problem: Option<String>,
    #[serde(default)]
    index: usize,
}

#[derive(Debug, Deserialize)]
struct MoveRequest {
    label: String,
}

#[derive(Debug, Deserialize)]
struct Cursor {
    cursor: Option<usize>,
}

async fn create_session(
    State(g): State<Arc<Gateway>>,
    Json(req): Json<CreateRequest>,
) -> Result<(StatusCode, Json<Value>), ApiError> {
    let s = g.create(req.problem, req.index)?;
    Ok((StatusCode::CREATED, Json(wire::state_view(&s))))
}

async fn get_session(State(g): State<Arc<Gateway>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(wire::state_view(&*g.get(&id)?)))
}

async fn get_attacks(State(g): State<Arc<Gateway>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let state = g.get(&id)?.snapshot();
    Ok(Json(json!({ "status": state.status.to_string(), "attacks": wire::moves_view(&state) })))
}

async fn post_move(
    State(g): State<Arc<Gateway>>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<Value>, ApiError> {
    let s = g.get(&id)?;
    let ev = s.post_move(&req.label)?;
    tracing::info!(session = %id, label = %req.label, "move");
    Ok(Json(ev))
}

/// Events after `cursor` (the id of the last event seen; 0 for all), then
/// live ones as they happen. `Last-Event-ID` is used when no cursor is given.
async fn stream_events(
    State(g): State<Arc<Gateway>>,
    Path(id): Path<String>,
    Query(q): Query<Cursor>,
    headers: HeaderMap,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let s = g.get(&id)?;
    let last = headers
        .get("last-event-id")
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.trim().parse().ok());
    let cursor = q.cursor.or(last).unwrap_or(0);
    let rx = s.subscribe();
    let stream = futures::stream::unfold((s, cursor, rx), |(s, seen, mut rx)| async move {
        loop {
            if let Some(ev) = s.event(seen + 1) {
                let event = Event::default().id((seen + 1).to_string()).event("move").data(ev.to_string());
                return Some((Ok(event), (s, seen + 1, rx)));
            }
            if rx.changed().await.is_err() {
                return None;
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

async fn protocol(req: Request, next: Next) -> Response {
    let sent = req.headers().get(PROTOCOL_HEADER).map(|v| v.to_str().unwrap_or("").to_string());
    let mut resp = match sent {
        Some(v) if v.trim() != PROTOCOL_VERSION => ApiError::Protocol(v).into_response(),
        _ => next.run(req).await,
    };
    resp.headers_mut().insert(PROTOCOL_HEADER, HeaderValue::from_static(PROTOCOL_VERSION));
    resp
}

pub fn router(g: Arc<Gateway>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/attacks", get(get_attacks))
        .route("/sessions/{id}/moves", post(post_move))
        .route("/sessions/{id}/events", get(stream_events))
        .layer(middleware::from_fn(protocol))
        .with_state(g)
}

/// Serves until ctrl-c.
pub async fn serve(listener: TcpListener, g: Arc<Gateway>) -> std::io::Result<()> {
    axum::serve(listener, router(g))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
