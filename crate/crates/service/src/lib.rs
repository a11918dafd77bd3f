//! JSON-over-HTTP session service for stepping through mutations and flips.
//!
//! Endpoints:
//!
//! - `POST /sessions` with `{"quiver": {...}}` or `{"polygon": {"m": .., "diagonals": [..]}}`
//! - `GET /sessions/{id}`
//! - `POST /sessions/{id}/moves` with `{"vertex": k}` or `{"diagonal": [i, j]}`
//! - `POST /sessions/{id}/undo`
//! - `GET /sessions/{id}/export`
//!
//! Malformed input is 400, an unknown session 404, and a move the current
//! state does not allow (frozen or missing vertex, absent diagonal) 422.

pub mod session;

use std::net::SocketAddr;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use lru::LruCache;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

pub use session::{CreateRequest, Move, MoveRequest, Session, SessionError};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub capacity: usize,
    pub idle_ttl: Duration,
    /// Served at `/` when set (the browser client's build output).
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { capacity: 256, idle_ttl: Duration::from_secs(3600), static_dir: None }
    }
}

struct Entry {
    session: Arc<Mutex<Session>>,
    touched: Instant,
}

/// In-memory sessions, least recently used evicted first. Each session has
/// its own lock, so moves on one session are serialized.
pub struct SessionStore {
    inner: Mutex<LruCache<String, Entry>>,
    idle_ttl: Duration,
}

impl SessionStore {
    pub fn new(capacity: usize, idle_ttl: Duration) -> Self {
        let cap = NonZeroUsize::new(capacity.max(1)).unwrap();
        SessionStore { inner: Mutex::new(LruCache::new(cap)), idle_ttl }
    }

    pub fn insert(&self, session: Session) -> (String, Arc<Mutex<Session>>) {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Arc::new(Mutex::new(session));
        let entry = Entry { session: session.clone(), touched: Instant::now() };
        self.inner.lock().unwrap().put(id.clone(), entry);
        (id, session)
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        let mut cache = self.inner.lock().unwrap();
        let expired = cache.peek(id)?.touched.elapsed() > self.idle_ttl;
        if expired {
            cache.pop(id);
            return None;
        }
        let entry = cache.get_mut(id)?;
        entry.touched = Instant::now();
        Some(entry.session.clone())
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug)]
pub enum ApiError {
    BadRequest(String),
    NotFound(String),
    Unprocessable(String),
    Internal(String),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Malformed(m) => ApiError::BadRequest(m),
            SessionError::InvalidMove(m) => ApiError::Unprocessable(m),
            SessionError::Internal(m) => ApiError::Internal(m),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, detail) = match self {
            ApiError::BadRequest(d) => (StatusCode::BAD_REQUEST, "malformed", d),
            ApiError::NotFound(d) => (StatusCode::NOT_FOUND, "not_found", d),
            ApiError::Unprocessable(d) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid_move", d),
            ApiError::Internal(d) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", d),
        };
        (status, Json(json!({ "error": kind, "detail": detail }))).into_response()
    }
}

type AppState = Arc<SessionStore>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

fn lookup(store: &SessionStore, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
    store.get(id).ok_or_else(|| ApiError::NotFound(format!("no session {id}")))
}

async fn create(State(store): State<AppState>, body: Bytes) -> Result<(StatusCode, Json<Value>), ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    let session = Session::create(req)?;
    let (id, s) = store.insert(session);
    let view = s.lock().unwrap().view(&id);
    Ok((StatusCode::CREATED, Json(view)))
}

async fn show(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = lookup(&store, &id)?;
    let view = s.lock().unwrap().view(&id);
    Ok(Json(view))
}

/// Runs `f` on the locked session off the async workers; mutations can be slow.
async fn with_session<F>(store: AppState, id: String, f: F) -> Result<Json<Value>, ApiError>
where
    F: FnOnce(&mut Session) -> Result<(), SessionError> + Send + 'static,
{
    let s = lookup(&store, &id)?;
    tokio::task::spawn_blocking(move || {
        let mut guard = s.lock().unwrap();
        f(&mut guard)?;
        Ok(Json(guard.view(&id)))
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn apply_move(State(store): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Json<Value>, ApiError> {
    let mv: MoveRequest = parse_body(&body)?;
    with_session(store, id, move |s| s.apply(mv)).await
}

async fn undo(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    with_session(store, id, |s| s.undo()).await
}

async fn export(State(store): State<AppState>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let s = lookup(&store, &id)?;
    let body = s.lock().unwrap().export(&id);
    Ok(Json(body))
}

pub fn router(config: &ServiceConfig) -> Router {
    let store = Arc::new(SessionStore::new(config.capacity, config.idle_ttl));
    let api = Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/moves", post(apply_move))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/export", get(export))
        .with_state(store);
    match &config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(&config)).await
}

#[cfg(test)]
mod tests {
    use super::*;
    use ptolemy_core::Quiver;

    fn session() -> Session {
        Session::create(CreateRequest { quiver: Some(Quiver::path(2)), polygon: None, include_boundary: None }).unwrap()
    }

    #[test]
    fn least_recently_used_session_is_evicted() {
        let store = SessionStore::new(2, Duration::from_secs(60));
        let (a, _) = store.insert(session());
        let (b, _) = store.insert(session());
        assert!(store.get(&a).is_some());
        let (c, _) = store.insert(session());
        assert_eq!(store.len(), 2);
        assert!(store.get(&b).is_none());
        assert!(store.get(&a).is_some() && store.get(&c).is_some());
    }
}
