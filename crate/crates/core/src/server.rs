//! HTTP session service: each session owns an independent REPL state.
//!
//! Routes: `POST /api/session`, `POST /api/session/{id}/input`,
//! `POST /api/session/{id}/load`, `GET /api/health`, and static files at `/`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::extract::{DefaultBodyLimit, Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;

use crate::interp::Limits;
use crate::oeis::SequenceFetcher;
use crate::prop::GenConfig;
use crate::repl::{OutputBlock, ReplState};

pub const MAX_INPUT_BYTES: usize = 64 * 1024;
pub const MAX_LOAD_BYTES: usize = 1024 * 1024;

#[derive(Clone)]
pub struct ServerConfig {
    pub max_sessions: usize,
    pub idle_timeout: Duration,
    /// Wall-clock limit for evaluating one request.
    pub request_timeout: Duration,
    pub gen: GenConfig,
    pub unicode: bool,
    /// Files loaded into every new session.
    pub prelude: Vec<(String, String)>,
    pub static_dir: PathBuf,
    pub fetcher: Arc<dyn SequenceFetcher>,
}

impl ServerConfig {
    pub fn new(fetcher: Arc<dyn SequenceFetcher>) -> Self {
        ServerConfig {
            max_sessions: 256,
            idle_timeout: Duration::from_secs(30 * 60),
            request_timeout: Duration::from_secs(5),
            gen: GenConfig::default(),
            unicode: true,
            prelude: Vec::new(),
            static_dir: PathBuf::from("static"),
            fetcher,
        }
    }

    fn fresh_state(&self) -> ReplState {
        let mut st = ReplState::new(self.fetcher.clone());
        st.config = self.gen;
        st.unicode = self.unicode;
        st.limits = Limits {
            timeout: Some(self.request_timeout),
            ..Limits::default()
        };
        if !self.prelude.is_empty() {
            st.load_sources(&self.prelude);
        }
        st
    }
}

struct Session {
    state: ReplState,
    last_active: Instant,
}

type SessionRef = Arc<tokio::sync::Mutex<Session>>;

struct AppState {
    config: ServerConfig,
    sessions: Mutex<HashMap<String, SessionRef>>,
}

impl AppState {
    /// Drop sessions idle for longer than the configured timeout.
    fn sweep(&self, sessions: &mut HashMap<String, SessionRef>) {
        let idle = self.config.idle_timeout;
        sessions.retain(|_, s| match s.try_lock() {
            Ok(s) => s.last_active.elapsed() <= idle,
            Err(_) => true,
        });
    }

    fn find(&self, id: &str) -> Option<SessionRef> {
        let mut sessions = self.sessions.lock().expect("session table");
        self.sweep(&mut sessions);
        sessions.get(id).cloned()
    }
}

#[derive(Serialize, Deserialize)]
pub struct SessionCreated {
    #[serde(rename = "sessionId")]
    pub session_id: String,
}

#[derive(Serialize, Deserialize)]
pub struct InputRequest {
    pub line: String,
}

#[derive(Serialize, Deserialize)]
pub struct SourceFile {
    pub name: String,
    pub contents: String,
}

#[derive(Serialize, Deserialize)]
pub struct LoadRequest {
    pub files: Vec<SourceFile>,
}

#[derive(Serialize, Deserialize)]
pub struct BlocksResponse {
    pub blocks: Vec<OutputBlock>,
}

fn status(code: StatusCode, msg: &str) -> Response {
    (code, msg.to_string()).into_response()
}

/// 128 bits from the thread-local CSPRNG, as hex.
fn new_session_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

async fn create_session(State(app): State<Arc<AppState>>) -> Response {
    let id = new_session_id();
    {
        let mut sessions = app.sessions.lock().expect("session table");
        app.sweep(&mut sessions);
        if sessions.len() >= app.config.max_sessions {
            return status(StatusCode::SERVICE_UNAVAILABLE, "too many sessions");
        }
        // Reserve the slot before the (possibly slow) prelude load.
        let placeholder = Session {
            state: ReplState::new(app.config.fetcher.clone()),
            last_active: Instant::now(),
        };
        sessions.insert(id.clone(), Arc::new(tokio::sync::Mutex::new(placeholder)));
    }
    let config = app.config.clone();
    let state = tokio::task::spawn_blocking(move || config.fresh_state())
        .await
        .expect("session setup");
    if let Some(s) = app.find(&id) {
        let mut s = s.lock().await;
        s.state = state;
        s.last_active = Instant::now();
    }
    Json(SessionCreated { session_id: id }).into_response()
}

/// Run `f` on the session's state off the async runtime, serialized with
/// the session's other requests.
async fn with_session(
    app: &AppState,
    id: &str,
    f: impl FnOnce(&mut ReplState) -> Vec<OutputBlock> + Send + 'static,
) -> Response {
    let Some(session) = app.find(id) else {
        return status(StatusCode::NOT_FOUND, "no such session");
    };
    let mut guard = session.lock_owned().await;
    let blocks = tokio::task::spawn_blocking(move || {
        let blocks = f(&mut guard.state);
        guard.last_active = Instant::now();
        blocks
    })
    .await
    .expect("evaluation task");
    Json(BlocksResponse { blocks }).into_response()
}

async fn input(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<InputRequest>,
) -> Response {
    if req.line.len() > MAX_INPUT_BYTES {
        return status(StatusCode::PAYLOAD_TOO_LARGE, "input too large");
    }
    with_session(&app, &id, move |st| st.exec(&req.line)).await
}

async fn load(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<LoadRequest>,
) -> Response {
    let total: usize = req.files.iter().map(|f| f.contents.len()).sum();
    if total > MAX_LOAD_BYTES {
        return status(StatusCode::PAYLOAD_TOO_LARGE, "files too large");
    }
    let files: Vec<(String, String)> = req.files.into_iter().map(|f| (f.name, f.contents)).collect();
    with_session(&app, &id, move |st| st.load_sources(&files).blocks).await
}

async fn health() -> &'static str {
    "ok"
}

pub fn router(config: ServerConfig) -> Router {
    let static_dir = config.static_dir.clone();
    let app = Arc::new(AppState {
        config,
        sessions: Mutex::new(HashMap::new()),
    });
    // JSON escaping can double the size of the payload it carries.
    Router::new()
        .route("/api/health", get(health))
        .route("/api/session", post(create_session))
        .route(
            "/api/session/{id}/input",
            post(input).layer(DefaultBodyLimit::max(4 * MAX_INPUT_BYTES)),
        )
        .route(
            "/api/session/{id}/load",
            post(load).layer(DefaultBodyLimit::max(4 * MAX_LOAD_BYTES)),
        )
        .fallback_service(ServeDir::new(static_dir))
        .with_state(app)
}

pub async fn serve(addr: SocketAddr, config: ServerConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}
