//! HTTP play service. A human supplies the cop half-rounds; the robber
//! strategy replies inside the same request.
//!
//! Routes, all JSON documents carrying `v`:
//! `POST /sessions`, `GET /sessions/{id}`, `POST /sessions/{id}/cops`,
//! `GET /sessions/{id}/trace` (JSON Lines) and `GET /arena/{id}`.

mod session;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tokio::sync::Mutex;

use pursuit_core::catalog::{Arena, RobberKind};
use pursuit_core::construction::{ConstructionParams, VertexRole};
use pursuit_core::{Error, VertexId};

pub use session::{AgentView, ArenaEntry, Session, TraceDocument, View, VIEW_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown arena {0}")]
    UnknownArena(String),
    #[error("session is busy with another request")]
    Busy,
    #[error("stale version {got}, session is at {current}")]
    Stale { got: u64, current: u64 },
    #[error(transparent)]
    Engine(#[from] Error),
}

impl ApiError {
    fn status(&self) -> (StatusCode, &'static str) {
        match self {
            ApiError::UnknownSession(_) | ApiError::UnknownArena(_) => (StatusCode::NOT_FOUND, "not_found"),
            ApiError::Busy | ApiError::Stale { .. } => (StatusCode::CONFLICT, "conflict"),
            ApiError::Engine(e) => match e {
                Error::WrongPhase { .. } => (StatusCode::CONFLICT, "wrong_phase"),
                Error::IllegalMove(_) | Error::WrongCopCount { .. } | Error::InvalidVertex(_) => {
                    (StatusCode::UNPROCESSABLE_ENTITY, "illegal_move")
                }
                Error::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "io"),
                _ => (StatusCode::BAD_REQUEST, "invalid_request"),
            },
        }
    }
}

#[derive(Serialize)]
struct ErrorBody {
    v: u32,
    error: &'static str,
    reason: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code) = self.status();
        let body = ErrorBody {
            v: VIEW_VERSION,
            error: code,
            reason: self.to_string(),
        };
        (status, Json(body)).into_response()
    }
}

#[derive(Clone, Debug, Default)]
pub struct ServiceConfig {
    /// Finished traces are written here as `<session>.jsonl`.
    pub trace_dir: Option<PathBuf>,
}

/// Shared state: the arena registry and the live sessions.
pub struct AppState {
    config: ServiceConfig,
    arenas: RwLock<BTreeMap<String, Arc<ArenaEntry>>>,
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

pub const DEMO_ARENA: &str = "demo";
pub const SURVIVAL_ARENA: &str = "g250";

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            config,
            arenas: RwLock::new(BTreeMap::new()),
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    /// Registers the small non-admissible UI arena (`G = 100`) and the
    /// admissible `G = 250` arena.
    pub fn with_default_arenas(config: ServiceConfig) -> pursuit_core::Result<Self> {
        let s = Self::new(config);
        s.add_arena(ArenaEntry::new(
            DEMO_ARENA,
            Arena::build(ConstructionParams::new(100, 10, 16))?,
            true,
        ));
        s.add_arena(ArenaEntry::new(
            SURVIVAL_ARENA,
            Arena::build(ConstructionParams::new(250, 10, 16))?,
            false,
        ));
        Ok(s)
    }

    pub fn add_arena(&self, entry: ArenaEntry) {
        self.arenas
            .write()
            .expect("arena lock")
            .insert(entry.id.clone(), Arc::new(entry));
    }

    pub fn arena(&self, id: &str) -> Result<Arc<ArenaEntry>, ApiError> {
        self.arenas
            .read()
            .expect("arena lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownArena(id.into()))
    }

    pub fn arena_ids(&self) -> Vec<String> {
        self.arenas.read().expect("arena lock").keys().cloned().collect()
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        self.sessions
            .read()
            .expect("session lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.into()))
    }
}

/// Arena by registered id, or an inline `build` / graph document.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ArenaRef {
    Id(String),
    Document(serde_json::Value),
}

impl Default for ArenaRef {
    fn default() -> Self {
        ArenaRef::Id(DEMO_ARENA.into())
    }
}

/// Robber by catalog name (`"evader"`) or tagged object.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum RobberRef {
    Name(String),
    Kind(RobberKind),
}

impl Default for RobberRef {
    fn default() -> Self {
        RobberRef::Kind(RobberKind::Evader)
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    #[serde(default)]
    pub arena: ArenaRef,
    pub k: usize,
    #[serde(default)]
    pub robber: RobberRef,
    #[serde(default)]
    pub max_rounds: Option<u64>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
pub struct PostCops {
    pub positions: Vec<VertexId>,
    /// When set, the post is rejected unless the session is at this version.
    #[serde(default)]
    pub version: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
pub struct ViewQuery {
    #[serde(default)]
    pub layout: bool,
}

#[derive(Serialize)]
struct ArenaView<'a> {
    v: u32,
    id: &'a str,
    demo: bool,
    n: usize,
    arcs: Vec<[u32; 2]>,
    layout: &'a [[f64; 2]],
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<ConstructionParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    admissibility: Option<pursuit_core::construction::Admissibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    roles: Option<&'a [VertexRole]>,
}

#[derive(Serialize)]
struct ArenaList {
    v: u32,
    arenas: Vec<String>,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_view))
        .route("/sessions/{id}/cops", post(post_cops))
        .route("/sessions/{id}/trace", get(get_trace))
        .route("/arena", get(list_arenas))
        .route("/arena/{id}", get(get_arena))
        .with_state(state)
}

pub async fn serve(addr: SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    Json(req): Json<CreateSession>,
) -> Result<(StatusCode, Json<View>), ApiError> {
    let arena = match req.arena {
        ArenaRef::Id(id) => app.arena(&id)?,
        ArenaRef::Document(doc) => {
            let arena = Arena::from_json(&doc.to_string())?;
            let id = format!("upload-{}", app.next_id.fetch_add(1, Ordering::Relaxed));
            let entry = ArenaEntry::new(id.clone(), arena, false);
            app.add_arena(entry);
            app.arena(&id)?
        }
    };
    let robber = match req.robber {
        RobberRef::Name(s) => s.parse()?,
        RobberRef::Kind(k) => k,
    };
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::Relaxed));
    let session = Session::new(id.clone(), arena, req.k, robber, req.max_rounds, req.seed)?;
    let view = session.view(false);
    app.sessions
        .write()
        .expect("session lock")
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(view)))
}

async fn get_view(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> Result<Json<View>, ApiError> {
    let s = app.session(&id)?;
    let s = s.lock().await;
    Ok(Json(s.view(q.layout)))
}

async fn post_cops(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Json(req): Json<PostCops>,
) -> Result<Json<View>, ApiError> {
    let s = app.session(&id)?;
    // concurrent posts are not queued: the loser sees a conflict
    let mut s = s.try_lock().map_err(|_| ApiError::Busy)?;
    if let Some(v) = req.version {
        if v != s.version {
            return Err(ApiError::Stale {
                got: v,
                current: s.version,
            });
        }
    }
    s.post_cops(req.positions)?;
    if s.finished() {
        if let Some(dir) = &app.config.trace_dir {
            std::fs::create_dir_all(dir).map_err(Error::from)?;
            std::fs::write(dir.join(format!("{}.jsonl", s.id)), s.trace_jsonl()?).map_err(Error::from)?;
        }
    }
    Ok(Json(s.view(false)))
}

async fn get_trace(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let s = app.session(&id)?;
    let s = s.lock().await;
    let body = s.trace_jsonl()?;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}

async fn list_arenas(State(app): State<Arc<AppState>>) -> Json<ArenaList> {
    Json(ArenaList {
        v: VIEW_VERSION,
        arenas: app.arena_ids(),
    })
}

async fn get_arena(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let entry = app.arena(&id)?;
    let c = entry.arena.construction.as_deref();
    let view = ArenaView {
        v: VIEW_VERSION,
        id: &entry.id,
        demo: entry.demo,
        n: entry.arena.vertex_count(),
        arcs: entry.arena.graph.arcs().iter().map(|&(a, b)| [a, b]).collect(),
        layout: &entry.layout,
        params: c.map(|c| c.params),
        admissibility: entry.admissibility(),
        roles: c.map(|c| c.roles.as_slice()),
    };
    Ok(Json(view).into_response())
}
