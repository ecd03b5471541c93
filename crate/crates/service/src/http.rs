//! JSON routes. Seats authenticate with `X-Seat-Token`, the session owner
//! with `X-Admin-Token`.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use decoynet::session::{to_csv_string, SessionConfig};
use decoynet::Action;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::live::{LiveOptions, LiveSession, Phase, SeatToken};
use crate::{validate_session_id, ServiceError};

pub const SEAT_HEADER: &str = "x-seat-token";
pub const ADMIN_HEADER: &str = "x-admin-token";

type Clock = Arc<dyn Fn() -> u64 + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<Mutex<HashMap<String, LiveSession>>>,
    data_dir: Option<PathBuf>,
    clock: Clock,
}

fn wall_clock_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl AppState {
    /// In-memory only; nothing survives the process.
    pub fn ephemeral() -> Self {
        AppState {
            sessions: Default::default(),
            data_dir: None,
            clock: Arc::new(wall_clock_ms),
        }
    }

    /// Persists under `dir`, replaying every `*.jsonl` log already there.
    pub fn open(dir: &Path) -> Result<Self, ServiceError> {
        std::fs::create_dir_all(dir)?;
        let mut sessions = HashMap::new();
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
            .collect();
        paths.sort();
        for path in paths {
            let s = LiveSession::recover(&path)?;
            tracing::info!(session = s.id(), "recovered");
            sessions.insert(s.id().to_string(), s);
        }
        Ok(AppState {
            sessions: Arc::new(Mutex::new(sessions)),
            data_dir: Some(dir.to_path_buf()),
            clock: Arc::new(wall_clock_ms),
        })
    }

    pub fn with_clock(mut self, clock: impl Fn() -> u64 + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    pub fn now(&self) -> u64 {
        (self.clock)()
    }

    fn lock(&self) -> MutexGuard<'_, HashMap<String, LiveSession>> {
        self.sessions.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn create(
        &self,
        id: Option<String>,
        config: SessionConfig,
        options: LiveOptions,
    ) -> Result<CreatedSession, ServiceError> {
        let id = match id {
            Some(id) => {
                validate_session_id(&id)?;
                id
            }
            None => format!("s{}", &crate::live::new_token()[..12]),
        };
        let mut sessions = self.lock();
        if sessions.contains_key(&id) {
            return Err(ServiceError::DuplicateSession(id));
        }
        let event = LiveSession::creation_event(&id, config, options, self.now())?;
        let session = LiveSession::create(event, self.data_dir.as_deref())?;
        let created = CreatedSession {
            session_id: id.clone(),
            admin_token: session.admin_token().to_string(),
            seats: session.tokens().to_vec(),
        };
        sessions.insert(id, session);
        Ok(created)
    }

    pub fn with_session<R>(
        &self,
        id: &str,
        f: impl FnOnce(&mut LiveSession) -> Result<R, ServiceError>,
    ) -> Result<R, ServiceError> {
        let mut sessions = self.lock();
        let s = sessions
            .get_mut(id)
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))?;
        f(s)
    }

    /// Applies expired deadlines in every session.
    pub fn tick(&self) {
        let now = self.now();
        for (id, s) in self.lock().iter_mut() {
            if let Err(e) = s.tick(now) {
                tracing::error!(session = id.as_str(), error = %e, "tick failed");
            }
        }
    }

    pub fn spawn_ticker(&self, every: Duration) -> tokio::task::JoinHandle<()> {
        let state = self.clone();
        tokio::spawn(async move {
            let mut interval = tokio::time::interval(every);
            loop {
                interval.tick().await;
                state.tick();
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CreatedSession {
    pub session_id: String,
    pub admin_token: String,
    pub seats: Vec<SeatToken>,
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub session_id: Option<String>,
    pub config: SessionConfig,
    #[serde(default)]
    pub options: LiveOptions,
}

#[derive(Debug, Deserialize)]
pub struct ChoiceRequest {
    #[serde(default)]
    pub part: Option<u8>,
    pub round: u32,
    pub action: Action,
}

#[derive(Debug, Serialize)]
struct ChoiceResponse {
    accepted: bool,
    phase: Phase,
}

#[derive(Debug, Deserialize)]
struct LogQuery {
    #[serde(default)]
    format: Option<String>,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

fn header_token<'a>(headers: &'a HeaderMap, name: &str) -> Result<&'a str, ServiceError> {
    headers
        .get(name)
        .and_then(|v| v.to_str().ok())
        .ok_or(ServiceError::BadToken)
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(summary))
        .route("/sessions/{id}/join", post(join))
        .route("/sessions/{id}/state", get(seat_state))
        .route("/sessions/{id}/choices", post(submit))
        .route("/sessions/{id}/continue", post(continue_round))
        .route("/sessions/{id}/log", get(download_log))
        .with_state(state)
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<CreatedSession>), ServiceError> {
    let Json(req) = body.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    let created = state.create(req.session_id, req.config, req.options)?;
    tracing::info!(session = created.session_id.as_str(), "created");
    Ok((StatusCode::CREATED, Json(created)))
}

async fn summary(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Response, ServiceError> {
    state.with_session(&id, |s| Ok(Json(s.summary()).into_response()))
}

async fn join(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let token = header_token(&headers, SEAT_HEADER)?;
    let now = state.now();
    state.with_session(&id, |s| Ok(Json(s.join(token, now)?).into_response()))
}

async fn seat_state(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let token = header_token(&headers, SEAT_HEADER)?;
    let now = state.now();
    state.with_session(&id, |s| Ok(Json(s.view(token, now)?).into_response()))
}

async fn submit(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
    body: Result<Json<ChoiceRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<Response, ServiceError> {
    let token = header_token(&headers, SEAT_HEADER)?;
    let now = state.now();
    state.with_session(&id, |s| {
        // Authenticate before looking at the body.
        s.seat_for(token)?;
        let Json(req) = body.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
        let phase = s.submit(token, req.part, req.round, req.action, now)?;
        Ok(Json(ChoiceResponse { accepted: true, phase }).into_response())
    })
}

async fn continue_round(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let token = header_token(&headers, SEAT_HEADER)?;
    let now = state.now();
    state.with_session(&id, |s| Ok(Json(s.continue_round(token, now)?).into_response()))
}

async fn download_log(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<LogQuery>,
    headers: HeaderMap,
) -> Result<Response, ServiceError> {
    let token = header_token(&headers, ADMIN_HEADER)?;
    state.with_session(&id, |s| {
        if !s.is_admin(token) {
            return Err(ServiceError::BadToken);
        }
        let records = s.records();
        match q.format.as_deref().unwrap_or("csv") {
            "csv" => {
                let body = to_csv_string(&records);
                Ok(([(header::CONTENT_TYPE, "text/csv")], body).into_response())
            }
            "jsonl" => {
                let mut body = String::new();
                for r in &records {
                    body.push_str(&serde_json::to_string(r).map_err(|e| ServiceError::Log(e.to_string()))?);
                    body.push('\n');
                }
                Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
            }
            other => Err(ServiceError::BadRequest(format!("unknown log format {other:?}"))),
        }
    })
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(addr: SocketAddr, data_dir: Option<&Path>) -> Result<(), ServiceError> {
    let state = match data_dir {
        Some(dir) => AppState::open(dir)?,
        None => AppState::ephemeral(),
    };
    let _ticker = state.spawn_ticker(Duration::from_millis(250));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(state)).await?;
    Ok(())
}
