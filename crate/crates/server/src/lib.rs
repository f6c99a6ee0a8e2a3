//! HTTP service over the environment: sessions, pages, actions, results,
//! client log ingestion, registry export, and static `/ui/*` files for the
//! browser frontend.

use std::net::SocketAddr;
use std::path::{Component, Path, PathBuf};
use std::sync::Arc;

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use websuite_core::environment::{ActionCommand, EnvError, Environment};
use websuite_core::taxonomy::canonical_registry;

pub const DEFAULT_PORT: u16 = 8000;

#[derive(Clone)]
struct AppState {
    env: Arc<Environment>,
    ui_root: Option<Arc<PathBuf>>,
}

/// Error body: `{"error": message, "kind": name}`.
struct ApiError(EnvError);

impl From<EnvError> for ApiError {
    fn from(e: EnvError) -> Self {
        ApiError(e)
    }
}

fn error_kind(e: &EnvError) -> &'static str {
    match e {
        EnvError::UnknownTask(_) => "unknown_task",
        EnvError::UnknownSession(_) => "unknown_session",
        EnvError::NotFound(_) => "not_found",
        EnvError::UnknownElement(_) => "unknown_element",
        EnvError::IncompatibleVerb { .. } => "incompatible_verb",
        EnvError::MalformedCommand(_) => "malformed_command",
        EnvError::InvalidPayload(_) => "invalid_payload",
        EnvError::MalformedCart => "malformed_cart",
        EnvError::MalformedShipping => "malformed_shipping",
        EnvError::Busy => "busy",
        EnvError::Log(_) => "log",
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            EnvError::UnknownTask(_) | EnvError::UnknownSession(_) | EnvError::NotFound(_) => StatusCode::NOT_FOUND,
            EnvError::Busy => StatusCode::CONFLICT,
            EnvError::Log(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let body = json!({ "error": self.0.to_string(), "kind": error_kind(&self.0) });
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Deserialize)]
struct NewSession {
    task_id: String,
}

async fn create_session(State(s): State<AppState>, Json(req): Json<NewSession>) -> ApiResult<impl Serialize> {
    Ok(Json(s.env.create_session(&req.task_id)?))
}

#[derive(Deserialize)]
struct PageQuery {
    session: String,
    /// Renders this path instead of the current one, without moving.
    path: Option<String>,
}

async fn page(State(s): State<AppState>, Query(q): Query<PageQuery>) -> ApiResult<impl Serialize> {
    let doc = match q.path {
        Some(path) => s.env.render_page(&q.session, &path)?,
        None => s.env.current_page(&q.session)?,
    };
    Ok(Json(doc))
}

#[derive(Deserialize)]
struct ActionRequest {
    session: String,
    #[serde(flatten)]
    command: ActionCommand,
}

async fn action(State(s): State<AppState>, Json(req): Json<ActionRequest>) -> ApiResult<impl Serialize> {
    Ok(Json(s.env.apply_action(&req.session, &req.command)?))
}

#[derive(Deserialize)]
struct SessionQuery {
    session: String,
}

async fn result(State(s): State<AppState>, Query(q): Query<SessionQuery>) -> ApiResult<impl Serialize> {
    Ok(Json(s.env.result(&q.session)?))
}

#[derive(Deserialize)]
struct LogRequest {
    session_id: String,
    ref_path: String,
    payload: String,
    client_ms: u64,
}

#[derive(Serialize)]
struct LogAck {
    seq: u64,
}

async fn ingest(State(s): State<AppState>, Json(req): Json<LogRequest>) -> ApiResult<LogAck> {
    let seq = s
        .env
        .ingest_log(&req.session_id, &req.ref_path, &req.payload, req.client_ms)?;
    Ok(Json(LogAck { seq }))
}

async fn taxonomy() -> Response {
    (
        [(header::CONTENT_TYPE, "application/json")],
        canonical_registry().export_json(),
    )
        .into_response()
}

async fn tasks(State(s): State<AppState>) -> Json<serde_json::Value> {
    Json(s.env.suite().manifest())
}

fn content_type(path: &Path) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("html") => "text/html; charset=utf-8",
        Some("js" | "mjs") => "text/javascript",
        Some("css") => "text/css",
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("png") => "image/png",
        _ => "application/octet-stream",
    }
}

/// Joins a request path under `root`, refusing anything but plain names.
fn resolve(root: &Path, rel: &str) -> Option<PathBuf> {
    let rel = Path::new(rel);
    if !rel.components().all(|c| matches!(c, Component::Normal(_))) {
        return None;
    }
    let mut path = root.join(rel);
    if path.is_dir() || rel.as_os_str().is_empty() {
        path = path.join("index.html");
    }
    Some(path)
}

async fn serve_ui(State(s): State<AppState>, rel: Option<UrlPath<String>>) -> Response {
    let rel = rel.map(|UrlPath(p)| p).unwrap_or_default();
    let Some(path) = s.ui_root.as_deref().and_then(|root| resolve(root, &rel)) else {
        return StatusCode::NOT_FOUND.into_response();
    };
    match tokio::fs::read(&path).await {
        Ok(bytes) => ([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response(),
        Err(_) => StatusCode::NOT_FOUND.into_response(),
    }
}

/// The full route table. `ui_root` is the built frontend, if any.
pub fn router(env: Arc<Environment>, ui_root: Option<PathBuf>) -> Router {
    let state = AppState {
        env,
        ui_root: ui_root.map(Arc::new),
    };
    Router::new()
        .route("/api/session", post(create_session))
        .route("/api/page", get(page))
        .route("/api/action", post(action))
        .route("/api/result", get(result))
        .route("/api/log", post(ingest))
        .route("/api/taxonomy", get(taxonomy))
        .route("/api/tasks", get(tasks))
        .route("/ui", get(serve_ui))
        .route("/ui/", get(serve_ui))
        .route("/ui/{*path}", get(serve_ui))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, app: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolve_rejects_traversal() {
        let root = Path::new("/srv/ui");
        assert_eq!(resolve(root, "app.js"), Some(root.join("app.js")));
        assert_eq!(resolve(root, "../secret"), None);
        assert_eq!(resolve(root, "/etc/passwd"), None);
        assert_eq!(resolve(root, ""), Some(root.join("index.html")));
    }

    #[test]
    fn agent_faults_are_unprocessable() {
        let r = ApiError(EnvError::UnknownElement("x".into())).into_response();
        assert_eq!(r.status(), StatusCode::UNPROCESSABLE_ENTITY);
        let r = ApiError(EnvError::UnknownSession("x".into())).into_response();
        assert_eq!(r.status(), StatusCode::NOT_FOUND);
        let r = ApiError(EnvError::Busy).into_response();
        assert_eq!(r.status(), StatusCode::CONFLICT);
    }
}
