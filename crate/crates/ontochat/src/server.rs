//! JSON HTTP API over [`ChatService`].

use std::net::SocketAddr;
use std::sync::Arc;
use std::thread::JoinHandle;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::oneshot;

use crate::chat::{ChatService, ServiceError};

#[derive(Deserialize)]
struct CreateSession {
    ontology_id: String,
    #[serde(default = "yes")]
    comments: bool,
}

fn yes() -> bool {
    true
}

#[derive(Deserialize)]
struct Ask {
    question: String,
}

struct ApiError(ServiceError);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            ServiceError::UnknownSession(_) | ServiceError::UnknownOntology(_) => StatusCode::NOT_FOUND,
            ServiceError::EmptyQuestion => StatusCode::UNPROCESSABLE_ENTITY,
            ServiceError::Provider(_) => StatusCode::BAD_GATEWAY,
            ServiceError::Persistence { .. } | ServiceError::CorruptLog { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

type Shared = State<Arc<ChatService>>;

pub fn router(service: Arc<ChatService>) -> Router {
    Router::new()
        .route("/healthz", get(|| async { "ok" }))
        .route("/api/ontologies", get(ontologies))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}/ask", post(ask))
        .route("/api/sessions/{id}/history", get(history))
        .with_state(service)
}

async fn ontologies(State(service): Shared) -> impl IntoResponse {
    Json(service.ontologies())
}

async fn create_session(State(service): Shared, Json(body): Json<CreateSession>) -> Result<impl IntoResponse, ApiError> {
    let session = service.create_session(&body.ontology_id, body.comments)?;
    Ok(Json(json!({
        "session_id": session.id,
        "ontology_id": session.ontology_id,
        "comment_policy": session.comment_policy,
        "created_at": session.created_at,
    })))
}

async fn ask(State(service): Shared, Path(id): Path<String>, Json(body): Json<Ask>) -> Result<impl IntoResponse, ApiError> {
    // Translation and remote execution block on network IO.
    let record = tokio::task::spawn_blocking(move || service.ask(&id, &body.question))
        .await
        .map_err(|e| ApiError(ServiceError::Provider(e.to_string())))??;
    Ok(Json(record))
}

async fn history(State(service): Shared, Path(id): Path<String>) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(service.history(&id)?))
}

/// Serves `router` until the process receives Ctrl-C.
pub async fn serve(router: Router, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

/// A server running on its own thread and runtime.
pub struct BackgroundServer {
    pub addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl BackgroundServer {
    pub fn start(router: Router, addr: SocketAddr) -> std::io::Result<Self> {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()?;
        let listener = runtime.block_on(tokio::net::TcpListener::bind(addr))?;
        let addr = listener.local_addr()?;
        let (tx, rx) = oneshot::channel::<()>();
        let thread = std::thread::spawn(move || {
            runtime.block_on(async move {
                let _ = axum::serve(listener, router)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await;
            });
        });
        Ok(BackgroundServer {
            addr,
            shutdown: Some(tx),
            thread: Some(thread),
        })
    }

    pub fn url(&self, path: &str) -> String {
        format!("http://{}{path}", self.addr)
    }
}

impl Drop for BackgroundServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}
