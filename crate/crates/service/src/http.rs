//! JSON HTTP surface for the chat UI.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tower_http::cors::CorsLayer;

use crate::chat::{ChatRequest, ChatService};
use crate::ServiceError;

pub fn router(service: Arc<ChatService>) -> Router {
    Router::new()
        .route("/api/chat", post(chat))
        .route("/api/health", get(health))
        .route("/api/tools", get(tools))
        .fallback(not_found)
        .layer(CorsLayer::permissive())
        .with_state(service)
}

fn error_response(status: StatusCode, error: &ServiceError) -> Response {
    (status, Json(error.document())).into_response()
}

async fn chat(State(service): State<Arc<ChatService>>, body: Bytes) -> Response {
    // Parsed by hand so malformed bodies still get the JSON error shape.
    let request: ChatRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, &ServiceError::new("BadRequest", e.to_string())),
    };
    let outcome = tokio::task::spawn_blocking(move || service.chat(&request)).await;
    match outcome {
        Ok(Ok(resp)) => (StatusCode::OK, Json(resp)).into_response(),
        Ok(Err(f)) => {
            let status = StatusCode::from_u16(f.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
            error_response(status, &f.error)
        }
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, &ServiceError::new("InternalError", e.to_string())),
    }
}

async fn health(State(service): State<Arc<ChatService>>) -> Response {
    Json(json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "generator_available": service.generator_available(),
        "tools": service.registry().len(),
        "sessions": service.session_count(),
    }))
    .into_response()
}

async fn tools(State(service): State<Arc<ChatService>>) -> Response {
    Json(json!({ "tools": service.registry().descriptors() })).into_response()
}

async fn not_found() -> Response {
    error_response(StatusCode::NOT_FOUND, &ServiceError::new("NotFound", "no such endpoint"))
}

/// Serves until ctrl-c.
pub async fn serve(service: Arc<ChatService>, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    log::info!("chat service listening on {}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
