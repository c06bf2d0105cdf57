//! HTTP service backing editor features and remote checks.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sleec_core::diagnostics::RenderMode;
use sleec_core::sema::{analyze, completions, SymbolTable};

use crate::request::{run, BoundsOverride, CheckRequest, RequestError, Selector};

pub const DEFAULT_PORT: u16 = 8077;

pub fn router() -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/parse", post(parse))
        .route("/api/complete", post(complete))
        .route("/api/check", post(check))
}

pub async fn serve(port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    axum::serve(listener, router()).await
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({"error": message.into()}))).into_response()
}

fn body<T: DeserializeOwned>(raw: &str) -> Result<T, String> {
    serde_json::from_str(raw).map_err(|e| format!("malformed request: {e}"))
}

async fn health() -> Json<Value> {
    Json(json!({"status": "ok"}))
}

#[derive(Deserialize)]
struct ParseBody {
    text: String,
}

pub fn symbols(table: &SymbolTable) -> Vec<Value> {
    let mut out = Vec::new();
    for (name, e) in &table.events {
        out.push((
            e.span.start,
            json!({"name": name, "kind": "event", "start": e.span.start, "end": e.span.end}),
        ));
    }
    for (name, m) in &table.measures {
        out.push((
            m.span.start,
            json!({"name": name, "kind": "measure", "start": m.span.start, "end": m.span.end}),
        ));
    }
    for (name, c) in &table.constants {
        out.push((
            c.span.start,
            json!({"name": name, "kind": "constant", "start": c.span.start, "end": c.span.end}),
        ));
    }
    for (name, l) in &table.scale_labels {
        out.push((
            l.span.start,
            json!({"name": name, "kind": "scale_label", "start": l.span.start, "end": l.span.end}),
        ));
    }
    out.sort_by_key(|(s, _)| *s);
    out.into_iter().map(|(_, v)| v).collect()
}

async fn parse(raw: String) -> Response {
    let b: ParseBody = match body(&raw) {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let a = analyze(&b.text);
    Json(json!({"diagnostics": a.diagnostics(), "symbols": symbols(&a.table)})).into_response()
}

#[derive(Deserialize)]
struct CompleteBody {
    text: String,
    offset: usize,
}

async fn complete(raw: String) -> Response {
    let b: CompleteBody = match body(&raw) {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let mut offset = b.offset.min(b.text.len());
    while !b.text.is_char_boundary(offset) {
        offset -= 1;
    }
    Json(json!({"items": completions(&b.text, offset)})).into_response()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckBody {
    text: String,
    property: String,
    #[serde(default)]
    target: Option<String>,
    #[serde(default)]
    bounds: BoundsOverride,
    #[serde(default)]
    mode: Option<String>,
}

pub fn parse_mode(s: &str) -> Option<RenderMode> {
    match s {
        "raw" => Some(RenderMode::Raw),
        "filtered" => Some(RenderMode::Filtered),
        _ => None,
    }
}

async fn check(raw: String) -> Response {
    let b: CheckBody = match body(&raw) {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, e),
    };
    let Some(property) = Selector::parse(&b.property) else {
        return error(StatusCode::BAD_REQUEST, format!("unknown property '{}'", b.property));
    };
    let Some(mode) = parse_mode(b.mode.as_deref().unwrap_or("filtered")) else {
        return error(StatusCode::BAD_REQUEST, "mode must be raw or filtered");
    };
    let req = CheckRequest {
        text: b.text,
        property,
        target: b.target,
        bounds: b.bounds,
        mode,
    };
    // Checks can run for seconds; keep them off the async workers.
    let result = tokio::task::spawn_blocking(move || run(&req).map(|o| o.to_json())).await;
    match result {
        Ok(Ok(v)) => Json(v).into_response(),
        Ok(Err(e @ RequestError::UnknownTarget(_))) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(e) => error(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
    }
}
