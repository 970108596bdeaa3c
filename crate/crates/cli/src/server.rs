//! Read-only JSON API over one staircode document.
//!
//! The document and its query index are built once and shared immutably, so
//! handlers never lock. Whole-document responses are serialised up front and
//! every response is a pure function of the request.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use serde::Serialize;
use serde_json::json;
use staircode_core::io::{JsonBetti, JsonStaircase};
use staircode_core::staircase::parse_point;
use staircode_core::{dimension_function, Grade, Line, QueryIndex, StaircodeDocument};
use tower_http::services::ServeDir;

use crate::commands::{barcode_value, treegram_value};

struct AppState {
    doc: StaircodeDocument,
    index: QueryIndex,
    meta: String,
    staircode: String,
    betti: String,
}

#[derive(Serialize)]
struct Meta<'a> {
    n: usize,
    mode: &'static str,
    tie_breaks: bool,
    ids: &'a [String],
    sigma: [f64; 2],
    eps_max: f64,
}

#[derive(Serialize)]
struct StaircodeBody {
    order: Vec<String>,
    staircases: Vec<JsonStaircase>,
}

fn meta_json(doc: &StaircodeDocument) -> String {
    let code = &doc.staircode;
    let births: Vec<f64> = code.staircases().map(|s| s.birth_sigma()).collect();
    let lo = births.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = births.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let eps_max = code
        .staircases()
        .flat_map(|s| s.steps().iter().filter_map(|st| st.u.finite()))
        .fold(0.0, f64::max);
    let sigma = if code.is_empty() { [0.0, 0.0] } else { [lo, hi] };
    let meta = Meta { n: code.len(), mode: code.mode.as_str(), tie_breaks: code.tie_breaks, ids: &code.ids, sigma, eps_max };
    serde_json::to_string(&meta).expect("meta serialises")
}

fn json_body(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

fn bad_request(msg: impl std::fmt::Display) -> Response {
    json_body(StatusCode::BAD_REQUEST, json!({ "error": msg.to_string() }).to_string())
}

fn not_found() -> Response {
    json_body(StatusCode::NOT_FOUND, json!({ "error": "not found" }).to_string())
}

type Params = Query<HashMap<String, String>>;

fn line_param(params: &HashMap<String, String>) -> Result<Line, Response> {
    let text = params.get("l").ok_or_else(|| bad_request("missing query parameter `l`"))?;
    Line::parse(text).map_err(bad_request)
}

fn flag(params: &HashMap<String, String>, name: &str) -> bool {
    params.get(name).is_some_and(|v| matches!(v.as_str(), "" | "1" | "true"))
}

async fn meta(State(s): State<Arc<AppState>>) -> Response {
    json_body(StatusCode::OK, s.meta.clone())
}

async fn staircode(State(s): State<Arc<AppState>>) -> Response {
    json_body(StatusCode::OK, s.staircode.clone())
}

async fn betti(State(s): State<Arc<AppState>>) -> Response {
    json_body(StatusCode::OK, s.betti.clone())
}

async fn barcode(State(s): State<Arc<AppState>>, Query(p): Params) -> Response {
    match line_param(&p) {
        Ok(line) => json_body(StatusCode::OK, barcode_value(&s.doc, &s.index, &line, flag(&p, "verbose")).to_string()),
        Err(r) => r,
    }
}

async fn treegram(State(s): State<Arc<AppState>>, Query(p): Params) -> Response {
    let line = match line_param(&p) {
        Ok(line) => line,
        Err(r) => return r,
    };
    match treegram_value(&s.doc, &s.index, &line) {
        Ok(v) => json_body(StatusCode::OK, v.to_string()),
        Err(e) => json_body(StatusCode::INTERNAL_SERVER_ERROR, json!({ "error": e.message }).to_string()),
    }
}

async fn dim(State(s): State<Arc<AppState>>, Query(p): Params) -> Response {
    let Some(text) = p.get("g") else {
        return bad_request("missing query parameter `g`");
    };
    match parse_point(text) {
        Ok((sigma, eps)) => {
            let d = dimension_function(&s.doc.staircode, Grade::new(sigma, eps));
            json_body(StatusCode::OK, json!({ "grade": [sigma, eps], "dim": d }).to_string())
        }
        Err(e) => bad_request(e),
    }
}

/// Build the router. `static_dir`, when given, is served for every path
/// outside `/api`.
pub fn router(doc: StaircodeDocument, static_dir: Option<PathBuf>) -> Router {
    let json = doc.to_json_value();
    let state = AppState {
        index: QueryIndex::build(&doc.staircode),
        meta: meta_json(&doc),
        staircode: serde_json::to_string(&StaircodeBody { order: json.order, staircases: json.staircases })
            .expect("staircode serialises"),
        betti: serde_json::to_string::<JsonBetti>(&json.betti).expect("betti serialises"),
        doc,
    };
    let api = Router::new()
        .route("/meta", get(meta))
        .route("/staircode", get(staircode))
        .route("/betti", get(betti))
        .route("/barcode", get(barcode))
        .route("/treegram", get(treegram))
        .route("/dim", get(dim))
        .fallback(|| async { not_found() })
        .with_state(Arc::new(state));
    let app = Router::new().nest("/api", api);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(|| async { not_found() }),
    }
}

/// Serve until the process is stopped.
pub async fn serve(doc: StaircodeDocument, host: &str, port: u16, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((host, port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(doc, static_dir)).await
}

