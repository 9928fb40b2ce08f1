//! HTTP front end: SPARQL protocol at `/sparql`, a graph store protocol
//! subset at `/data`, resource dereferencing at `/resource/{kind}/{id}` and
//! `/healthz`.

pub mod deref;
pub mod negotiate;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock, RwLockReadGuard, RwLockWriteGuard};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use climakg_core::{parse_ntriples, parse_turtle, serialize_ntriples, write_turtle, Dataset, Iri, Ontology, ResourceKind, Triple};
use climakg_sparql::{evaluate, parse_query};
use serde_json::json;

pub use deref::DerefDocument;
pub use negotiate::negotiate;

pub const SPARQL_JSON: &str = "application/sparql-results+json";
pub const N_TRIPLES: &str = "application/n-triples";
pub const TURTLE: &str = "text/turtle";

/// Shared, reader-writer locked store. Writers hold the lock only to apply
/// fully parsed changes, so readers never see a partial update.
pub type SharedStore = Arc<RwLock<Dataset>>;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    /// Incoming-link cap for dereference documents.
    pub incoming_cap: usize,
    /// Directory of static console assets served at `/`, if any.
    pub console_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig { incoming_cap: 100, console_dir: None }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: SharedStore,
    pub ontology: Arc<Ontology>,
    pub config: Arc<ServerConfig>,
}

impl AppState {
    pub fn new(dataset: Dataset, ontology: Ontology, config: ServerConfig) -> Self {
        AppState { store: Arc::new(RwLock::new(dataset)), ontology: Arc::new(ontology), config: Arc::new(config) }
    }

    pub fn read(&self) -> RwLockReadGuard<'_, Dataset> {
        self.store.read().unwrap_or_else(|e| e.into_inner())
    }

    pub fn write(&self) -> RwLockWriteGuard<'_, Dataset> {
        self.store.write().unwrap_or_else(|e| e.into_inner())
    }
}

pub fn router(state: AppState) -> Router {
    let console = state.config.console_dir.clone();
    let app = Router::new()
        .route("/sparql", get(sparql).post(sparql))
        .route("/data", get(graph_store).put(graph_store).post(graph_store).delete(graph_store))
        .route("/resource/{kind}/{*id}", get(dereference))
        .route("/healthz", get(healthz))
        .with_state(state);
    match console {
        Some(dir) => app.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => app,
    }
}

/// Binds `addr` and serves until the process exits.
pub async fn serve(addr: SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

fn text(status: StatusCode, body: impl Into<String>) -> Response {
    (status, [(header::CONTENT_TYPE, "text/plain; charset=utf-8")], body.into()).into_response()
}

fn not_acceptable(offered: &[&str]) -> Response {
    text(StatusCode::NOT_ACCEPTABLE, format!("acceptable types: {}\n", offered.join(", ")))
}

fn header_str<'h>(headers: &'h HeaderMap, name: header::HeaderName) -> Option<&'h str> {
    headers.get(name).and_then(|v| v.to_str().ok())
}

fn media_type(headers: &HeaderMap) -> Option<String> {
    header_str(headers, header::CONTENT_TYPE).map(|c| c.split(';').next().unwrap_or("").trim().to_ascii_lowercase())
}

async fn healthz(State(state): State<AppState>) -> Response {
    let n = state.read().len();
    axum::Json(json!({"status": "ok", "triples": n})).into_response()
}

const SPARQL_OFFERS: [&str; 3] = [SPARQL_JSON, "application/json", "text/csv"];

async fn sparql(State(state): State<AppState>, method: Method, Query(params): Query<HashMap<String, String>>, headers: HeaderMap, body: Bytes) -> Response {
    let query = if method == Method::GET {
        params.get("query").cloned()
    } else {
        match media_type(&headers).as_deref() {
            Some("application/sparql-query") => match String::from_utf8(body.to_vec()) {
                Ok(q) => Some(q),
                Err(_) => return text(StatusCode::BAD_REQUEST, "query body is not UTF-8\n"),
            },
            Some("application/x-www-form-urlencoded") => {
                match serde_urlencoded::from_bytes::<Vec<(String, String)>>(&body) {
                    Ok(form) => form.into_iter().find(|(k, _)| k == "query").map(|(_, v)| v),
                    Err(_) => return text(StatusCode::BAD_REQUEST, "malformed form body\n"),
                }
            }
            _ => return text(StatusCode::UNSUPPORTED_MEDIA_TYPE, "use application/sparql-query or application/x-www-form-urlencoded\n"),
        }
    };
    let Some(query) = query else {
        return text(StatusCode::BAD_REQUEST, "missing `query` parameter\n");
    };
    let Some(format) = negotiate(header_str(&headers, header::ACCEPT), &SPARQL_OFFERS) else {
        return not_acceptable(&SPARQL_OFFERS);
    };
    let parsed = match parse_query(&query) {
        Ok(q) => q,
        Err(e) => {
            let body = json!({"error": e.to_string(), "line": e.line, "column": e.column, "token": e.token, "message": e.message});
            return (StatusCode::BAD_REQUEST, axum::Json(body)).into_response();
        }
    };
    let store = state.store.clone();
    let joined = tokio::task::spawn_blocking(move || {
        let ds = store.read().unwrap_or_else(|e| e.into_inner());
        evaluate(&ds, &parsed)
    })
    .await;
    let results = match joined {
        Ok(r) => r,
        Err(e) => {
            log::error!("query evaluation failed: {e}");
            return text(StatusCode::INTERNAL_SERVER_ERROR, "internal error\n");
        }
    };
    match format {
        "text/csv" => ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], results.to_csv()).into_response(),
        ct => ([(header::CONTENT_TYPE, ct)], results.to_json_string()).into_response(),
    }
}

const GRAPH_OFFERS: [&str; 2] = [N_TRIPLES, TURTLE];

/// `?graph=<iri>` names a graph, `?default` the default graph.
fn target_graph(params: &HashMap<String, String>) -> Result<Option<Iri>, Response> {
    match (params.get("graph"), params.contains_key("default")) {
        (Some(_), true) => Err(text(StatusCode::BAD_REQUEST, "give either `graph` or `default`, not both\n")),
        (Some(g), false) => Iri::new(g.as_str()).map(Some).map_err(|e| text(StatusCode::BAD_REQUEST, format!("bad graph IRI: {e}\n"))),
        (None, true) => Ok(None),
        (None, false) => Err(text(StatusCode::BAD_REQUEST, "missing `graph` or `default` parameter\n")),
    }
}

fn parse_payload(headers: &HeaderMap, body: &[u8]) -> Result<Vec<Triple>, Response> {
    let parsed = match media_type(headers).as_deref() {
        None | Some("application/n-triples") | Some("text/plain") => parse_ntriples(body),
        Some("text/turtle") => parse_turtle(body),
        Some(other) => return Err(text(StatusCode::UNSUPPORTED_MEDIA_TYPE, format!("unsupported content type {other}\n"))),
    };
    parsed.map_err(|e| text(StatusCode::BAD_REQUEST, format!("{e}\n")))
}

async fn graph_store(State(state): State<AppState>, method: Method, Query(params): Query<HashMap<String, String>>, headers: HeaderMap, body: Bytes) -> Response {
    let graph = match target_graph(&params) {
        Ok(g) => g,
        Err(r) => return r,
    };
    let g = graph.as_ref();
    match method {
        Method::GET => {
            let Some(format) = negotiate(header_str(&headers, header::ACCEPT), &GRAPH_OFFERS) else {
                return not_acceptable(&GRAPH_OFFERS);
            };
            let ds = state.read();
            if g.is_some() && !ds.has_graph(g) {
                return text(StatusCode::NOT_FOUND, "no such graph\n");
            }
            let triples = ds.triples(g);
            drop(ds);
            let body = if format == TURTLE { write_turtle(&triples, &state.ontology.prefixes()) } else { serialize_ntriples(&triples) };
            ([(header::CONTENT_TYPE, format)], body).into_response()
        }
        Method::PUT => {
            let triples = match parse_payload(&headers, &body) {
                Ok(t) => t,
                Err(r) => return r,
            };
            let mut ds = state.write();
            let existed = if g.is_some() { ds.has_graph(g) } else { ds.graph_len(None) > 0 };
            ds.replace_graph(g, triples);
            if existed { StatusCode::NO_CONTENT.into_response() } else { StatusCode::CREATED.into_response() }
        }
        Method::POST => {
            let triples = match parse_payload(&headers, &body) {
                Ok(t) => t,
                Err(r) => return r,
            };
            let added = state.write().extend(g, &triples);
            log::debug!("graph store POST: {added} of {} triples new", triples.len());
            StatusCode::NO_CONTENT.into_response()
        }
        Method::DELETE => {
            if state.write().drop_graph(g) {
                StatusCode::NO_CONTENT.into_response()
            } else {
                text(StatusCode::NOT_FOUND, "no such graph\n")
            }
        }
        _ => StatusCode::METHOD_NOT_ALLOWED.into_response(),
    }
}

const DEREF_OFFERS: [&str; 4] = ["text/html", TURTLE, "application/json", N_TRIPLES];

async fn dereference(State(state): State<AppState>, Path((kind, id)): Path<(String, String)>, headers: HeaderMap) -> Response {
    let o = &state.ontology;
    let Ok(kind) = kind.parse::<ResourceKind>() else {
        return text(StatusCode::NOT_FOUND, "unknown resource kind\n");
    };
    let Ok(focus) = o.mint_resource_iri(kind, &id) else {
        return text(StatusCode::NOT_FOUND, "unknown resource\n");
    };
    let Some(format) = negotiate(header_str(&headers, header::ACCEPT), &DEREF_OFFERS) else {
        return not_acceptable(&DEREF_OFFERS);
    };
    let doc = DerefDocument::build(&state.read(), o, focus, state.config.incoming_cap);
    let Some(doc) = doc else {
        return text(StatusCode::NOT_FOUND, "unknown resource\n");
    };
    let (ct, body) = match format {
        TURTLE => (TURTLE, doc.to_turtle(o)),
        "application/json" => ("application/json", doc.to_json().to_string()),
        N_TRIPLES => (N_TRIPLES, serialize_ntriples(doc.triples())),
        _ => ("text/html; charset=utf-8", doc.to_html(o)),
    };
    ([(header::CONTENT_TYPE, ct), (header::VARY, "Accept")], body).into_response()
}
