//! HTTP transports: a live client and an offline fixture directory that
//! emulates the CDO v2 and reverse-geocoding APIs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};
use serde_json::{json, Map, Value};

pub type Params = Vec<(String, String)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpResponse {
    pub status: u16,
    pub body: String,
}

#[derive(Debug, thiserror::Error)]
#[error("request to {path} failed: {message}")]
pub struct TransportError {
    pub path: String,
    pub message: String,
}

/// A GET-only HTTP client abstraction.
pub trait Transport: Send + Sync {
    fn get(&self, path: &str, params: &[(String, String)]) -> Result<HttpResponse, TransportError>;
}

/// Query string with keys sorted, then values; used to key fixture files.
pub fn canonical_query(params: &[(String, String)]) -> String {
    let mut sorted: Vec<&(String, String)> = params.iter().collect();
    sorted.sort();
    let mut out = String::new();
    for (i, (k, v)) in sorted.into_iter().enumerate() {
        if i > 0 {
            out.push('&');
        }
        let _ = write!(out, "{}={}", utf8_percent_encode(k, NON_ALPHANUMERIC), utf8_percent_encode(v, NON_ALPHANUMERIC));
    }
    out
}

pub struct LiveTransport {
    base: String,
    agent: ureq::Agent,
    headers: Vec<(String, String)>,
}

impl LiveTransport {
    pub fn new(base: impl Into<String>, timeout: Duration) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .user_agent(concat!("climakg/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        LiveTransport { base: base.into().trim_end_matches('/').to_owned(), agent, headers: Vec::new() }
    }

    /// Sends `token: <value>` with every request, as CDO v2 expects.
    pub fn with_token(mut self, token: impl Into<String>) -> Self {
        self.headers.push(("token".to_owned(), token.into()));
        self
    }
}

impl Transport for LiveTransport {
    fn get(&self, path: &str, params: &[(String, String)]) -> Result<HttpResponse, TransportError> {
        let url = format!("{}{}", self.base, path);
        // Headers are not logged: one of them is the credential.
        log::debug!("GET {url}?{}", canonical_query(params));
        let mut req = self.agent.get(&url).query_pairs(params.iter().map(|(k, v)| (k.as_str(), v.as_str())));
        for (k, v) in &self.headers {
            req = req.header(k.as_str(), v.as_str());
        }
        let err = |e: ureq::Error| TransportError { path: path.to_owned(), message: e.to_string() };
        let mut resp = req.call().map_err(err)?;
        let status = resp.status().as_u16();
        let body = resp.body_mut().read_to_string().map_err(err)?;
        Ok(HttpResponse { status, body })
    }
}

/// Offline transport backed by a fixture directory.
///
/// Lookup order for `GET {path}?{query}`:
/// 1. `responses/<percent-encoded "{path}?{canonical query}">.json`, served verbatim;
/// 2. `/reverse`: the record in `reverse.json` whose `_lat`/`_lon` equal the
///    requested coordinates, or Nominatim's "Unable to geocode" body;
/// 3. any other path: the JSON array in `<path>.json`, filtered and paged
///    the way the CDO v2 API does it.
///
/// Table records may carry hidden `_name` fields that match the request
/// parameter `name` (a string or an array of strings); records without the
/// field match any value. Hidden fields are stripped from responses.
pub struct FixtureTransport {
    dir: PathBuf,
    log: Mutex<Vec<(String, Params)>>,
    faults: Mutex<Vec<u16>>,
    tables: Mutex<HashMap<PathBuf, Arc<Vec<Value>>>>,
}

const DEFAULT_LIMIT: usize = 25;
const MAX_LIMIT: usize = 1000;

impl FixtureTransport {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        FixtureTransport {
            dir: dir.as_ref().to_owned(),
            log: Mutex::new(Vec::new()),
            faults: Mutex::new(Vec::new()),
            tables: Mutex::new(HashMap::new()),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Every request served so far, in order.
    pub fn requests(&self) -> Vec<(String, Params)> {
        self.log.lock().expect("log lock").clone()
    }

    pub fn clear_requests(&self) {
        self.log.lock().expect("log lock").clear();
    }

    /// Queues status codes to answer the next requests with, before normal
    /// service resumes.
    pub fn inject_faults(&self, statuses: &[u16]) {
        self.faults.lock().expect("fault lock").extend_from_slice(statuses);
    }

    pub fn exact_response_path(&self, path: &str, params: &[(String, String)]) -> PathBuf {
        let key = format!("{path}?{}", canonical_query(params));
        self.dir.join("responses").join(format!("{}.json", utf8_percent_encode(&key, NON_ALPHANUMERIC)))
    }

    /// Parsed table files, cached for the transport's lifetime.
    fn table(&self, path: &Path, request: &str) -> Result<Arc<Vec<Value>>, TransportError> {
        if let Some(t) = self.tables.lock().expect("table lock").get(path) {
            return Ok(t.clone());
        }
        let t = Arc::new(load_array(path, request)?);
        self.tables.lock().expect("table lock").insert(path.to_owned(), t.clone());
        Ok(t)
    }

    fn respond(&self, path: &str, params: &[(String, String)]) -> Result<HttpResponse, TransportError> {
        let exact = self.exact_response_path(path, params);
        if exact.is_file() {
            return read(&exact, path).map(|body| HttpResponse { status: 200, body });
        }
        if path == "/reverse" {
            return self.reverse(params);
        }
        self.cdo(path, params)
    }

    fn reverse(&self, params: &[(String, String)]) -> Result<HttpResponse, TransportError> {
        let coord = |k: &str| param(params, k).and_then(|v| v.parse::<f64>().ok());
        let (Some(lat), Some(lon)) = (coord("lat"), coord("lon")) else {
            return Ok(HttpResponse { status: 400, body: json!({"error": "missing lat/lon"}).to_string() });
        };
        let file = self.dir.join("reverse.json");
        let records = if file.is_file() { self.table(&file, "/reverse")? } else { Arc::new(Vec::new()) };
        let hit = records.iter().find(|r| {
            let near = |k: &str, x: f64| r.get(k).and_then(Value::as_f64).is_some_and(|y| (x - y).abs() < 1e-6);
            near("_lat", lat) && near("_lon", lon)
        });
        let body = match hit {
            Some(Value::Object(m)) => Value::Object(strip_hidden(m.clone())),
            _ => json!({"error": "Unable to geocode"}),
        };
        Ok(HttpResponse { status: 200, body: body.to_string() })
    }

    fn cdo(&self, path: &str, params: &[(String, String)]) -> Result<HttpResponse, TransportError> {
        let name = path.trim_start_matches('/');
        let file = self.dir.join(format!("{name}.json"));
        if name.is_empty() || name.contains('/') || !file.is_file() {
            return Ok(HttpResponse { status: 404, body: json!({"status": "404", "message": "not found"}).to_string() });
        }
        let limit = match param(params, "limit").map(str::parse::<usize>) {
            None => DEFAULT_LIMIT,
            Some(Ok(l)) if (1..=MAX_LIMIT).contains(&l) => l,
            Some(_) => return Ok(bad_request("limit must be between 1 and 1000")),
        };
        let offset = match param(params, "offset").map(str::parse::<usize>) {
            None => 1,
            Some(Ok(o)) if o >= 1 => o,
            Some(_) => return Ok(bad_request("offset must be a positive integer")),
        };
        let (start, end) = (param(params, "startdate"), param(params, "enddate"));
        if let (Some(s), Some(e)) = (start, end) {
            if s > e {
                return Ok(bad_request("startdate must not be after enddate"));
            }
        }
        let table = self.table(&file, path)?;
        let matches: Vec<&Map<String, Value>> =
            table.iter().filter_map(Value::as_object).filter(|r| record_matches(r, params)).collect();
        let count = matches.len();
        if count == 0 || offset > count {
            // CDO answers an empty result set with an empty object.
            return Ok(HttpResponse { status: 200, body: "{}".to_owned() });
        }
        let page: Vec<Value> = matches.into_iter().skip(offset - 1).take(limit).map(|m| Value::Object(strip_hidden(m.clone()))).collect();
        let body = json!({
            "metadata": {"resultset": {"offset": offset, "count": count, "limit": limit}},
            "results": page,
        });
        Ok(HttpResponse { status: 200, body: body.to_string() })
    }
}

impl Transport for FixtureTransport {
    fn get(&self, path: &str, params: &[(String, String)]) -> Result<HttpResponse, TransportError> {
        self.log.lock().expect("log lock").push((path.to_owned(), params.to_vec()));
        {
            let mut faults = self.faults.lock().expect("fault lock");
            if !faults.is_empty() {
                let status = faults.remove(0);
                return Ok(HttpResponse { status, body: json!({"status": status.to_string()}).to_string() });
            }
        }
        self.respond(path, params)
    }
}

fn bad_request(message: &str) -> HttpResponse {
    HttpResponse { status: 400, body: json!({"status": "400", "message": message}).to_string() }
}

fn param<'a>(params: &'a [(String, String)], key: &str) -> Option<&'a str> {
    params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
}

fn read(path: &Path, request: &str) -> Result<String, TransportError> {
    fs::read_to_string(path).map_err(|e| TransportError { path: request.to_owned(), message: format!("{}: {e}", path.display()) })
}

fn load_array(path: &Path, request: &str) -> Result<Vec<Value>, TransportError> {
    let text = read(path, request)?;
    match serde_json::from_str(&text) {
        Ok(Value::Array(items)) => Ok(items),
        Ok(_) => Err(TransportError { path: request.to_owned(), message: format!("{} is not a JSON array", path.display()) }),
        Err(e) => Err(TransportError { path: request.to_owned(), message: format!("{}: {e}", path.display()) }),
    }
}

fn strip_hidden(mut m: Map<String, Value>) -> Map<String, Value> {
    m.retain(|k, _| !k.starts_with('_'));
    m
}

fn field_matches(field: Option<&Value>, wanted: &str) -> bool {
    match field {
        None => true,
        Some(Value::String(s)) => s == wanted,
        Some(Value::Array(items)) => items.iter().any(|v| v.as_str() == Some(wanted)),
        Some(_) => false,
    }
}

fn record_matches(r: &Map<String, Value>, params: &[(String, String)]) -> bool {
    let day = r.get("date").and_then(Value::as_str).map(|d| d.get(..10).unwrap_or(d));
    params.iter().all(|(k, v)| match k.as_str() {
        "limit" | "offset" | "units" | "sortfield" | "sortorder" | "includemetadata" => true,
        "startdate" => day.is_none_or(|d| d >= v.get(..10).unwrap_or(v)),
        "enddate" => day.is_none_or(|d| d <= v.get(..10).unwrap_or(v)),
        "stationid" => {
            if r.contains_key("station") {
                field_matches(r.get("station"), v)
            } else {
                field_matches(r.get("_stationid").or(r.get("id")), v)
            }
        }
        "datatypeid" if r.contains_key("datatype") => field_matches(r.get("datatype"), v),
        other => field_matches(r.get(&format!("_{other}")), v),
    })
}
