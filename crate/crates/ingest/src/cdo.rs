//! Paginated fetching from the CDO v2 API.

use std::thread;
use std::time::Duration;

use serde_json::Value;

use crate::transport::{canonical_query, Params, Transport, TransportError};

pub const DEFAULT_BASE_URL: &str = "https://www.ncdc.noaa.gov/cdo-web/api/v2";

/// Endpoints served by CDO v2.
pub const ENDPOINTS: [&str; 7] =
    ["/datasets", "/datacategories", "/datatypes", "/locationcategories", "/locations", "/stations", "/data"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchPlan {
    pub endpoint: String,
    pub params: Params,
}

impl FetchPlan {
    pub fn new(endpoint: impl Into<String>) -> Self {
        FetchPlan { endpoint: endpoint.into(), params: Vec::new() }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.params.push((key.into(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn validate(&self) -> Result<(), FetchError> {
        if !ENDPOINTS.contains(&self.endpoint.as_str()) {
            return Err(FetchError::InvalidPlan(format!("unknown endpoint {}", self.endpoint)));
        }
        if self.get("limit").is_some() || self.get("offset").is_some() {
            return Err(FetchError::InvalidPlan("limit and offset are managed by the pager".into()));
        }
        if let (Some(s), Some(e)) = (self.get("startdate"), self.get("enddate")) {
            if s > e {
                return Err(FetchError::InvalidPlan(format!("startdate {s} is after enddate {e}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct FetchOptions {
    /// Page size, 1..=1000.
    pub limit: usize,
    /// Maximum number of HTTP requests per `fetch_all`, retries included.
    pub request_budget: Option<usize>,
    /// Pause between consecutive requests.
    pub delay: Duration,
    pub max_retries: u32,
    pub backoff_base: Duration,
    pub max_backoff: Duration,
}

impl Default for FetchOptions {
    fn default() -> Self {
        FetchOptions {
            limit: 1000,
            request_budget: None,
            delay: Duration::ZERO,
            max_retries: 5,
            backoff_base: Duration::from_millis(500),
            max_backoff: Duration::from_secs(30),
        }
    }
}

impl FetchOptions {
    /// Delay before retry number `attempt` (0-based).
    pub fn backoff(&self, attempt: u32) -> Duration {
        let factor = 1u32.checked_shl(attempt.min(16)).unwrap_or(u32::MAX);
        self.backoff_base.saturating_mul(factor).min(self.max_backoff)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FetchError {
    #[error("invalid fetch plan: {0}")]
    InvalidPlan(String),
    #[error("HTTP {status} from {endpoint}?{query}")]
    Http { status: u16, endpoint: String, query: String },
    #[error("malformed JSON from {endpoint} at byte {offset}: {message}")]
    Json { endpoint: String, offset: usize, message: String },
    #[error("gave up on {endpoint} after {attempts} attempts (last status {last_status:?})")]
    RetriesExhausted { endpoint: String, attempts: u32, last_status: Option<u16> },
    #[error("request budget of {0} exhausted")]
    BudgetExceeded(usize),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

fn retryable(status: u16) -> bool {
    status == 429 || (500..600).contains(&status)
}

/// Byte offset of a serde_json error position (1-based line and column).
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

/// Parses a CDO response body. Returns `(count, results)`; `{}` is an empty
/// result set.
pub fn parse_envelope(endpoint: &str, body: &str) -> Result<(usize, Vec<Value>), FetchError> {
    let v: Value = serde_json::from_str(body).map_err(|e| FetchError::Json {
        endpoint: endpoint.to_owned(),
        offset: byte_offset(body, e.line(), e.column()),
        message: e.to_string(),
    })?;
    let shape = |message: &str| FetchError::Json { endpoint: endpoint.to_owned(), offset: 0, message: message.to_owned() };
    let Value::Object(mut obj) = v else {
        return Err(shape("response is not a JSON object"));
    };
    let results = match obj.remove("results") {
        None => Vec::new(),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(shape("`results` is not an array")),
    };
    let count = obj
        .get("metadata")
        .and_then(|m| m.get("resultset"))
        .and_then(|r| r.get("count"))
        .and_then(Value::as_u64)
        .map(|c| c as usize)
        .unwrap_or(results.len());
    Ok((count, results))
}

/// Fetches every page of `plan`, in order.
pub fn fetch_all(transport: &dyn Transport, plan: &FetchPlan, opts: &FetchOptions) -> Result<Vec<Value>, FetchError> {
    plan.validate()?;
    let limit = opts.limit.clamp(1, 1000);
    let mut out = Vec::new();
    let mut offset = 1usize;
    let mut requests = 0usize;
    loop {
        let mut params = plan.params.clone();
        params.push(("limit".into(), limit.to_string()));
        params.push(("offset".into(), offset.to_string()));
        let body = request(transport, &plan.endpoint, &params, opts, &mut requests)?;
        let (count, results) = parse_envelope(&plan.endpoint, &body)?;
        let got = results.len();
        out.extend(results);
        offset += limit;
        if got == 0 || offset > count {
            break;
        }
    }
    log::info!("{} {}: {} records in {} requests", plan.endpoint, canonical_query(&plan.params), out.len(), requests);
    Ok(out)
}

fn request(
    transport: &dyn Transport,
    endpoint: &str,
    params: &[(String, String)],
    opts: &FetchOptions,
    requests: &mut usize,
) -> Result<String, FetchError> {
    let mut attempt = 0u32;
    loop {
        if let Some(budget) = opts.request_budget {
            if *requests >= budget {
                return Err(FetchError::BudgetExceeded(budget));
            }
        }
        if *requests > 0 && !opts.delay.is_zero() {
            thread::sleep(opts.delay);
        }
        *requests += 1;
        let (status, err) = match transport.get(endpoint, params) {
            Ok(resp) if resp.status == 200 => return Ok(resp.body),
            Ok(resp) if retryable(resp.status) => (Some(resp.status), None),
            Ok(resp) => {
                return Err(FetchError::Http {
                    status: resp.status,
                    endpoint: endpoint.to_owned(),
                    query: canonical_query(params),
                })
            }
            Err(e) => (None, Some(e)),
        };
        if attempt >= opts.max_retries {
            return match err {
                Some(e) if opts.max_retries == 0 => Err(e.into()),
                _ => Err(FetchError::RetriesExhausted { endpoint: endpoint.to_owned(), attempts: attempt + 1, last_status: status }),
            };
        }
        let wait = opts.backoff(attempt);
        log::warn!("{endpoint}: {} on attempt {}, retrying in {wait:?}", status.map_or("transport error".to_owned(), |s| format!("HTTP {s}")), attempt + 1);
        thread::sleep(wait);
        attempt += 1;
    }
}
