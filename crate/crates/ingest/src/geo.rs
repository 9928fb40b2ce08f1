//! Reverse geocoding, administrative-area enrichment and the Wikidata
//! snapshot loader.

use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use climakg_core::vocab::{owl, wikidata};
use climakg_core::{parse_ntriples, Dataset, Iri, Literal, Ontology, ResourceKind, SyntaxError, Triple};
use serde_json::Value;

use crate::transport::{Transport, TransportError};

pub const DEFAULT_GEOCODER_URL: &str = "https://nominatim.openstreetmap.org";

/// Address levels, finest first. Containment chains follow this order.
pub const LEVELS: [&str; 7] = ["suburb", "village", "town", "city", "county", "state", "country"];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GeocodeResult {
    /// `(level, name)` pairs, finest first.
    pub address: Vec<(String, String)>,
    pub country_code: String,
    /// `(level, Q-id)` pairs.
    pub wikidata_ids: Vec<(String, String)>,
    pub osm_id: Option<u64>,
    pub osm_type: Option<String>,
    /// Set when the geocoder could not place the coordinate.
    pub unable: bool,
}

impl GeocodeResult {
    pub fn name_at(&self, level: &str) -> Option<&str> {
        self.address.iter().find(|(l, _)| l == level).map(|(_, n)| n.as_str())
    }

    pub fn wikidata_at(&self, level: &str) -> Option<&str> {
        self.wikidata_ids.iter().find(|(l, _)| l == level).map(|(_, q)| q.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdminArea {
    pub iri: Iri,
    pub level: String,
    pub name: String,
    pub wikidata: Option<Iri>,
}

#[derive(Debug, thiserror::Error)]
pub enum GeoError {
    #[error("coordinates out of range: {0}, {1}")]
    Coordinates(f64, f64),
    #[error("geocoder answered HTTP {0}")]
    Http(u16),
    #[error("malformed geocoder response: {0}")]
    Json(String),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

pub fn is_qid(s: &str) -> bool {
    s.len() > 1 && s.starts_with('Q') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Parses a `format=jsonv2` reverse response. The `wikidata` extra tag
/// belongs to the returned object, whose level is `addresstype` (falling
/// back to the finest level present); `<level>:wikidata` tags are also read.
pub fn parse_reverse(body: &str, levels: &[&str]) -> Result<GeocodeResult, GeoError> {
    let v: Value = serde_json::from_str(body).map_err(|e| GeoError::Json(e.to_string()))?;
    if v.get("error").is_some() {
        return Ok(GeocodeResult { unable: true, ..Default::default() });
    }
    let address = v.get("address").and_then(Value::as_object);
    let mut out = GeocodeResult::default();
    if let Some(addr) = address {
        for level in levels {
            if let Some(name) = addr.get(*level).and_then(Value::as_str).map(str::trim).filter(|n| !n.is_empty()) {
                out.address.push(((*level).to_owned(), name.to_owned()));
            }
        }
        out.country_code = addr.get("country_code").and_then(Value::as_str).unwrap_or("").to_ascii_lowercase();
    }
    out.osm_id = v.get("osm_id").and_then(Value::as_u64);
    out.osm_type = v.get("osm_type").and_then(Value::as_str).map(str::to_owned);
    out.unable = out.address.is_empty();

    let tags = v.get("extratags").and_then(Value::as_object);
    if let Some(tags) = tags {
        let own_level = v
            .get("addresstype")
            .and_then(Value::as_str)
            .filter(|l| out.name_at(l).is_some())
            .map(str::to_owned)
            .or_else(|| out.address.first().map(|(l, _)| l.clone()));
        let mut push = |level: &str, q: &str| {
            if is_qid(q) && out.name_at(level).is_some() && out.wikidata_at(level).is_none() {
                out.wikidata_ids.push((level.to_owned(), q.to_owned()));
            } else if !is_qid(q) {
                log::warn!("ignoring malformed Wikidata id {q:?}");
            }
        };
        for level in levels {
            if let Some(q) = tags.get(&format!("{level}:wikidata")).and_then(Value::as_str) {
                push(level, q);
            }
        }
        if let (Some(level), Some(q)) = (own_level, tags.get("wikidata").and_then(Value::as_str)) {
            push(&level, q);
        }
    }
    Ok(out)
}

/// Serialised reverse-geocoding client.
pub struct Geocoder<'t> {
    transport: &'t dyn Transport,
    pub levels: Vec<&'static str>,
    pub min_interval: Duration,
    pub max_retries: u32,
    pub backoff: Duration,
    last: Mutex<Option<Instant>>,
}

impl<'t> Geocoder<'t> {
    /// Live mode: at most one request per second.
    pub fn live(transport: &'t dyn Transport) -> Self {
        Geocoder { transport, levels: LEVELS.to_vec(), min_interval: Duration::from_secs(1), max_retries: 3, backoff: Duration::from_secs(2), last: Mutex::new(None) }
    }

    pub fn fixture(transport: &'t dyn Transport) -> Self {
        Geocoder { min_interval: Duration::ZERO, backoff: Duration::ZERO, ..Geocoder::live(transport) }
    }

    pub fn reverse_geocode(&self, lat: f64, lon: f64) -> Result<GeocodeResult, GeoError> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(GeoError::Coordinates(lat, lon));
        }
        let params: Vec<(String, String)> = [
            ("format", "jsonv2".to_owned()),
            ("lat", lat.to_string()),
            ("lon", lon.to_string()),
            ("extratags", "1".to_owned()),
            ("accept-language", "en".to_owned()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_owned(), v))
        .collect();
        // Holding the lock across the request serialises callers.
        let mut last = self.last.lock().expect("geocoder lock");
        let mut attempt = 0;
        loop {
            if let Some(prev) = *last {
                let since = prev.elapsed();
                if since < self.min_interval {
                    thread::sleep(self.min_interval - since);
                }
            }
            *last = Some(Instant::now());
            let outcome = self.transport.get("/reverse", &params);
            let retry = match &outcome {
                Ok(r) => r.status == 429 || r.status >= 500,
                Err(_) => true,
            };
            if retry && attempt < self.max_retries {
                attempt += 1;
                thread::sleep(self.backoff * attempt);
                continue;
            }
            let resp = outcome?;
            if resp.status != 200 {
                return Err(GeoError::Http(resp.status));
            }
            return parse_reverse(&resp.body, &self.levels);
        }
    }
}

/// Areas named by `g`, finest first, with deterministic IRIs keyed by
/// country code, level and name.
pub fn admin_areas(o: &Ontology, g: &GeocodeResult) -> Vec<AdminArea> {
    let cc = if g.country_code.is_empty() { "xx" } else { g.country_code.as_str() };
    g.address
        .iter()
        .map(|(level, name)| AdminArea {
            iri: o.mint_resource_iri(ResourceKind::Location, &format!("osm:{cc}:{level}:{name}")).expect("non-empty id"),
            level: level.clone(),
            name: name.clone(),
            wikidata: g.wikidata_at(level).map(|q| Iri::new(format!("{}{q}", wikidata::ENTITY)).expect("valid Q-id IRI")),
        })
        .collect()
}

/// Location entities for each address level, a containment chain from the
/// station up to the coarsest level, and `owl:sameAs` links to Wikidata.
pub fn enrich_station(o: &Ontology, station: &Iri, g: &GeocodeResult) -> Vec<Triple> {
    let areas = admin_areas(o, g);
    let located = o.ca("isLocatedIn");
    let mut out = Vec::new();
    let mut child = station.clone();
    for area in &areas {
        out.push(Triple::new(area.iri.clone(), o.rdf_type(), o.ca("Location")));
        out.push(Triple::new(area.iri.clone(), o.ca("name"), Literal::string(area.name.clone())));
        if let Some(wd) = &area.wikidata {
            out.push(Triple::new(area.iri.clone(), Iri::from_static(owl::SAME_AS), wd.clone()));
        }
        out.push(Triple::new(child, located.clone(), area.iri.clone()));
        child = area.iri.clone();
    }
    out
}

/// Loads an N-Triples Wikidata extract into the ontology's Wikidata graph
/// and returns the number of new triples.
pub fn import_wikidata_snapshot(ds: &mut Dataset, o: &Ontology, text: &str) -> Result<usize, SyntaxError> {
    let triples = parse_ntriples(text)?;
    let foreign = triples.iter().filter(|t| !t.subject.as_str().starts_with(wikidata::ENTITY)).count();
    if foreign > 0 {
        log::warn!("wikidata snapshot: {foreign} triples with non-entity subjects");
    }
    Ok(ds.extend(Some(&o.wikidata_graph()), &triples))
}
