//! Pure record-to-triple mappers for CDO responses.

use chrono::{NaiveDate, NaiveDateTime};
use climakg_core::vocab::{qudt, sosa, wgs84, xsd};
use climakg_core::{Iri, Literal, Ontology, OntologyError, ResourceKind, Term, Triple};
use serde::Deserialize;
use serde_json::Value;

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct StationRec {
    pub id: String,
    pub name: String,
    pub latitude: f64,
    pub longitude: f64,
    #[serde(default)]
    pub elevation: Option<f64>,
    #[serde(default, rename = "elevationUnit")]
    pub elevation_unit: Option<String>,
    #[serde(default)]
    pub mindate: Option<String>,
    #[serde(default)]
    pub maxdate: Option<String>,
    #[serde(default)]
    pub datacoverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ObservationRec {
    pub date: String,
    pub datatype: String,
    pub station: String,
    pub value: f64,
    #[serde(default)]
    pub attributes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct MetadataRec {
    pub id: String,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub mindate: Option<String>,
    #[serde(default)]
    pub maxdate: Option<String>,
    #[serde(default)]
    pub datacoverage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("record does not match the expected shape: {0}")]
    Shape(String),
    #[error("coordinates out of range: lat {lat}, long {long}")]
    Coordinates { lat: f64, long: f64 },
    #[error("unparseable date {0:?}")]
    Date(String),
    #[error("empty identifier")]
    EmptyId,
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

/// Normalises a CDO timestamp ("2021-03-01T00:00:00", optionally with
/// fractional seconds or a bare date) to `YYYY-MM-DDTHH:MM:SS`.
pub fn normalize_datetime(s: &str) -> Option<String> {
    let s = s.trim();
    let dt = NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S%.f")
        .ok()
        .or_else(|| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().and_then(|d| d.and_hms_opt(0, 0, 0)))?;
    Some(dt.format("%Y-%m-%dT%H:%M:%S").to_string())
}

fn normalize_date(s: &str) -> Option<String> {
    let day = s.trim().get(..10)?;
    NaiveDate::parse_from_str(day, "%Y-%m-%d").ok().map(|d| d.format("%Y-%m-%d").to_string())
}

fn typed(lexical: String, datatype: &'static str) -> Term {
    Term::Literal(Literal::typed(lexical, Iri::from_static(datatype)).expect("validated lexical form"))
}

/// Observation identity: station, datatype and normalised timestamp.
pub fn observation_id(station: &str, datatype: &str, date: &str) -> Option<String> {
    Some(format!("{station}/{datatype}/{}", normalize_datetime(date)?))
}

/// Station description. `location` is the `locationid` of the request that
/// returned the record, if any.
pub fn map_station(o: &Ontology, rec: &StationRec, location: Option<&str>) -> Result<Vec<Triple>, MapError> {
    if rec.id.trim().is_empty() {
        return Err(MapError::EmptyId);
    }
    let (lat, long) = (rec.latitude, rec.longitude);
    if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&long) {
        return Err(MapError::Coordinates { lat, long });
    }
    let s = o.mint_resource_iri(ResourceKind::Station, &rec.id)?;
    let mut out = vec![
        Triple::new(s.clone(), o.rdf_type(), o.ca("Station")),
        Triple::new(s.clone(), o.ca("name"), Literal::string(rec.name.clone())),
        Triple::new(s.clone(), Iri::from_static(wgs84::LAT), Literal::double(lat)),
        Triple::new(s.clone(), Iri::from_static(wgs84::LONG), Literal::double(long)),
    ];
    if let Some(elev) = rec.elevation.filter(|e| e.is_finite()) {
        out.push(Triple::new(s.clone(), o.ca("elev"), Literal::double(elev)));
        if let Some(unit) = rec.elevation_unit.as_deref().filter(|u| !u.is_empty()) {
            out.push(Triple::new(s.clone(), o.ca("elevUnit"), Literal::string(unit)));
        }
    }
    if let Some(loc) = location.filter(|l| !l.is_empty()) {
        out.push(Triple::new(s, o.ca("isLocatedIn"), o.mint_resource_iri(ResourceKind::Location, loc)?));
    }
    Ok(out)
}

pub fn map_observation(o: &Ontology, rec: &ObservationRec) -> Result<Vec<Triple>, MapError> {
    if rec.station.is_empty() || rec.datatype.is_empty() {
        return Err(MapError::EmptyId);
    }
    let time = normalize_datetime(&rec.date).ok_or_else(|| MapError::Date(rec.date.clone()))?;
    if !rec.value.is_finite() {
        return Err(MapError::Shape(format!("non-finite value {}", rec.value)));
    }
    let id = format!("{}/{}/{time}", rec.station, rec.datatype);
    let obs = o.mint_resource_iri(ResourceKind::Observation, &id)?;
    let res = o.mint_resource_iri(ResourceKind::Result, &id)?;
    let station = o.mint_resource_iri(ResourceKind::Station, &rec.station)?;
    let datatype = o.mint_resource_iri(ResourceKind::DataType, &rec.datatype)?;
    Ok(vec![
        Triple::new(obs.clone(), o.rdf_type(), Iri::from_static(sosa::OBSERVATION)),
        Triple::new(obs.clone(), Iri::from_static(sosa::RESULT_TIME), typed(time, xsd::DATE_TIME)),
        Triple::new(obs.clone(), o.ca("sourceStation"), station),
        Triple::new(obs, Iri::from_static(sosa::HAS_RESULT), res.clone()),
        Triple::new(res.clone(), o.rdf_type(), o.ca("Result")),
        Triple::new(res.clone(), o.ca("withDataType"), datatype),
        Triple::new(res, Iri::from_static(qudt::NUMERIC_VALUE), Literal::double(rec.value)),
    ])
}

fn metadata_kind(endpoint: &str) -> Result<ResourceKind, MapError> {
    Ok(match endpoint {
        "/datasets" => ResourceKind::Dataset,
        "/datacategories" => ResourceKind::DataCategory,
        "/datatypes" => ResourceKind::DataType,
        "/locationcategories" => ResourceKind::LocationCategory,
        "/locations" => ResourceKind::Location,
        other => return Err(OntologyError::UnknownEndpoint(other.to_owned()).into()),
    })
}

/// Metadata entities (datasets, categories, datatypes, locations).
/// `params` are the request parameters; `datacategoryid` on `/datatypes`
/// and `locationid` on `/locations` become containment links.
pub fn map_metadata(o: &Ontology, rec: &MetadataRec, endpoint: &str, params: &[(String, String)]) -> Result<Vec<Triple>, MapError> {
    let kind = metadata_kind(endpoint)?;
    if rec.id.trim().is_empty() {
        return Err(MapError::EmptyId);
    }
    let m = o.mint_resource_iri(kind, &rec.id)?;
    let mut out = vec![Triple::new(m.clone(), o.rdf_type(), o.class_for_endpoint(endpoint)?)];
    if let Some(name) = rec.name.as_deref() {
        out.push(Triple::new(m.clone(), o.ca("name"), Literal::string(name)));
    }
    for (field, prop) in [(&rec.mindate, "minDate"), (&rec.maxdate, "maxDate")] {
        if let Some(raw) = field {
            match normalize_date(raw) {
                Some(d) => out.push(Triple::new(m.clone(), o.ca(prop), typed(d, xsd::DATE))),
                None => log::warn!("{}: ignoring bad {prop} {raw:?}", rec.id),
            }
        }
    }
    if let Some(cov) = rec.datacoverage.filter(|c| c.is_finite()) {
        out.push(Triple::new(m.clone(), o.ca("dataCoverage"), Literal::double(cov)));
    }
    let param = |k: &str| params.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str()).filter(|v| !v.is_empty());
    match kind {
        ResourceKind::DataType => {
            if let Some(cat) = param("datacategoryid") {
                out.push(Triple::new(m, o.ca("inDataCategory"), o.mint_resource_iri(ResourceKind::DataCategory, cat)?));
            }
        }
        ResourceKind::Location => {
            if let Some(parent) = param("locationid").filter(|p| *p != rec.id) {
                out.push(Triple::new(m, o.ca("isLocatedIn"), o.mint_resource_iri(ResourceKind::Location, parent)?));
            }
        }
        _ => {}
    }
    Ok(out)
}

#[derive(Debug, Default, Clone, PartialEq)]
pub struct MapOutcome {
    pub triples: Vec<Triple>,
    pub mapped: usize,
    pub rejected: usize,
}

/// Maps raw records from `endpoint`. Bad records are logged and counted,
/// never fatal.
pub fn map_records(o: &Ontology, endpoint: &str, params: &[(String, String)], records: &[Value]) -> Result<MapOutcome, MapError> {
    if endpoint != "/stations" && endpoint != "/data" {
        metadata_kind(endpoint)?;
    }
    let location = params.iter().find(|(k, _)| k == "locationid").map(|(_, v)| v.as_str());
    let mut outcome = MapOutcome::default();
    for rec in records {
        let result = match endpoint {
            "/stations" => parse(rec).and_then(|r| map_station(o, &r, location)),
            "/data" => parse(rec).and_then(|r| map_observation(o, &r)),
            _ => parse(rec).and_then(|r| map_metadata(o, &r, endpoint, params)),
        };
        match result {
            Ok(triples) => {
                outcome.mapped += 1;
                outcome.triples.extend(triples);
            }
            Err(e) => {
                outcome.rejected += 1;
                log::warn!("{endpoint}: rejected record: {e}");
            }
        }
    }
    Ok(outcome)
}

fn parse<T: for<'de> Deserialize<'de>>(v: &Value) -> Result<T, MapError> {
    T::deserialize(v).map_err(|e| MapError::Shape(e.to_string()))
}
