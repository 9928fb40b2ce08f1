//! Shared fixture directory, deployment and independent oracles.

#![allow(dead_code)]

use std::path::Path;
use std::sync::OnceLock;

use chrono::{NaiveDate, NaiveDateTime};
use climakg::fixture::{self, Deployment};
use climakg_core::Ontology;
use serde_json::Value;

pub fn fixture_dir() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        fixture::generate(dir.path()).unwrap();
        dir
    })
    .path()
}

pub fn deployment() -> &'static Deployment {
    static DEP: OnceLock<Deployment> = OnceLock::new();
    DEP.get_or_init(|| fixture::deploy(fixture_dir(), &Ontology::default()).unwrap())
}

pub fn read(name: &str) -> Vec<Value> {
    serde_json::from_str::<Value>(&std::fs::read_to_string(fixture_dir().join(name)).unwrap())
        .unwrap()
        .as_array()
        .unwrap()
        .clone()
}

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

/// Fixture observation records with a real calendar date, as
/// (station, datatype, timestamp, value).
pub fn observations() -> Vec<(String, String, NaiveDateTime, f64)> {
    read("data.json")
        .iter()
        .filter_map(|r| {
            let t = NaiveDateTime::parse_from_str(r["date"].as_str()?, "%Y-%m-%dT%H:%M:%S").ok()?;
            Some((r["station"].as_str()?.to_owned(), r["datatype"].as_str()?.to_owned(), t, r["value"].as_f64()?))
        })
        .collect()
}

/// Stations with in-range coordinates: (id, name, lat, lon).
pub fn stations() -> Vec<(String, String, f64, f64)> {
    read("stations.json")
        .iter()
        .filter_map(|r| {
            let (lat, lon) = (r["latitude"].as_f64()?, r["longitude"].as_f64()?);
            ((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon))
                .then(|| (r["id"].as_str().unwrap().to_owned(), r["name"].as_str().unwrap_or("").to_owned(), lat, lon))
        })
        .collect()
}

/// Great-circle distance from the spherical law of cosines on unit
/// vectors, independent of the haversine form used by the crate.
pub fn sphere_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let v = |lat: f64, lon: f64| {
        let (la, lo) = (lat.to_radians(), lon.to_radians());
        [la.cos() * lo.cos(), la.cos() * lo.sin(), la.sin()]
    };
    let (a, b) = (v(lat1, lon1), v(lat2, lon2));
    let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
    let sin = (cross[0].powi(2) + cross[1].powi(2) + cross[2].powi(2)).sqrt();
    let cos = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    6371.0 * sin.atan2(cos)
}

pub fn station_iri(id: &str) -> String {
    Ontology::default().mint("station", id).unwrap().into_string()
}

/// The water-body bindings traced by hand through the fixture tables:
/// county-level Q-ids with P206 statements, two stations per place.
pub fn traced_water_bodies() -> std::collections::BTreeSet<(String, String)> {
    let wd = |q: &str| format!("http://www.wikidata.org/entity/{q}");
    let by_place: [(&str, &[&str]); 22] = [
        ("DUBLIN", &["Q41252"]),
        ("CORK", &["Q97", "Q1141486"]),
        ("COBH", &["Q97", "Q1141486"]),
        ("GALWAY", &["Q97", "Q1338843"]),
        ("ATHENRY", &["Q97", "Q1338843"]),
        ("LIMERICK", &["Q190509"]),
        ("SHANNON", &["Q97", "Q190509"]),
        ("BELMULLET", &["Q97"]),
        ("MALIN HEAD", &["Q97"]),
        ("VALENTIA", &["Q97"]),
        ("LONDON", &["Q19686"]),
        ("OXFORD", &["Q19686"]),
        ("LIVERPOOL", &["Q41252"]),
        ("NEWCASTLE UPON TYNE", &["Q1693"]),
        ("PLYMOUTH", &["Q34640"]),
        ("EXETER", &["Q34640"]),
        ("EDINBURGH", &["Q213186"]),
        ("ABERDEEN", &["Q1693"]),
        ("INVERNESS", &["Q1693"]),
        ("LERWICK", &["Q1693"]),
        ("ABERYSTWYTH", &["Q1049326"]),
        ("BELFAST", &["Q41252"]),
    ];
    let mut out = std::collections::BTreeSet::new();
    for s in stations() {
        for (place, bodies) in &by_place {
            if s.1.starts_with(&format!("{place} ")) && s.0 != climakg::fixture::BUOY_STATION {
                for b in *bodies {
                    out.insert((station_iri(&s.0), wd(b)));
                }
            }
        }
    }
    out
}

