//! Coordinate computations the SPARQL subset cannot express: great-circle
//! nearest neighbours and bounding boxes.

use climakg_core::{Dataset, Iri, Ontology};
use climakg_sparql::execute;

/// Mean Earth radius of the spherical model, in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Option<Self> {
        ((-90.0..=90.0).contains(&lat) && (-180.0..=180.0).contains(&lon)).then_some(GeoPoint { lat, lon })
    }
}

/// Haversine distance in km.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let (phi1, phi2) = (a.lat.to_radians(), b.lat.to_radians());
    let dphi = (b.lat - a.lat).to_radians();
    let dlambda = (b.lon - a.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

pub fn station_coordinates_query(o: &Ontology) -> String {
    format!(
        "{}SELECT ?station ?lat ?long WHERE {{\n  ?station a ca:Station ;\n    wgs84:lat ?lat ;\n    wgs84:long ?long .\n}}\n",
        o.sparql_prologue()
    )
}

/// Every station with numeric coordinates, via the query engine.
pub fn station_coordinates(ds: &Dataset, o: &Ontology) -> Vec<(Iri, GeoPoint)> {
    let results = execute(ds, &station_coordinates_query(o)).expect("static query parses");
    let mut out: Vec<(Iri, GeoPoint)> = results
        .solutions
        .iter()
        .filter_map(|s| {
            let iri = s.get("station")?.as_iri()?.clone();
            let lat = s.get("lat")?.as_literal()?.as_f64()?;
            let lon = s.get("long")?.as_literal()?.as_f64()?;
            Some((iri, GeoPoint::new(lat, lon)?))
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// The `k` stations closest to `p`, nearest first; ties go to the smaller
/// IRI.
pub fn nearest_station(p: GeoPoint, k: usize, ds: &Dataset, o: &Ontology) -> Vec<(Iri, f64)> {
    let mut all: Vec<(Iri, f64)> = station_coordinates(ds, o).into_iter().map(|(iri, q)| (iri, haversine_km(p, q))).collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Stations with `south <= lat <= north` and longitude inside `[west, east]`,
/// wrapping across the antimeridian when `west > east`. Sorted by IRI.
pub fn stations_in_bbox(south: f64, north: f64, west: f64, east: f64, ds: &Dataset, o: &Ontology) -> Vec<Iri> {
    station_coordinates(ds, o)
        .into_iter()
        .filter(|(_, p)| in_bbox(*p, south, north, west, east))
        .map(|(iri, _)| iri)
        .collect()
}

pub fn in_bbox(p: GeoPoint, south: f64, north: f64, west: f64, east: f64) -> bool {
    let lon_ok = if west <= east { (west..=east).contains(&p.lon) } else { p.lon >= west || p.lon <= east };
    (south..=north).contains(&p.lat) && lon_ok
}
