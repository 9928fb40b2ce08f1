//! Geocoder enrichment of every station in the store.

use climakg_core::{Dataset, Ontology, ResourceKind, Triple};
use climakg_ingest::{enrich_station, Geocoder};
use serde::Serialize;

use crate::geo::station_coordinates;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnrichReport {
    pub stations: usize,
    pub skipped: usize,
    pub geocoded: usize,
    pub unable: usize,
    pub failed: usize,
    pub triples_new: usize,
}

fn already_enriched(store: &Dataset, o: &Ontology, station: &climakg_core::Iri) -> bool {
    store.match_triples(None, Some(station), Some(&o.ca("isLocatedIn")), None).iter().any(|t| {
        t.object
            .as_iri()
            .and_then(|iri| o.parse_resource_iri(iri))
            .is_some_and(|(kind, id)| kind == ResourceKind::Location && id.starts_with("osm:"))
    })
}

/// Geocodes each station with coordinates and inserts its administrative
/// chain into the default graph. With `skip_enriched`, stations already
/// linked to a geocoded area are left alone, which keeps re-runs against a
/// rate-limited service cheap; the output is the same either way.
pub fn enrich_all(store: &mut Dataset, o: &Ontology, geocoder: &Geocoder<'_>, skip_enriched: bool) -> EnrichReport {
    let mut report = EnrichReport::default();
    let mut pending: Vec<Triple> = Vec::new();
    for (station, p) in station_coordinates(store, o) {
        report.stations += 1;
        if skip_enriched && already_enriched(store, o, &station) {
            report.skipped += 1;
            continue;
        }
        match geocoder.reverse_geocode(p.lat, p.lon) {
            Ok(g) if g.unable => {
                log::info!("no address for {} at {},{}", station.as_str(), p.lat, p.lon);
                report.unable += 1;
            }
            Ok(g) => {
                report.geocoded += 1;
                pending.extend(enrich_station(o, &station, &g));
            }
            Err(e) => {
                log::warn!("geocoding {} failed: {e}", station.as_str());
                report.failed += 1;
            }
        }
    }
    report.triples_new = store.extend(None, &pending);
    report
}
