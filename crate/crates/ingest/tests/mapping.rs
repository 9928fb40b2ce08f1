use std::collections::BTreeSet;

use climakg_core::vocab::rdf;
use climakg_core::{serialize_ntriples, Dataset, Iri, Ontology, Term};
use climakg_ingest::{map_metadata, map_observation, map_records, map_station, MetadataRec, ObservationRec, StationRec};
use proptest::prelude::*;
use serde_json::json;

fn station() -> impl Strategy<Value = StationRec> {
    (
        "[A-Z]{2}[0-9]{9}",
        "[A-Za-z ,'\"]{1,20}",
        -90.0f64..=90.0,
        -180.0f64..=180.0,
        prop::option::of(-100.0f64..3000.0),
    )
        .prop_map(|(id, name, latitude, longitude, elevation)| StationRec {
            id: format!("GHCND:{id}"),
            name,
            latitude,
            longitude,
            elevation,
            elevation_unit: elevation.map(|_| "METERS".to_owned()),
            mindate: None,
            maxdate: None,
            datacoverage: None,
        })
}

fn observation() -> impl Strategy<Value = ObservationRec> {
    ("[A-Z]{2}[0-9]{3}", prop::sample::select(vec!["PRCP", "TMAX", "TMIN", "SNWD"]), 1990i32..2030, 1u32..=12, 1u32..=28, -500.0f64..500.0)
        .prop_map(|(s, dt, y, m, d, value)| ObservationRec {
            date: format!("{y:04}-{m:02}-{d:02}T00:00:00"),
            datatype: dt.to_owned(),
            station: format!("GHCND:{s}"),
            value,
            attributes: None,
        })
}

fn closure_violations(o: &Ontology, triples: &[climakg_core::Triple]) -> Vec<String> {
    let mut bad = Vec::new();
    for t in triples {
        if t.predicate.as_str() != rdf::TYPE && !o.declares(&t.predicate) {
            bad.push(t.predicate.to_string());
        }
        if t.predicate.as_str() == rdf::TYPE {
            if let Term::Iri(c) = &t.object {
                if !o.declares(c) {
                    bad.push(c.to_string());
                }
            }
        }
    }
    bad
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn station_mapping_is_deterministic_and_closed(rec in station()) {
        let o = Ontology::default();
        let a = map_station(&o, &rec, Some("FIPS:UK")).unwrap();
        let b = map_station(&o, &rec, Some("FIPS:UK")).unwrap();
        prop_assert_eq!(serialize_ntriples(&a), serialize_ntriples(&b));
        prop_assert_eq!(a.len(), if rec.elevation.is_some() { 7 } else { 5 });
        prop_assert!(closure_violations(&o, &a).is_empty());
    }

    #[test]
    fn observation_insertion_is_idempotent(recs in prop::collection::vec(observation(), 1..40)) {
        let o = Ontology::default();
        let mut ds = Dataset::new();
        let mut all = Vec::new();
        for r in &recs {
            let t = map_observation(&o, r).unwrap();
            prop_assert!(closure_violations(&o, &t).is_empty());
            all.extend(t);
        }
        ds.extend(None, &all);
        let once = serialize_ntriples(&ds.triples(None));
        prop_assert_eq!(ds.extend(None, &all), 0);
        let twice = serialize_ntriples(&ds.triples(None));
        prop_assert_eq!(once, twice);
        let distinct: BTreeSet<(String, String, String)> = recs.iter().map(|r| (r.station.clone(), r.datatype.clone(), r.date.clone())).collect();
        prop_assert_eq!(ds.len(), 7 * distinct.len());
    }
}

#[test]
fn metadata_mapping_is_closed() {
    let o = Ontology::default();
    let cases = [
        ("/datasets", json!({"id": "GHCND", "name": "Daily Summaries", "mindate": "1763-01-01", "maxdate": "2021-03-24", "datacoverage": 1})),
        ("/datacategories", json!({"id": "PRCP", "name": "Precipitation"})),
        ("/datatypes", json!({"id": "TMAX", "name": "Maximum temperature", "datacoverage": 1})),
        ("/locationcategories", json!({"id": "CNTRY", "name": "Country"})),
        ("/locations", json!({"id": "FIPS:UK", "name": "United Kingdom", "mindate": "1850-01-01", "maxdate": "2021-03-23", "datacoverage": 1})),
    ];
    let params = vec![("datacategoryid".to_owned(), "TEMP".to_owned()), ("locationid".to_owned(), "FIPS:EU".to_owned())];
    for (endpoint, rec) in cases {
        let rec: MetadataRec = serde_json::from_value(rec).unwrap();
        let t = map_metadata(&o, &rec, endpoint, &params).unwrap();
        assert!(closure_violations(&o, &t).is_empty(), "{endpoint}: {:?}", closure_violations(&o, &t));
        assert_eq!(t[0].object, Term::Iri(o.class_for_endpoint(endpoint).unwrap()));
    }
}

#[test]
fn location_without_parent_has_no_containment() {
    let o = Ontology::default();
    let rec: MetadataRec = serde_json::from_value(json!({"id": "FIPS:UK", "name": "United Kingdom"})).unwrap();
    let t = map_metadata(&o, &rec, "/locations", &[("locationcategoryid".into(), "CNTRY".into())]).unwrap();
    assert!(t.iter().all(|t| t.predicate != o.ca("isLocatedIn")));
    assert_eq!(t[0].object, Term::Iri(o.ca("Location")));
}

#[test]
fn observation_of_unknown_station_still_maps() {
    let o = Ontology::default();
    let out = map_records(&o, "/data", &[], &[json!({"date": "2021-03-01T00:00:00", "datatype": "PRCP", "station": "GHCND:NEW", "value": 3})]).unwrap();
    assert_eq!(out.triples.len(), 7);
    let station = Iri::new(format!("{}resource/station/GHCND:NEW", o.base())).unwrap();
    assert!(out.triples.iter().any(|t| t.object == Term::Iri(station.clone())));
}
