mod common;

use climakg::geo::{haversine_km, nearest_station, stations_in_bbox, GeoPoint};
use climakg_core::Ontology;
use common::{deployment, sphere_km, station_iri, stations};
use proptest::prelude::*;

#[test]
fn nearest_matches_independent_distances() {
    let o = Ontology::default();
    let ds = &deployment().store;
    let all = stations();
    for (label, lat, lon) in [("dublin", 53.35, -6.26), ("cork", 51.90, -8.47)] {
        let got = nearest_station(GeoPoint::new(lat, lon).unwrap(), 5, ds, &o);
        let mut want: Vec<(String, f64)> = all.iter().map(|s| (station_iri(&s.0), sphere_km(lat, lon, s.2, s.3))).collect();
        want.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        let got_ids: Vec<&str> = got.iter().map(|(i, _)| i.as_str()).collect();
        let want_ids: Vec<&str> = want.iter().take(5).map(|(i, _)| i.as_str()).collect();
        assert_eq!(got_ids, want_ids, "{label}");
        for ((_, d), (_, e)) in got.iter().zip(&want) {
            assert!((d - e).abs() < 1e-6, "{label}: {d} vs {e}");
        }
    }
}

#[test]
fn own_coordinates_come_first_and_k_clamps() {
    let o = Ontology::default();
    let ds = &deployment().store;
    let (id, _, lat, lon) = stations().into_iter().find(|s| s.0 == climakg::fixture::DUBLIN_STATION).unwrap();
    let got = nearest_station(GeoPoint::new(lat, lon).unwrap(), 1, ds, &o);
    assert_eq!(got[0].0.as_str(), station_iri(&id));
    assert_eq!(got[0].1, 0.0);
    assert_eq!(nearest_station(GeoPoint::new(lat, lon).unwrap(), 10_000, ds, &o).len(), stations().len());
    assert!(nearest_station(GeoPoint::new(0.0, 0.0).unwrap(), 3, &climakg_core::Dataset::new(), &o).is_empty());
}

#[test]
fn bounding_boxes_match_linear_scan() {
    let o = Ontology::default();
    let ds = &deployment().store;
    let all = stations();
    let scan = |s: f64, n: f64, w: f64, e: f64| {
        let mut v: Vec<String> = all.iter().filter(|x| x.2 >= s && x.2 <= n && x.3 >= w && x.3 <= e).map(|x| station_iri(&x.0)).collect();
        v.sort();
        v
    };
    let ids = |v: Vec<climakg_core::Iri>| v.into_iter().map(|i| i.into_string()).collect::<Vec<_>>();
    // Ireland and the UK.
    let both = ids(stations_in_bbox(49.5, 61.0, -11.0, 2.0, ds, &o));
    assert_eq!(both, scan(49.5, 61.0, -11.0, 2.0));
    assert_eq!(both.len(), all.len());
    assert_eq!(ids(stations_in_bbox(51.4, 55.5, -10.7, -5.9, ds, &o)), scan(51.4, 55.5, -10.7, -5.9));
    let (_, _, lat, lon) = all[0].clone();
    assert_eq!(ids(stations_in_bbox(lat, lat, lon, lon, ds, &o)), vec![station_iri(&all[0].0)]);
    assert!(stations_in_bbox(0.0, 1.0, 0.0, 1.0, ds, &o).is_empty());
}

proptest! {
    #[test]
    fn haversine_agrees_with_vector_form(a in -90.0..90.0f64, b in -180.0..180.0f64, c in -90.0..90.0f64, d in -180.0..180.0f64) {
        let h = haversine_km(GeoPoint::new(a, b).unwrap(), GeoPoint::new(c, d).unwrap());
        prop_assert!((h - sphere_km(a, b, c, d)).abs() < 1e-6);
        prop_assert!(h >= 0.0 && h <= std::f64::consts::PI * 6371.0 + 1e-9);
    }
}
