//! Deterministic offline corpus for the fixture transport.
//!
//! Layout of the generated directory:
//!
//! | file | content |
//! |---|---|
//! | `datasets.json` … `locations.json` | CDO metadata tables |
//! | `stations.json` | station records (Ireland and the UK) |
//! | `data.json` | daily GHCND observations, January to April 2021 |
//! | `reverse.json` | geocoder answers keyed by `_lat`/`_lon` |
//! | `wikidata.nt` | labels and `wdt:P206` statements for linked entities |
//! | `supplementary.nt` | extra environmental data for cross-domain queries |
//!
//! Fields starting with `_` are filter keys for the fixture transport and
//! never reach clients. Wikidata identifiers for counties and water bodies
//! are illustrative, not checked against the live service.

use std::fs;
use std::io;
use std::path::Path;

use chrono::{Days, NaiveDate};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use climakg_core::{Dataset, Ontology};
use climakg_ingest::{import_wikidata_snapshot, FixtureTransport, Geocoder};

use crate::config::SyncConfig;
use crate::enrich::{enrich_all, EnrichReport};
use crate::sync::{run_sync, SyncReport};

pub const SEED: u64 = 0x00C0_FFEE;
pub const FIRST_DAY: (i32, u32, u32) = (2021, 1, 1);
pub const DAYS: u64 = 120;
/// Station that records exactly PRCP and TMAX.
pub const TWO_VARIABLE_STATION: &str = "GHCND:EI000003955";
pub const DUBLIN_STATION: &str = "GHCND:EI000003969";
/// Offshore station the geocoder cannot place.
pub const BUOY_STATION: &str = "GHCND:EIM00003975";

pub fn first_day() -> NaiveDate {
    NaiveDate::from_ymd_opt(FIRST_DAY.0, FIRST_DAY.1, FIRST_DAY.2).expect("valid date")
}

pub fn last_day() -> NaiveDate {
    first_day() + Days::new(DAYS - 1)
}

struct Place {
    name: &'static str,
    level: &'static str,
    county: &'static str,
    state: &'static str,
    lat: f64,
    lon: f64,
    place_q: Option<&'static str>,
    county_q: Option<&'static str>,
}

const fn p(
    name: &'static str,
    level: &'static str,
    county: &'static str,
    state: &'static str,
    lat: f64,
    lon: f64,
    place_q: Option<&'static str>,
    county_q: Option<&'static str>,
) -> Place {
    Place { name, level, county, state, lat, lon, place_q, county_q }
}

const IRELAND: [Place; 12] = [
    p("Dublin", "city", "County Dublin", "Leinster", 53.364, -6.3501, Some("Q1761"), Some("Q173500")),
    p("Cork", "city", "County Cork", "Munster", 51.8472, -8.4861, Some("Q36647"), Some("Q162475")),
    p("Cobh", "town", "County Cork", "Munster", 51.8503, -8.2967, None, Some("Q162475")),
    p("Galway", "city", "County Galway", "Connacht", 53.2707, -9.0568, Some("Q129610"), Some("Q184743")),
    p("Limerick", "city", "County Limerick", "Munster", 52.6638, -8.6267, Some("Q133118"), Some("Q184783")),
    p("Shannon", "town", "County Clare", "Munster", 52.7019, -8.9248, None, Some("Q181862")),
    p("Belmullet", "town", "County Mayo", "Connacht", 54.2275, -9.9903, None, Some("Q179325")),
    p("Malin Head", "village", "County Donegal", "Ulster", 55.3717, -7.3392, None, Some("Q179294")),
    p("Valentia", "village", "County Kerry", "Munster", 51.9381, -10.2417, None, Some("Q184469")),
    p("Mullingar", "town", "County Westmeath", "Leinster", 53.5259, -7.3381, None, Some("Q182591")),
    p("Kilkenny", "city", "County Kilkenny", "Leinster", 52.6541, -7.2448, Some("Q207628"), Some("Q182209")),
    p("Athenry", "town", "County Galway", "Connacht", 53.2964, -8.7431, None, Some("Q184743")),
];

const UK: [Place; 18] = [
    p("London", "city", "Greater London", "England", 51.4779, -0.4614, Some("Q84"), Some("Q23306")),
    p("Oxford", "city", "Oxfordshire", "England", 51.7607, -1.2625, Some("Q34217"), Some("Q23169")),
    p("Cambridge", "city", "Cambridgeshire", "England", 52.2053, 0.1218, Some("Q350"), Some("Q23112")),
    p("Manchester", "city", "Greater Manchester", "England", 53.3537, -2.2750, Some("Q18125"), Some("Q23099")),
    p("Liverpool", "city", "Merseyside", "England", 53.4084, -2.9916, Some("Q24826"), Some("Q23100")),
    p("Newcastle upon Tyne", "city", "Tyne and Wear", "England", 54.9783, -1.6178, Some("Q1425428"), Some("Q23125")),
    p("Plymouth", "city", "Devon", "England", 50.3755, -4.1427, Some("Q43382"), Some("Q23156")),
    p("Exeter", "city", "Devon", "England", 50.7184, -3.5339, Some("Q134672"), Some("Q23156")),
    p("Bristol", "city", "City of Bristol", "England", 51.4545, -2.5879, Some("Q23154"), None),
    p("Edinburgh", "city", "City of Edinburgh", "Scotland", 55.9533, -3.1883, Some("Q23436"), Some("Q2379199")),
    p("Glasgow", "city", "Glasgow City", "Scotland", 55.8642, -4.2518, Some("Q4093"), Some("Q2380209")),
    p("Aberdeen", "city", "Aberdeen City", "Scotland", 57.1497, -2.0943, Some("Q36405"), Some("Q2378886")),
    p("Inverness", "city", "Highland", "Scotland", 57.4778, -4.2247, Some("Q160493"), Some("Q208279")),
    p("Lerwick", "town", "Shetland Islands", "Scotland", 60.1546, -1.1494, Some("Q645405"), Some("Q47134")),
    p("Cardiff", "city", "Cardiff", "Wales", 51.4816, -3.1791, Some("Q10690"), None),
    p("Aberystwyth", "town", "Ceredigion", "Wales", 52.4153, -4.0829, Some("Q213154"), Some("Q217123")),
    p("Belfast", "city", "County Antrim", "Northern Ireland", 54.5973, -5.9301, Some("Q10686"), Some("Q189225")),
    p("Armagh", "city", "County Armagh", "Northern Ireland", 54.3503, -6.6528, Some("Q214011"), Some("Q189166")),
];

const IRELAND_Q: &str = "Q27";
const UK_Q: &str = "Q145";

fn state_q(state: &str) -> Option<&'static str> {
    match state {
        "England" => Some("Q21"),
        "Scotland" => Some("Q22"),
        "Wales" => Some("Q25"),
        "Northern Ireland" => Some("Q26"),
        _ => None,
    }
}

/// `wdt:P206` facts: (entity, water body).
const WATER: [(&str, &str); 24] = [
    ("Q173500", "Q41252"),
    ("Q162475", "Q97"),
    ("Q162475", "Q1141486"),
    ("Q184743", "Q97"),
    ("Q184743", "Q1338843"),
    ("Q184783", "Q190509"),
    ("Q181862", "Q97"),
    ("Q181862", "Q190509"),
    ("Q179325", "Q97"),
    ("Q179294", "Q97"),
    ("Q184469", "Q97"),
    ("Q23306", "Q19686"),
    ("Q23169", "Q19686"),
    ("Q23100", "Q41252"),
    ("Q23125", "Q1693"),
    ("Q23156", "Q34640"),
    ("Q2379199", "Q213186"),
    ("Q2378886", "Q1693"),
    ("Q208279", "Q1693"),
    ("Q47134", "Q1693"),
    ("Q217123", "Q1049326"),
    ("Q189225", "Q41252"),
    // City-level and country-level facts, outside the county hop.
    ("Q36647", "Q1477264"),
    ("Q27", "Q41252"),
];

const WATER_LABELS: [(&str, &str); 11] = [
    ("Q41252", "Irish Sea"),
    ("Q97", "Atlantic Ocean"),
    ("Q1141486", "Celtic Sea"),
    ("Q1338843", "Galway Bay"),
    ("Q190509", "River Shannon"),
    ("Q19686", "River Thames"),
    ("Q1693", "North Sea"),
    ("Q34640", "English Channel"),
    ("Q213186", "Firth of Forth"),
    ("Q1049326", "Cardigan Bay"),
    ("Q1477264", "River Lee"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixtureSummary {
    pub stations: usize,
    pub observations: usize,
    pub geocoded: usize,
}

struct Station {
    id: String,
    name: String,
    lat: f64,
    lon: f64,
    elevation: Option<f64>,
    location: &'static str,
    place: Option<(&'static Place, &'static str)>,
}

fn stations() -> Vec<Station> {
    let mut out = Vec::new();
    let mut ie = 50;
    for place in &IRELAND {
        for k in 0..2 {
            let id = if place.name == "Dublin" && k == 0 {
                DUBLIN_STATION.to_owned()
            } else if place.name == "Cork" && k == 0 {
                TWO_VARIABLE_STATION.to_owned()
            } else {
                ie += 1;
                if ie == 55 || ie == 69 {
                    ie += 1;
                }
                format!("GHCND:EI0000039{ie:02}")
            };
            let name = if id == DUBLIN_STATION {
                "DUBLIN PHOENIX PARK, EI".to_owned()
            } else {
                format!("{} {}, EI", place.name.to_uppercase(), ["AIRPORT", "EAST"][k])
            };
            let (dlat, dlon) = [(0.0, 0.0), (0.021, 0.034)][k];
            out.push(Station {
                id,
                name,
                lat: round4(place.lat + dlat),
                lon: round4(place.lon + dlon),
                elevation: Some(10.0 + 7.0 * out.len() as f64),
                location: "FIPS:EI",
                place: Some((place, "ie")),
            });
        }
    }
    for (i, place) in UK.iter().enumerate() {
        for k in 0..2 {
            let (dlat, dlon) = [(0.0, 0.0), (-0.018, 0.027)][k];
            out.push(Station {
                id: format!("GHCND:UKM000{:05}", 3000 + 2 * i + k),
                name: format!("{} {}, UK", place.name.to_uppercase(), ["WEATHER CENTRE", "PARK"][k]),
                lat: round4(place.lat + dlat),
                lon: round4(place.lon + dlon),
                // Some UK records omit elevation.
                elevation: (k == 0).then(|| 5.0 + 11.0 * i as f64),
                location: "FIPS:UK",
                place: Some((place, "gb")),
            });
        }
    }
    out.push(Station {
        id: BUOY_STATION.to_owned(),
        name: "M5 BUOY, EI".to_owned(),
        lat: 51.69,
        lon: -6.704,
        elevation: None,
        location: "FIPS:EI",
        place: None,
    });
    out
}

fn round4(x: f64) -> f64 {
    (x * 10_000.0).round() / 10_000.0
}

fn datatypes_for(id: &str) -> &'static [&'static str] {
    if id == TWO_VARIABLE_STATION {
        &["PRCP", "TMAX"]
    } else {
        &["PRCP", "TMAX", "TMIN"]
    }
}

fn write_json(dir: &Path, name: &str, v: &Value) -> io::Result<()> {
    fs::write(dir.join(name), serde_json::to_string(v).map_err(io::Error::other)?)
}

/// Writes the corpus into `dir`, which is created if needed. Output is
/// byte-identical across runs.
pub fn generate(dir: &Path) -> io::Result<FixtureSummary> {
    fs::create_dir_all(dir)?;
    let mut rng = StdRng::seed_from_u64(SEED);
    let both = json!(["GHCND", "GSOY"]);

    write_json(
        dir,
        "datasets.json",
        &json!([
            {"uid": "gov.noaa.ncdc:C00861", "id": "GHCND", "name": "Daily Summaries", "mindate": "1763-01-01", "maxdate": "2021-04-30", "datacoverage": 1},
            {"uid": "gov.noaa.ncdc:C00947", "id": "GSOY", "name": "Global Summary of the Year", "mindate": "1763-01-01", "maxdate": "2020-01-01", "datacoverage": 1}
        ]),
    )?;
    write_json(
        dir,
        "datacategories.json",
        &json!([
            {"id": "PRCP", "name": "Precipitation", "_datasetid": both},
            {"id": "TEMP", "name": "Air Temperature", "_datasetid": both}
        ]),
    )?;
    write_json(
        dir,
        "datatypes.json",
        &json!([
            {"id": "PRCP", "name": "Precipitation", "mindate": "1781-01-01", "maxdate": "2021-04-30", "datacoverage": 1, "_datasetid": "GHCND", "_datacategoryid": "PRCP"},
            {"id": "TMAX", "name": "Maximum temperature", "mindate": "1763-01-01", "maxdate": "2021-04-30", "datacoverage": 1, "_datasetid": "GHCND", "_datacategoryid": "TEMP"},
            {"id": "TMIN", "name": "Minimum temperature", "mindate": "1763-01-01", "maxdate": "2021-04-30", "datacoverage": 1, "_datasetid": "GHCND", "_datacategoryid": "TEMP"}
        ]),
    )?;
    write_json(
        dir,
        "locationcategories.json",
        &json!([
            {"id": "CITY", "name": "City"},
            {"id": "CNTRY", "name": "Country"}
        ]),
    )?;
    write_json(
        dir,
        "locations.json",
        &json!([
            {"id": "FIPS:EI", "name": "Ireland", "mindate": "1832-01-01", "maxdate": "2021-04-30", "datacoverage": 1, "_datasetid": both, "_locationcategoryid": "CNTRY"},
            {"id": "FIPS:UK", "name": "United Kingdom", "mindate": "1753-01-01", "maxdate": "2021-04-30", "datacoverage": 1, "_datasetid": both, "_locationcategoryid": "CNTRY"},
            {"id": "FIPS:FR", "name": "France", "mindate": "1775-01-01", "maxdate": "2021-04-30", "datacoverage": 1, "_datasetid": both, "_locationcategoryid": "CNTRY"}
        ]),
    )?;

    let stations = stations();
    let mut station_rows = Vec::new();
    for s in &stations {
        let mut row = json!({
            "id": s.id, "name": s.name, "latitude": s.lat, "longitude": s.lon,
            "mindate": "1990-01-01", "maxdate": "2021-04-30", "datacoverage": 0.95,
            "_datasetid": "GHCND", "_locationid": s.location,
        });
        if let Some(e) = s.elevation {
            row["elevation"] = json!(e);
            row["elevationUnit"] = json!("METERS");
        }
        station_rows.push(row);
    }
    // A corrupt record the mapper must reject.
    station_rows.push(json!({"id": "GHCND:UKM00009999", "name": "CORRUPT, UK", "latitude": 95.0, "longitude": -2.0, "_datasetid": "GHCND", "_locationid": "FIPS:UK"}));
    write_json(dir, "stations.json", &Value::Array(station_rows))?;

    let mut data = Vec::new();
    for s in &stations {
        let start = if rng.random_bool(0.3) { rng.random_range(1..25) } else { 0 };
        for dt in datatypes_for(&s.id) {
            for d in start..DAYS {
                if !rng.random_bool(0.95) {
                    continue;
                }
                let date = first_day() + Days::new(d);
                let value: i64 = match *dt {
                    "PRCP" => {
                        if rng.random_bool(0.35) {
                            0
                        } else {
                            rng.random_range(1..320)
                        }
                    }
                    "TMAX" => rng.random_range(40..190),
                    _ => rng.random_range(-40..90),
                };
                data.push(json!({
                    "date": format!("{}T00:00:00", date.format("%Y-%m-%d")),
                    "datatype": dt, "station": s.id, "attributes": ",,E,", "value": value,
                    "_datasetid": "GHCND", "_locationid": s.location,
                }));
            }
        }
    }
    // Impossible date: fetched by any window spanning late February, then
    // rejected by the mapper.
    data.push(json!({"date": "2021-02-30T00:00:00", "datatype": "PRCP", "station": DUBLIN_STATION, "attributes": ",,E,", "value": 1, "_datasetid": "GHCND", "_locationid": "FIPS:EI"}));
    let observations = data.len() - 1;
    write_json(dir, "data.json", &Value::Array(data))?;

    let mut reverse = Vec::new();
    for (i, s) in stations.iter().enumerate() {
        let Some((place, cc)) = s.place else { continue };
        let (country, country_q) = if cc == "ie" { ("Ireland", IRELAND_Q) } else { ("United Kingdom", UK_Q) };
        let mut address = serde_json::Map::new();
        address.insert(place.level.into(), json!(place.name));
        address.insert("county".into(), json!(place.county));
        address.insert("state".into(), json!(place.state));
        address.insert("country".into(), json!(country));
        address.insert("country_code".into(), json!(cc));
        let mut tags = serde_json::Map::new();
        if let Some(q) = place.place_q {
            tags.insert("wikidata".into(), json!(q));
        }
        if let Some(q) = place.county_q {
            tags.insert("county:wikidata".into(), json!(q));
        }
        if let Some(q) = state_q(place.state) {
            tags.insert("state:wikidata".into(), json!(q));
        }
        tags.insert("country:wikidata".into(), json!(country_q));
        reverse.push(json!({
            "_lat": s.lat, "_lon": s.lon,
            "place_id": 100_000 + i, "osm_type": "relation", "osm_id": 2_000_000 + i,
            "lat": s.lat.to_string(), "lon": s.lon.to_string(),
            "category": "boundary", "type": "administrative", "addresstype": place.level, "name": place.name,
            "display_name": format!("{}, {}, {}, {}", place.name, place.county, place.state, country),
            "address": address, "extratags": tags,
        }));
    }
    let geocoded = reverse.len();
    write_json(dir, "reverse.json", &Value::Array(reverse))?;

    fs::write(dir.join("wikidata.nt"), wikidata_nt())?;
    fs::write(dir.join("supplementary.nt"), supplementary_nt())?;
    Ok(FixtureSummary { stations: stations.len(), observations, geocoded })
}

fn wikidata_nt() -> String {
    const WD: &str = "http://www.wikidata.org/entity/";
    const LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
    const P206: &str = "http://www.wikidata.org/prop/direct/P206";
    let mut labels: Vec<(&str, &str)> = vec![(IRELAND_Q, "Ireland"), (UK_Q, "United Kingdom")];
    for place in IRELAND.iter().chain(UK.iter()) {
        if let Some(q) = place.place_q {
            labels.push((q, place.name));
        }
        if let Some(q) = place.county_q {
            labels.push((q, place.county));
        }
        if let Some(q) = state_q(place.state) {
            labels.push((q, place.state));
        }
    }
    labels.extend(WATER_LABELS);
    labels.sort();
    labels.dedup();
    let mut lines: Vec<String> = labels.iter().map(|(q, l)| format!("<{WD}{q}> <{LABEL}> \"{l}\"@en .")).collect();
    lines.extend(WATER.iter().map(|(s, o)| format!("<{WD}{s}> <{P206}> <{WD}{o}> .")));
    lines.sort();
    lines.join("\n") + "\n"
}

/// Monitor and reading IRIs under `http://example.org/env/`.
pub const ENV_NS: &str = "http://example.org/env#";

fn supplementary_nt() -> String {
    let base = format!("{}resource/station/", climakg_core::ontology::DEFAULT_BASE);
    let xsd_double = "http://www.w3.org/2001/XMLSchema#double";
    let rows = [(DUBLIN_STATION, "M1", "7.5"), (TWO_VARIABLE_STATION, "M2", "5.25"), ("GHCND:UKM00003000", "M3", "11.0")];
    let mut out = String::new();
    for (station, monitor, pm) in rows {
        let m = format!("http://example.org/env/monitor/{monitor}");
        out.push_str(&format!("<{base}{station}> <{ENV_NS}nearestAirQualityMonitor> <{m}> .\n"));
        out.push_str(&format!("<{m}> <{ENV_NS}pm25> \"{pm}\"^^<{xsd_double}> .\n"));
    }
    out
}

/// Observation dates covered by [`deploy`].
pub fn horizon() -> (NaiveDate, NaiveDate) {
    (first_day(), last_day())
}

/// A store built from the corpus the way a deployment would build it.
#[derive(Debug)]
pub struct Deployment {
    pub store: Dataset,
    pub syncs: Vec<SyncReport>,
    pub enrichment: EnrichReport,
    pub wikidata_triples: usize,
}

/// Weekly 28-day syncs ending on the last fixture day, then enrichment
/// and the Wikidata import.
pub fn deploy(dir: &Path, o: &Ontology) -> anyhow::Result<Deployment> {
    let cfg = SyncConfig { fixture_dir: Some(dir.to_owned()), ..SyncConfig::default() };
    let transport = FixtureTransport::new(dir);
    let mut store = Dataset::new();
    let mut syncs = Vec::new();
    let step = u64::from(cfg.schedule_interval_days);
    let mut now = first_day() + Days::new(u64::from(cfg.window_days));
    loop {
        syncs.push(run_sync(&mut store, &cfg, &transport, o, now)?);
        if now >= last_day() {
            break;
        }
        now = (now + Days::new(step)).min(last_day());
    }
    let enrichment = enrich_all(&mut store, o, &Geocoder::fixture(&transport), false);
    let wd = fs::read_to_string(dir.join("wikidata.nt"))?;
    let wikidata_triples = import_wikidata_snapshot(&mut store, o, &wd)?;
    Ok(Deployment { store, syncs, enrichment, wikidata_triples })
}
