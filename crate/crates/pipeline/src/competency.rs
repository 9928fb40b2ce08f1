//! The eleven competency questions as executable queries, plus the
//! water-body join against the Wikidata graph.
//!
//! The query texts are reconstructions written for this store's vocabulary.
//! Questions 2 and 3 combine a coordinate query with the helpers in
//! [`crate::geo`]. Expected answers, when available, come from
//! [`FixtureScan`], which reads the raw fixture files and never touches the
//! store.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use std::time::{Duration, Instant};

use chrono::{NaiveDate, NaiveDateTime};
use climakg_core::vocab::wikidata;
use climakg_core::{parse_ntriples, Dataset, Iri, Ontology, ResourceKind, Term};
use climakg_sparql::{execute, QueryResults};
use serde::Serialize;
use serde_json::Value;

use crate::fixture;
use crate::geo::{haversine_km, in_bbox, nearest_station, stations_in_bbox, GeoPoint};

pub type Row = Vec<String>;

pub const QUESTIONS: [&str; 11] = [
    "Where are all the stations located in a particular administrative region?",
    "Which station is nearest to a certain station?",
    "Which stations fall inside a range of latitude and longitude?",
    "How can stations be grouped by observed climatic variable?",
    "Which climate variables does a particular station record?",
    "How long has a station monitored a climatic variable?",
    "How is a time series for one climatic variable retrieved?",
    "How is a time series for several climatic variables retrieved?",
    "How are observations aggregated by temporal resolution?",
    "What is a station's geographical context?",
    "How is extra environmental data integrated for cross-domain analysis?",
];

/// Named graph that receives supplementary documents for question 11.
pub fn supplementary_graph(o: &Ontology) -> Iri {
    Iri::new(format!("{}graph/supplementary", o.base())).expect("valid graph IRI")
}

/// Inputs of the parameterised questions, as raw CDO and geocoder ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CqParams {
    /// `(country code, level, name)` of the region for question 1.
    pub region: (String, String, String),
    pub station: String,
    /// Station for question 5.
    pub variables_station: String,
    pub datatype: String,
    pub datatypes: [String; 2],
    /// South, north, west, east.
    pub bbox: [f64; 4],
    pub k: usize,
}

impl CqParams {
    /// Parameters matching the generated fixture.
    pub fn fixture() -> Self {
        CqParams {
            region: ("ie".into(), "county".into(), "County Cork".into()),
            station: fixture::DUBLIN_STATION.into(),
            variables_station: fixture::TWO_VARIABLE_STATION.into(),
            datatype: "TMAX".into(),
            datatypes: ["TMAX".into(), "TMIN".into()],
            bbox: [51.4, 55.5, -10.7, -5.9],
            k: 3,
        }
    }

    pub fn region_iri(&self, o: &Ontology) -> Iri {
        let (cc, level, name) = &self.region;
        o.mint_resource_iri(ResourceKind::Location, &format!("osm:{cc}:{level}:{name}")).expect("non-empty id")
    }
}

fn station(o: &Ontology, id: &str) -> Iri {
    o.mint_resource_iri(ResourceKind::Station, id).expect("non-empty id")
}

fn datatype(o: &Ontology, id: &str) -> Iri {
    o.mint_resource_iri(ResourceKind::DataType, id).expect("non-empty id")
}

/// Query text of question `n` (1-based).
pub fn query(n: usize, o: &Ontology, p: &CqParams) -> String {
    let body = match n {
        1 => format!(
            "SELECT DISTINCT ?station ?name WHERE {{
  ?station a ca:Station ;
    ca:name ?name ;
    ca:isLocatedIn ?l1 .
  OPTIONAL {{
    ?l1 ca:isLocatedIn ?l2 .
    OPTIONAL {{
      ?l2 ca:isLocatedIn ?l3 .
      OPTIONAL {{ ?l3 ca:isLocatedIn ?l4 }}
    }}
  }}
  FILTER(?l1 = <{r}> || ?l2 = <{r}> || ?l3 = <{r}> || ?l4 = <{r}>)
}}
ORDER BY ?station
",
            r = p.region_iri(o).as_str()
        ),
        2 => "SELECT ?station ?lat ?long WHERE {
  ?station a ca:Station ;
    wgs84:lat ?lat ;
    wgs84:long ?long .
}
"
        .to_owned(),
        3 => {
            let [s, n, w, e] = p.bbox;
            format!(
                "SELECT ?station ?lat ?long WHERE {{
  ?station a ca:Station ;
    wgs84:lat ?lat ;
    wgs84:long ?long .
  FILTER(?lat >= {s} && ?lat <= {n} && ?long >= {w} && ?long <= {e})
}}
ORDER BY ?station
"
            )
        }
        4 => "SELECT DISTINCT ?datatype ?station WHERE {
  ?obs ca:sourceStation ?station ;
    sosa:hasResult ?result .
  ?result ca:withDataType ?datatype .
}
ORDER BY ?datatype ?station
"
        .to_owned(),
        5 => format!(
            "SELECT DISTINCT ?datatype WHERE {{
  ?obs ca:sourceStation <{}> ;
    sosa:hasResult ?result .
  ?result ca:withDataType ?datatype .
}}
ORDER BY ?datatype
",
            station(o, &p.variables_station).as_str()
        ),
        6 => format!(
            "SELECT (MIN(?time) AS ?first) (MAX(?time) AS ?last) (COUNT(?obs) AS ?n) WHERE {{
  ?obs ca:sourceStation <{}> ;
    sosa:resultTime ?time ;
    sosa:hasResult ?result .
  ?result ca:withDataType <{}> .
}}
",
            station(o, &p.station).as_str(),
            datatype(o, &p.datatype).as_str()
        ),
        7 => format!(
            "SELECT ?time ?value WHERE {{
  ?obs ca:sourceStation <{}> ;
    sosa:resultTime ?time ;
    sosa:hasResult ?result .
  ?result ca:withDataType <{}> ;
    qudt:numericValue ?value .
}}
ORDER BY ?time
",
            station(o, &p.station).as_str(),
            datatype(o, &p.datatype).as_str()
        ),
        8 => format!(
            "SELECT ?time ?datatype ?value WHERE {{
  ?obs ca:sourceStation <{}> ;
    sosa:resultTime ?time ;
    sosa:hasResult ?result .
  ?result ca:withDataType ?datatype ;
    qudt:numericValue ?value .
  FILTER(?datatype = <{}> || ?datatype = <{}>)
}}
ORDER BY ?time ?datatype
",
            station(o, &p.station).as_str(),
            datatype(o, &p.datatypes[0]).as_str(),
            datatype(o, &p.datatypes[1]).as_str()
        ),
        9 => format!(
            "SELECT ?datatype ?year ?month (AVG(?value) AS ?mean) (COUNT(?value) AS ?n) WHERE {{
  ?obs ca:sourceStation <{}> ;
    sosa:resultTime ?time ;
    sosa:hasResult ?result .
  ?result ca:withDataType ?datatype ;
    qudt:numericValue ?value .
}}
GROUP BY ?datatype (YEAR(?time) AS ?year) (MONTH(?time) AS ?month)
ORDER BY ?datatype ?year ?month
",
            station(o, &p.station).as_str()
        ),
        10 => format!(
            "SELECT ?area1 ?name1 ?area2 ?name2 ?area3 ?name3 ?area4 ?name4 WHERE {{
  <{}> ca:isLocatedIn ?area1 .
  ?area1 ca:name ?name1 .
  OPTIONAL {{
    ?area1 ca:isLocatedIn ?area2 .
    ?area2 ca:name ?name2 .
    OPTIONAL {{
      ?area2 ca:isLocatedIn ?area3 .
      ?area3 ca:name ?name3 .
      OPTIONAL {{ ?area3 ca:isLocatedIn ?area4 . ?area4 ca:name ?name4 }}
    }}
  }}
}}
ORDER BY ?area1
",
            station(o, &p.station).as_str()
        ),
        11 => format!(
            "SELECT ?station ?monitor ?pm25 WHERE {{
  GRAPH <{}> {{
    ?station <{env}nearestAirQualityMonitor> ?monitor .
    ?monitor <{env}pm25> ?pm25 .
  }}
}}
ORDER BY ?station
",
            supplementary_graph(o).as_str(),
            env = fixture::ENV_NS
        ),
        _ => panic!("competency questions are numbered 1 to 11"),
    };
    format!("{}{body}", o.sparql_prologue())
}

/// Stations whose second-level containing area is linked to a Wikidata
/// entity located in or next to a body of water.
pub fn water_body_query(o: &Ontology) -> String {
    format!(
        "{}SELECT DISTINCT ?station ?waterBody WHERE {{
  ?station a ca:Station ;
    ca:isLocatedIn ?addr .
  ?addr ca:isLocatedIn ?loc .
  ?loc owl:sameAs ?wd .
  GRAPH <{}> {{ ?wd wdt:P206 ?waterBody }}
}}
ORDER BY ?station ?waterBody
",
        o.sparql_prologue(),
        o.wikidata_graph().as_str()
    )
}

fn cell(t: Option<&Term>) -> String {
    match t {
        Some(Term::Iri(i)) => i.as_str().to_owned(),
        Some(Term::Literal(l)) => l.lexical().to_owned(),
        None => String::new(),
    }
}

pub fn rows(r: &QueryResults) -> Vec<Row> {
    r.solutions.iter().map(|s| r.variables.iter().map(|v| cell(s.get(v))).collect()).collect()
}

/// Cells equal as strings, or as numbers within a relative 1e-9.
pub fn cells_match(a: &str, b: &str) -> bool {
    if a == b {
        return true;
    }
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0),
        _ => false,
    }
}

pub fn rows_match(actual: &[Row], expected: &[Row], ordered: bool) -> bool {
    if actual.len() != expected.len() {
        return false;
    }
    let eq = |a: &Row, b: &Row| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| cells_match(x, y));
    if ordered {
        actual.iter().zip(expected).all(|(a, b)| eq(a, b))
    } else {
        let mut a = actual.to_vec();
        let mut b = expected.to_vec();
        a.sort();
        b.sort();
        a.iter().zip(&b).all(|(x, y)| eq(x, y))
    }
}

/// Whether question `n`'s answer order is part of the answer.
pub fn is_ordered(n: usize) -> bool {
    matches!(n, 2 | 7 | 8 | 9)
}

#[derive(Debug, Clone, Serialize)]
pub struct CqOutcome {
    pub number: usize,
    pub question: &'static str,
    pub query: String,
    pub answer: Vec<Row>,
    pub expected: Option<Vec<Row>>,
    pub passed: bool,
    pub detail: String,
    #[serde(serialize_with = "secs")]
    pub duration: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub outcomes: Vec<CqOutcome>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    /// One line per question, with a row diff for failures.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.outcomes {
            let _ = writeln!(
                out,
                "CQ{:<2} {} {:>6} rows {:>8.1} ms  {}",
                c.number,
                if c.passed { "PASS" } else { "FAIL" },
                c.answer.len(),
                c.duration.as_secs_f64() * 1e3,
                c.question
            );
            if !c.detail.is_empty() {
                let _ = writeln!(out, "      {}", c.detail);
            }
            if let (false, Some(exp)) = (c.passed, &c.expected) {
                let got: BTreeSet<&Row> = c.answer.iter().collect();
                let want: BTreeSet<&Row> = exp.iter().collect();
                for r in want.difference(&got).take(10) {
                    let _ = writeln!(out, "      - {}", r.join(" | "));
                }
                for r in got.difference(&want).take(10) {
                    let _ = writeln!(out, "      + {}", r.join(" | "));
                }
            }
        }
        out
    }
}

fn days_between(first: &str, last: &str) -> Option<i64> {
    let f = NaiveDateTime::parse_from_str(first, "%Y-%m-%dT%H:%M:%S").ok()?;
    let l = NaiveDateTime::parse_from_str(last, "%Y-%m-%dT%H:%M:%S").ok()?;
    Some((l - f).num_days())
}

/// Runs question `n` and returns its answer rows. Questions 2, 3 and 6
/// post-process the query output in Rust.
pub fn answer(n: usize, store: &Dataset, o: &Ontology, p: &CqParams) -> Result<(Vec<Row>, String), String> {
    let text = query(n, o, p);
    let results = execute(store, &text).map_err(|e| e.to_string())?;
    let mut detail = String::new();
    let out = match n {
        2 => {
            let me = station(o, &p.station);
            let coords = rows(&results);
            let own = coords
                .iter()
                .find(|r| r[0] == me.as_str())
                .and_then(|r| GeoPoint::new(r[1].parse().ok()?, r[2].parse().ok()?))
                .ok_or_else(|| format!("station {} has no coordinates", p.station))?;
            nearest_station(own, p.k + 1, store, o)
                .into_iter()
                .filter(|(iri, _)| *iri != me)
                .take(p.k)
                .map(|(iri, d)| vec![iri.into_string(), d.to_string()])
                .collect()
        }
        3 => {
            let [s, nn, w, e] = p.bbox;
            let helper: Vec<Row> = stations_in_bbox(s, nn, w, e, store, o).into_iter().map(|i| vec![i.into_string()]).collect();
            let sparql: Vec<Row> = rows(&results).into_iter().map(|r| vec![r[0].clone()]).collect();
            if w <= e && !rows_match(&sparql, &helper, false) {
                return Err(format!("FILTER query found {} stations, bounding-box helper {}", sparql.len(), helper.len()));
            }
            helper
        }
        6 => {
            let r = rows(&results);
            let row = r.first().cloned().unwrap_or_default();
            if let Some(days) = row.first().zip(row.get(1)).and_then(|(f, l)| days_between(f, l)) {
                detail = format!("monitored for {days} days ({} to {})", row[0], row[1]);
            }
            r
        }
        _ => rows(&results),
    };
    Ok((out, detail))
}

/// Runs the eleven questions. Question 11 first loads `supplementary`
/// (N-Triples) into [`supplementary_graph`], replacing earlier content.
pub fn run_suite(store: &mut Dataset, o: &Ontology, p: &CqParams, scan: Option<&FixtureScan>, supplementary: Option<&str>) -> SuiteReport {
    let mut outcomes = Vec::new();
    for n in 1..=11 {
        let started = Instant::now();
        let mut setup_error = None;
        if n == 11 {
            match supplementary.map(parse_ntriples).transpose() {
                Ok(Some(triples)) => {
                    store.replace_graph(Some(&supplementary_graph(o)), triples);
                }
                Ok(None) => {}
                Err(e) => setup_error = Some(format!("supplementary document: {e}")),
            }
        }
        let result = match setup_error {
            Some(e) => Err(e),
            None => answer(n, store, o, p),
        };
        let expected = scan.map(|s| s.expected(n, o, p));
        let (answer, passed, detail) = match result {
            Ok((rows, detail)) => {
                let passed = match &expected {
                    Some(exp) => rows_match(&rows, exp, is_ordered(n)),
                    None => !rows.is_empty(),
                };
                (rows, passed, detail)
            }
            Err(e) => (Vec::new(), false, e),
        };
        outcomes.push(CqOutcome {
            number: n,
            question: QUESTIONS[n - 1],
            query: query(n, o, p),
            answer,
            expected,
            passed,
            detail,
            duration: started.elapsed(),
        });
    }
    SuiteReport { outcomes }
}

#[derive(Debug, Clone)]
struct ScanStation {
    id: String,
    name: String,
    point: GeoPoint,
}

#[derive(Debug, Clone)]
struct ScanObs {
    station: String,
    datatype: String,
    time: NaiveDateTime,
    value: f64,
}

/// Expected answers computed from the raw fixture files.
#[derive(Debug, Clone)]
pub struct FixtureScan {
    stations: Vec<ScanStation>,
    station_location: BTreeMap<String, String>,
    location_names: BTreeMap<String, String>,
    observations: Vec<ScanObs>,
    reverse: Vec<Value>,
    supplementary: String,
    p206: Vec<(String, String)>,
}

fn read_array(dir: &Path, name: &str) -> std::io::Result<Vec<Value>> {
    let text = std::fs::read_to_string(dir.join(name))?;
    match serde_json::from_str(&text)? {
        Value::Array(a) => Ok(a),
        _ => Err(std::io::Error::other(format!("{name} is not a JSON array"))),
    }
}

fn s(v: &Value, k: &str) -> Option<String> {
    v.get(k).and_then(Value::as_str).map(str::to_owned)
}

impl FixtureScan {
    /// Reads `dir`, keeping observations dated inside `horizon` (inclusive).
    pub fn load(dir: &Path, horizon: (NaiveDate, NaiveDate)) -> std::io::Result<Self> {
        let mut stations = Vec::new();
        let mut station_location = BTreeMap::new();
        for r in read_array(dir, "stations.json")? {
            let (Some(id), Some(lat), Some(lon)) = (s(&r, "id"), r.get("latitude").and_then(Value::as_f64), r.get("longitude").and_then(Value::as_f64)) else {
                continue;
            };
            let Some(point) = GeoPoint::new(lat, lon) else { continue };
            if let Some(loc) = s(&r, "_locationid") {
                station_location.insert(id.clone(), loc);
            }
            stations.push(ScanStation { id, name: s(&r, "name").unwrap_or_default(), point });
        }
        let location_names = read_array(dir, "locations.json")?
            .iter()
            .filter_map(|r| Some((s(r, "id")?, s(r, "name")?)))
            .collect();
        let mut observations = Vec::new();
        for r in read_array(dir, "data.json")? {
            let (Some(station), Some(datatype), Some(date), Some(value)) = (s(&r, "station"), s(&r, "datatype"), s(&r, "date"), r.get("value").and_then(Value::as_f64)) else {
                continue;
            };
            let Ok(time) = NaiveDateTime::parse_from_str(&date, "%Y-%m-%dT%H:%M:%S") else { continue };
            if (horizon.0..=horizon.1).contains(&time.date()) {
                observations.push(ScanObs { station, datatype, time, value });
            }
        }
        let reverse = read_array(dir, "reverse.json")?;
        let supplementary = std::fs::read_to_string(dir.join("supplementary.nt")).unwrap_or_default();
        let p206 = std::fs::read_to_string(dir.join("wikidata.nt"))
            .ok()
            .and_then(|t| parse_ntriples(&t).ok())
            .unwrap_or_default()
            .into_iter()
            .filter(|t| t.predicate.as_str() == wikidata::P206)
            .filter_map(|t| Some((t.subject.into_string(), t.object.as_iri()?.as_str().to_owned())))
            .collect();
        Ok(FixtureScan { stations, station_location, location_names, observations, reverse, supplementary, p206 })
    }

    pub fn supplementary(&self) -> &str {
        &self.supplementary
    }

    fn reverse_for(&self, p: GeoPoint) -> Option<&Value> {
        self.reverse.iter().find(|r| {
            let lat = r.get("_lat").and_then(Value::as_f64).unwrap_or(f64::NAN);
            let lon = r.get("_lon").and_then(Value::as_f64).unwrap_or(f64::NAN);
            (lat - p.lat).abs() < 1e-6 && (lon - p.lon).abs() < 1e-6
        })
    }

    /// `(level, name, Q-id)` of the station's address, finest first.
    fn address(&self, st: &ScanStation) -> (String, Vec<(String, String, Option<String>)>) {
        let Some(r) = self.reverse_for(st.point) else { return (String::new(), Vec::new()) };
        let addr = r.get("address").cloned().unwrap_or(Value::Null);
        let tags = r.get("extratags").cloned().unwrap_or(Value::Null);
        let own = s(r, "addresstype");
        let cc = s(&addr, "country_code").unwrap_or_default();
        let levels = climakg_ingest::geo::LEVELS
            .iter()
            .filter_map(|l| {
                let name = s(&addr, l)?;
                let q = s(&tags, &format!("{l}:wikidata")).or_else(|| (own.as_deref() == Some(l)).then(|| s(&tags, "wikidata")).flatten());
                Some(((*l).to_owned(), name, q))
            })
            .collect();
        (cc, levels)
    }

    fn area_iri(o: &Ontology, cc: &str, level: &str, name: &str) -> String {
        o.mint_resource_iri(ResourceKind::Location, &format!("osm:{cc}:{level}:{name}")).expect("non-empty id").into_string()
    }

    fn obs_of<'a>(&'a self, station: &'a str) -> impl Iterator<Item = &'a ScanObs> + 'a {
        self.observations.iter().filter(move |ob| ob.station == station)
    }

    /// Expected rows of question `n`.
    pub fn expected(&self, n: usize, o: &Ontology, p: &CqParams) -> Vec<Row> {
        let st = |id: &str| station(o, id).into_string();
        let dt = |id: &str| datatype(o, id).into_string();
        let time = |t: &NaiveDateTime| t.format("%Y-%m-%dT%H:%M:%S").to_string();
        match n {
            1 => {
                let (cc, level, name) = &p.region;
                self.stations
                    .iter()
                    .filter(|x| {
                        let (c, addr) = self.address(x);
                        c == *cc && addr.iter().any(|(l, nm, _)| l == level && nm == name)
                    })
                    .map(|x| vec![st(&x.id), x.name.clone()])
                    .collect()
            }
            2 => {
                let Some(me) = self.stations.iter().find(|x| x.id == p.station) else { return Vec::new() };
                let mut d: Vec<(String, f64)> =
                    self.stations.iter().filter(|x| x.id != me.id).map(|x| (st(&x.id), haversine_km(me.point, x.point))).collect();
                d.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
                d.into_iter().take(p.k).map(|(i, km)| vec![i, km.to_string()]).collect()
            }
            3 => {
                let [s, nn, w, e] = p.bbox;
                self.stations.iter().filter(|x| in_bbox(x.point, s, nn, w, e)).map(|x| vec![st(&x.id)]).collect()
            }
            4 => {
                let pairs: BTreeSet<(String, String)> = self.observations.iter().map(|ob| (dt(&ob.datatype), st(&ob.station))).collect();
                pairs.into_iter().map(|(a, b)| vec![a, b]).collect()
            }
            5 => {
                let set: BTreeSet<String> = self.obs_of(&p.variables_station).map(|ob| dt(&ob.datatype)).collect();
                set.into_iter().map(|d| vec![d]).collect()
            }
            6 => {
                let times: Vec<NaiveDateTime> = self.obs_of(&p.station).filter(|ob| ob.datatype == p.datatype).map(|ob| ob.time).collect();
                match (times.iter().min(), times.iter().max()) {
                    (Some(a), Some(b)) => vec![vec![time(a), time(b), times.len().to_string()]],
                    _ => vec![vec![String::new(), String::new(), "0".into()]],
                }
            }
            7 => {
                let mut v: Vec<&ScanObs> = self.obs_of(&p.station).filter(|ob| ob.datatype == p.datatype).collect();
                v.sort_by_key(|ob| ob.time);
                v.into_iter().map(|ob| vec![time(&ob.time), ob.value.to_string()]).collect()
            }
            8 => {
                let mut v: Vec<(NaiveDateTime, String, f64)> = self
                    .obs_of(&p.station)
                    .filter(|ob| p.datatypes.contains(&ob.datatype))
                    .map(|ob| (ob.time, dt(&ob.datatype), ob.value))
                    .collect();
                v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
                v.into_iter().map(|(t, d, x)| vec![time(&t), d, x.to_string()]).collect()
            }
            9 => {
                let mut groups: BTreeMap<(String, i32, u32), Vec<f64>> = BTreeMap::new();
                for ob in self.obs_of(&p.station) {
                    use chrono::Datelike;
                    groups.entry((dt(&ob.datatype), ob.time.year(), ob.time.month())).or_default().push(ob.value);
                }
                groups
                    .into_iter()
                    .map(|((d, y, m), v)| vec![d, y.to_string(), m.to_string(), (v.iter().sum::<f64>() / v.len() as f64).to_string(), v.len().to_string()])
                    .collect()
            }
            10 => {
                let Some(me) = self.stations.iter().find(|x| x.id == p.station) else { return Vec::new() };
                let mut out = Vec::new();
                if let Some(loc) = self.station_location.get(&me.id) {
                    if let Some(name) = self.location_names.get(loc) {
                        let iri = o.mint_resource_iri(ResourceKind::Location, loc).expect("non-empty id").into_string();
                        out.push(vec![iri, name.clone(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new()]);
                    }
                }
                let (cc, addr) = self.address(me);
                if !addr.is_empty() {
                    let mut row: Row = addr.iter().take(4).flat_map(|(l, nm, _)| [Self::area_iri(o, &cc, l, nm), nm.clone()]).collect();
                    row.resize(8, String::new());
                    out.push(row);
                }
                out
            }
            11 => {
                let triples = parse_ntriples(&self.supplementary).unwrap_or_default();
                let link = format!("{}nearestAirQualityMonitor", fixture::ENV_NS);
                let pm = format!("{}pm25", fixture::ENV_NS);
                triples
                    .iter()
                    .filter(|t| t.predicate.as_str() == link)
                    .flat_map(|t| {
                        let m = t.object.as_iri().cloned();
                        let pm = pm.clone();
                        triples
                            .iter()
                            .filter(move |u| Some(&u.subject) == m.as_ref() && u.predicate.as_str() == pm.as_str())
                            .map(move |u| vec![t.subject.as_str().to_owned(), u.subject.as_str().to_owned(), cell(Some(&u.object))])
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    /// Expected rows of [`water_body_query`].
    pub fn expected_water_bodies(&self, o: &Ontology) -> Vec<Row> {
        let _ = o;
        let mut out = BTreeSet::new();
        for x in &self.stations {
            let (_, addr) = self.address(x);
            let Some((_, _, Some(q))) = addr.get(1) else { continue };
            let wd = format!("{}{q}", wikidata::ENTITY);
            for (s, w) in &self.p206 {
                if *s == wd {
                    out.insert(vec![station(o, &x.id).into_string(), w.clone()]);
                }
            }
        }
        out.into_iter().collect()
    }
}
