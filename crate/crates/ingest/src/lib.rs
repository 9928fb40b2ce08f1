//! NOAA Climate Data Online ingestion: HTTP and fixture transports,
//! pagination, record mappers and reverse-geocoding enrichment.

pub mod cdo;
pub mod geo;
pub mod mapping;
pub mod transport;

pub use cdo::{fetch_all, FetchError, FetchOptions, FetchPlan};
pub use geo::{enrich_station, import_wikidata_snapshot, parse_reverse, AdminArea, GeoError, GeocodeResult, Geocoder};
pub use mapping::{map_metadata, map_observation, map_records, map_station, MapError, MapOutcome, MetadataRec, ObservationRec, StationRec};
pub use transport::{FixtureTransport, HttpResponse, LiveTransport, Transport, TransportError};
