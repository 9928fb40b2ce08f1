//! Deployment configuration: one JSON document, every field optional.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Environment variable holding the CDO API token.
pub const TOKEN_ENV: &str = "NOAA_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyncConfig {
    /// CDO dataset ids, e.g. `GHCND`.
    pub datasets: Vec<String>,
    /// CDO location ids, e.g. `FIPS:EI`.
    pub locations: Vec<String>,
    /// Length of the re-fetched history, in days.
    pub window_days: u32,
    /// Days between scheduled syncs; must not exceed `window_days`.
    pub schedule_interval_days: u32,
    pub noaa_base: String,
    pub geocoder_base: String,
    /// CDO `units` parameter; unset returns raw values.
    pub units: Option<String>,
    pub page_limit: usize,
    pub request_delay_ms: u64,
    pub request_budget: Option<usize>,
    pub snapshot_path: PathBuf,
    /// When set, all HTTP traffic is served from this directory.
    pub fixture_dir: Option<PathBuf>,
    /// Address levels requested from the geocoder, finest first.
    pub geocode_levels: Vec<String>,
    pub listen: String,
    pub incoming_cap: usize,
    #[serde(skip)]
    pub token: Option<String>,
}

impl Default for SyncConfig {
    fn default() -> Self {
        SyncConfig {
            datasets: vec!["GHCND".into()],
            locations: vec!["FIPS:EI".into(), "FIPS:UK".into()],
            window_days: 28,
            schedule_interval_days: 7,
            noaa_base: climakg_ingest::cdo::DEFAULT_BASE_URL.into(),
            geocoder_base: climakg_ingest::geo::DEFAULT_GEOCODER_URL.into(),
            units: None,
            page_limit: 1000,
            request_delay_ms: 250,
            request_budget: None,
            snapshot_path: PathBuf::from("climakg.nq"),
            fixture_dir: None,
            geocode_levels: climakg_ingest::geo::LEVELS.iter().map(|s| (*s).to_owned()).collect(),
            listen: "127.0.0.1:3030".into(),
            incoming_cap: 100,
            token: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid config {0}: {1}")]
    Parse(PathBuf, serde_json::Error),
    #[error("{0}")]
    Invalid(String),
}

impl SyncConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_owned(), e))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse(path.to_owned(), e))
    }

    /// Reads the token from the environment; it is never stored in files.
    pub fn with_env_token(mut self) -> Self {
        self.token = std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty());
        self
    }

    pub fn fixture_mode(&self) -> bool {
        self.fixture_dir.is_some()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.window_days == 0 {
            return bad("window_days must be at least 1".into());
        }
        if self.schedule_interval_days == 0 || self.schedule_interval_days > self.window_days {
            return bad(format!(
                "schedule_interval_days ({}) must be between 1 and window_days ({}) or windows leave gaps",
                self.schedule_interval_days, self.window_days
            ));
        }
        if self.datasets.is_empty() || self.locations.is_empty() {
            return bad("at least one dataset and one location are required".into());
        }
        if !(1..=1000).contains(&self.page_limit) {
            return bad("page_limit must be between 1 and 1000".into());
        }
        if self.geocode_levels.is_empty() {
            return bad("geocode_levels must not be empty".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SyncConfig::default();
        c.validate().unwrap();
        assert_eq!((c.window_days, c.schedule_interval_days), (28, 7));
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c: SyncConfig = serde_json::from_str(r#"{"locations": ["FIPS:UK"], "window_days": 14}"#).unwrap();
        assert_eq!(c.locations, ["FIPS:UK"]);
        assert_eq!(c.datasets, ["GHCND"]);
        assert!(serde_json::from_str::<SyncConfig>(r#"{"token": "x"}"#).is_err());
    }

    #[test]
    fn interval_longer_than_window_is_rejected() {
        let c = SyncConfig { window_days: 7, schedule_interval_days: 8, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SyncConfig { window_days: 0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
