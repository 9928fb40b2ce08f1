//! Pipeline orchestration: configuration, sliding-window synchronisation,
//! geocoder enrichment, snapshots, coordinate helpers, competency questions
//! and the offline fixture corpus.

pub mod competency;
pub mod config;
pub mod enrich;
pub mod fixture;
pub mod geo;
pub mod snapshot;
pub mod sync;

pub use config::{ConfigError, SyncConfig, TOKEN_ENV};
pub use snapshot::SnapshotError;
pub use sync::{run_sync, SyncError, SyncReport};
