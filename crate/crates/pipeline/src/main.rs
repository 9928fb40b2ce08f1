use std::io::Read as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use chrono::{Local, NaiveDate};
use clap::{Parser, Subcommand, ValueEnum};
use climakg::competency::{run_suite, CqParams, FixtureScan};
use climakg::config::SyncConfig;
use climakg::sync::{collect, run_sync};
use climakg::{enrich, fixture, snapshot};
use climakg_core::{serialize_ntriples, Dataset, Ontology};
use climakg_ingest::{import_wikidata_snapshot, FixtureTransport, Geocoder, LiveTransport, Transport};
use climakg_server::{AppState, ServerConfig};

#[derive(Parser)]
#[command(name = "climakg", version, about = "Climate knowledge graph: NOAA sync, enrichment, SPARQL service")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Serve all NOAA and geocoder traffic from this directory.
    #[arg(long, global = true)]
    fixture_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    window_days: Option<u32>,
    /// Snapshot file read and written by the command.
    #[arg(long, global = true)]
    snapshot: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synchronise the sliding window, then repeat on the schedule.
    Ingest {
        /// Run a single window and exit.
        #[arg(long)]
        once: bool,
        /// Window end date (YYYY-MM-DD) of the first run; defaults to today.
        #[arg(long)]
        now: Option<NaiveDate>,
    },
    /// Reverse-geocode stations and link them to administrative areas.
    Enrich {
        /// Geocode stations that are already linked as well.
        #[arg(long)]
        force: bool,
    },
    /// Load an N-Triples Wikidata extract into the Wikidata graph.
    WikidataImport { file: PathBuf },
    /// Run the HTTP service over the snapshot.
    Serve {
        #[arg(long)]
        listen: Option<SocketAddr>,
        /// Keep syncing in the background on the configured schedule.
        #[arg(long)]
        sync: bool,
        /// Static files served under /console.
        #[arg(long)]
        console_dir: Option<PathBuf>,
    },
    /// Evaluate a query file (or `-` for stdin) against the snapshot.
    Query {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write the snapshot in canonical form to another path.
    Export { path: PathBuf },
    /// Run the competency questions.
    Competency {
        /// Build the store from the fixture directory instead of loading the
        /// snapshot.
        #[arg(long)]
        fresh: bool,
        /// N-Triples document integrated by question 11.
        #[arg(long)]
        supplementary: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Print the ontology as N-Triples.
    Ontology,
    /// Generate the offline fixture corpus.
    Fixture { dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn config(cli: &Cli) -> Result<SyncConfig> {
    let mut cfg = match &cli.config {
        Some(p) => SyncConfig::load(p)?,
        None => SyncConfig::default(),
    }
    .with_env_token();
    if let Some(d) = &cli.fixture_dir {
        cfg.fixture_dir = Some(d.clone());
    }
    if let Some(w) = cli.window_days {
        cfg.window_days = w;
    }
    if let Some(s) = &cli.snapshot {
        cfg.snapshot_path = s.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cdo_transport(cfg: &SyncConfig) -> Result<Box<dyn Transport>> {
    if let Some(dir) = &cfg.fixture_dir {
        return Ok(Box::new(FixtureTransport::new(dir)));
    }
    let Some(token) = &cfg.token else {
        bail!("{} is not set; CDO requests need a token", climakg::TOKEN_ENV);
    };
    Ok(Box::new(LiveTransport::new(&cfg.noaa_base, Duration::from_secs(60)).with_token(token)))
}

fn geocoder_transport(cfg: &SyncConfig) -> Box<dyn Transport> {
    match &cfg.fixture_dir {
        Some(dir) => Box::new(FixtureTransport::new(dir)),
        None => Box::new(LiveTransport::new(&cfg.geocoder_base, Duration::from_secs(30))),
    }
}

fn geocoder<'t>(cfg: &SyncConfig, t: &'t dyn Transport) -> Geocoder<'t> {
    let mut g = if cfg.fixture_mode() { Geocoder::fixture(t) } else { Geocoder::live(t) };
    g.levels = climakg_ingest::geo::LEVELS.iter().copied().filter(|l| cfg.geocode_levels.iter().any(|c| c == l)).collect();
    g
}

/// Writes to stdout; a closed pipe (`climakg ... | head`) ends the process
/// quietly instead of panicking.
fn emit(text: &str) {
    use std::io::Write as _;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        eprintln!("error: writing output: {e}");
        std::process::exit(1);
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    emit(&format!("{}\n", serde_json::to_string_pretty(v).expect("reports serialise")));
}

fn today() -> NaiveDate {
    Local::now().date_naive()
}

fn ingest(cfg: &SyncConfig, once: bool, now: Option<NaiveDate>) -> Result<()> {
    let o = Ontology::default();
    let transport = cdo_transport(cfg)?;
    let mut now = now.unwrap_or_else(today);
    loop {
        let mut store = snapshot::load_or_empty(&cfg.snapshot_path)?;
        let report = run_sync(&mut store, cfg, transport.as_ref(), &o, now)?;
        snapshot::save(&store, &cfg.snapshot_path)?;
        print_json(&report);
        if once {
            return Ok(());
        }
        std::thread::sleep(Duration::from_secs(86_400 * u64::from(cfg.schedule_interval_days)));
        now = today();
    }
}

fn serve(cfg: &SyncConfig, listen: Option<SocketAddr>, background_sync: bool, console_dir: Option<PathBuf>) -> Result<()> {
    let o = Ontology::default();
    let store = snapshot::load_or_empty(&cfg.snapshot_path)?;
    let addr: SocketAddr = match listen {
        Some(a) => a,
        None => cfg.listen.parse().with_context(|| format!("invalid listen address {}", cfg.listen))?,
    };
    let state = AppState::new(store, o.clone(), ServerConfig { incoming_cap: cfg.incoming_cap, console_dir });
    if background_sync {
        let (state, cfg, transport) = (state.clone(), cfg.clone(), cdo_transport(cfg)?);
        std::thread::spawn(move || loop {
            // Fetch without the lock; readers only wait for the insert.
            match collect(&cfg, transport.as_ref(), &o, today()) {
                Ok((triples, mut report)) => {
                    let mut store = state.write();
                    report.triples_new = store.extend(None, &triples);
                    if let Err(e) = snapshot::save(&store, &cfg.snapshot_path) {
                        log::error!("{e}");
                    }
                    drop(store);
                    log::info!("background sync: {} new triples", report.triples_new);
                }
                Err(e) => log::error!("background sync: {e}"),
            }
            std::thread::sleep(Duration::from_secs(86_400 * u64::from(cfg.schedule_interval_days)));
        });
    }
    log::info!("listening on http://{addr}");
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(climakg_server::serve(addr, state))?;
    Ok(())
}

fn competency(cfg: &SyncConfig, fresh: bool, supplementary: Option<&Path>, json: bool) -> Result<bool> {
    let o = Ontology::default();
    let mut store = if fresh {
        let Some(dir) = &cfg.fixture_dir else { bail!("--fresh needs --fixture-dir") };
        fixture::deploy(dir, &o)?.store
    } else {
        snapshot::load(&cfg.snapshot_path)?
    };
    let scan = match &cfg.fixture_dir {
        Some(dir) => Some(FixtureScan::load(dir, fixture::horizon())?),
        None => None,
    };
    let supp = match supplementary {
        Some(p) => Some(std::fs::read_to_string(p)?),
        None => scan.as_ref().map(|s| s.supplementary().to_owned()),
    };
    let report = run_suite(&mut store, &o, &CqParams::fixture(), scan.as_ref(), supp.as_deref());
    if json {
        print_json(&report);
    } else {
        emit(&report.render());
    }
    Ok(report.all_passed())
}

fn run(cli: Cli) -> Result<bool> {
    if let Command::Fixture { dir } = &cli.command {
        let summary = fixture::generate(dir)?;
        emit(&format!("{} stations, {} observations, {} geocoder records in {}\n", summary.stations, summary.observations, summary.geocoded, dir.display()));
        return Ok(true);
    }
    if let Command::Ontology = &cli.command {
        emit(&serialize_ntriples(&Ontology::default().ontology_triples()));
        return Ok(true);
    }
    let cfg = config(&cli)?;
    match cli.command {
        Command::Ingest { once, now } => ingest(&cfg, once, now)?,
        Command::Enrich { force } => {
            let o = Ontology::default();
            let mut store = snapshot::load_or_empty(&cfg.snapshot_path)?;
            let t = geocoder_transport(&cfg);
            let report = enrich::enrich_all(&mut store, &o, &geocoder(&cfg, t.as_ref()), !force);
            snapshot::save(&store, &cfg.snapshot_path)?;
            print_json(&report);
        }
        Command::WikidataImport { file } => {
            let o = Ontology::default();
            let mut store = snapshot::load_or_empty(&cfg.snapshot_path)?;
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let n = import_wikidata_snapshot(&mut store, &o, &text)?;
            snapshot::save(&store, &cfg.snapshot_path)?;
            emit(&format!("{n} new triples in {}\n", o.wikidata_graph()));
        }
        Command::Serve { listen, sync, console_dir } => serve(&cfg, listen, sync, console_dir)?,
        Command::Query { file, format } => {
            let text = if file.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?
            };
            let store: Dataset = snapshot::load(&cfg.snapshot_path)?;
            let results = climakg_sparql::execute(&store, &text)?;
            match format {
                Format::Json => emit(&format!("{}\n", results.to_json_string())),
                Format::Csv => emit(&results.to_csv()),
            }
        }
        Command::Export { path } => {
            let store = snapshot::load(&cfg.snapshot_path)?;
            snapshot::save(&store, &path)?;
            emit(&format!("{} triples written to {}\n", store.len(), path.display()));
        }
        Command::Competency { fresh, supplementary, json } => return competency(&cfg, fresh, supplementary.as_deref(), json),
        Command::Ontology | Command::Fixture { .. } => unreachable!("handled above"),
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
