//! Snapshot files: canonical N-Quads with one `# graph` section per graph.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use climakg_core::{parse_nquads, serialize_ntriples, Dataset, Iri, Quad};

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error("snapshot I/O on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("snapshot {path} is malformed: {source}")]
    Parse { path: String, source: climakg_core::SyntaxError },
}

const HEADER: &str = "# graph ";

/// Canonical text of `ds`: the default graph first, named graphs in IRI
/// order, statements sorted within each section.
pub fn render(ds: &Dataset) -> String {
    let mut out = String::new();
    out.push_str("# graph default\n");
    out.push_str(&serialize_ntriples(&ds.triples(None)));
    let mut names: Vec<&Iri> = ds.graph_names().collect();
    names.sort();
    for g in names {
        let _ = writeln!(out, "{HEADER}<{}>", g.as_str());
        for line in serialize_ntriples(&ds.triples(Some(g))).lines() {
            let stmt = line.strip_suffix(" .").unwrap_or(line);
            let _ = writeln!(out, "{stmt} <{}> .", g.as_str());
        }
    }
    out
}

/// Inverse of [`render`]; empty named graphs survive through their headers.
pub fn parse(text: &str) -> Result<Dataset, climakg_core::SyntaxError> {
    let quads: Vec<Quad> = parse_nquads(text)?;
    let mut ds = Dataset::from_quads(quads);
    for (idx, line) in text.lines().enumerate() {
        if let Some(name) = line.strip_prefix(HEADER).and_then(|r| r.strip_prefix('<')).and_then(|r| r.strip_suffix('>')) {
            let iri = Iri::new(name).map_err(|e| climakg_core::SyntaxError::new(idx + 1, 1, e.to_string()))?;
            if !ds.has_graph(Some(&iri)) {
                ds.replace_graph(Some(&iri), Vec::new());
            }
        }
    }
    Ok(ds)
}

/// Writes atomically: a temporary file in the target directory is synced
/// and renamed over `path`.
pub fn save(ds: &Dataset, path: &Path) -> Result<(), SnapshotError> {
    let io = |source| SnapshotError::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(render(ds).as_bytes()).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Loads a snapshot; a parse error yields no store at all.
pub fn load(path: &Path) -> Result<Dataset, SnapshotError> {
    let text = fs::read(path).map_err(|source| SnapshotError::Io { path: path.display().to_string(), source })?;
    parse(&String::from_utf8_lossy(&text)).map_err(|source| SnapshotError::Parse { path: path.display().to_string(), source })
}

/// Loads `path` if it exists, otherwise starts empty.
pub fn load_or_empty(path: &Path) -> Result<Dataset, SnapshotError> {
    if path.exists() {
        load(path)
    } else {
        Ok(Dataset::new())
    }
}
