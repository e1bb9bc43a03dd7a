//! Dataset files: tab-separated edge list, feature CSV, `node_id,label` CSV
//! and a JSON train/test split.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use spac::graph::{Graph, Labels, Split};
use spac::SpacError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("inconsistent dimensions: {0}")]
    InconsistentDims(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] SpacError),
}

/// Locations of the dataset files; only the edge list is mandatory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DatasetPaths {
    pub edges: PathBuf,
    pub features: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub split: Option<PathBuf>,
}

impl DatasetPaths {
    /// `edges.tsv`, `features.csv`, `labels.csv` and `split.json` inside
    /// `dir`; the optional files are used when present.
    pub fn in_dir(dir: &Path) -> Self {
        let optional = |name: &str| Some(dir.join(name)).filter(|p| p.exists());
        Self {
            edges: dir.join("edges.tsv"),
            features: optional("features.csv"),
            labels: optional("labels.csv"),
            split: optional("split.json"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub graph: Graph<f64>,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> Result<String, LoadError> {
    fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.to_owned(), source })
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> LoadError {
    LoadError::Parse { path: path.to_owned(), line, message: message.into() }
}

/// Parses an edge list; returns deduplicated pairs `(min, max)` in file order
/// plus warnings for repeated pairs.
pub fn parse_edges(path: &Path, text: &str) -> Result<(Vec<(usize, usize)>, Vec<String>), LoadError> {
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(path, line, format!("expected `u<TAB>v`, found {trimmed:?}")));
        }
        let id = |s: &str| s.parse::<usize>().map_err(|_| parse_err(path, line, format!("invalid node id {s:?}")));
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        if u == v {
            return Err(parse_err(path, line, format!("self-loop on node {u}")));
        }
        let pair = (u.min(v), u.max(v));
        if !seen.insert(pair) {
            warnings.push(format!("{}:{line}: duplicate edge ({u}, {v}) ignored", path.display()));
            continue;
        }
        edges.push(pair);
    }
    Ok((edges, warnings))
}

pub fn parse_features(path: &Path, text: &str) -> Result<Array2<f64>, LoadError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_err(path, line, format!("expected {w} features, found {}", record.len())));
            }
            _ => {}
        }
        for field in record.iter() {
            values.push(field.parse::<f64>().map_err(|_| parse_err(path, line, format!("invalid number {field:?}")))?);
        }
        rows += 1;
    }
    Array2::from_shape_vec((rows, width.unwrap_or(0)), values).map_err(|e| LoadError::InconsistentDims(e.to_string()))
}

/// Parses `node_id,label` rows (an optional non-numeric header is skipped).
pub fn parse_labels(path: &Path, text: &str) -> Result<Vec<(usize, usize)>, LoadError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(parse_err(path, line, format!("expected `node_id,label`, found {trimmed:?}")));
        }
        match (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
            (Ok(v), Ok(y)) => out.push((v, y)),
            _ if line == 1 && fields[0].parse::<f64>().is_err() => continue,
            _ => return Err(parse_err(path, line, format!("invalid label row {trimmed:?}"))),
        }
    }
    Ok(out)
}

pub fn parse_split(path: &Path, text: &str) -> Result<Split, LoadError> {
    serde_json::from_str(text).map_err(|e| parse_err(path, e.line(), e.to_string()))
}

/// Loads and validates a dataset. The node count is the feature row count
/// when features are given, otherwise one past the largest id seen.
pub fn load_dataset(paths: &DatasetPaths) -> Result<LoadedDataset, LoadError> {
    let (edges, mut warnings) = parse_edges(&paths.edges, &read(&paths.edges)?)?;
    let features = paths.features.as_deref().map(|p| read(p).and_then(|t| parse_features(p, &t))).transpose()?;
    let labels = paths.labels.as_deref().map(|p| read(p).and_then(|t| parse_labels(p, &t))).transpose()?;
    let split = paths.split.as_deref().map(|p| read(p).and_then(|t| parse_split(p, &t))).transpose()?;

    let max_edge = edges.iter().map(|&(_, v)| v + 1).max().unwrap_or(0);
    let max_label = labels.iter().flatten().map(|&(v, _)| v + 1).max().unwrap_or(0);
    let n = match &features {
        Some(x) => {
            if max_edge > x.nrows() || max_label > x.nrows() {
                return Err(LoadError::InconsistentDims(format!(
                    "{} feature rows but node ids reach {}",
                    x.nrows(),
                    max_edge.max(max_label) - 1
                )));
            }
            x.nrows()
        }
        None => max_edge.max(max_label),
    };

    let mut graph = Graph::from_edges(n, &edges)?;
    if let Some(x) = features {
        graph = graph.with_features(x)?;
    }
    if let Some(rows) = labels {
        let mut ids = vec![None; n];
        for (v, y) in rows {
            if ids[v].replace(y).is_some_and(|old| old != y) {
                return Err(LoadError::InconsistentDims(format!("node {v} has conflicting labels")));
            }
        }
        let classes = ids.iter().flatten().max().map_or(0, |m| m + 1);
        graph = graph.with_labels(Labels::new(ids, classes)?)?;
    }
    if let Some(s) = split {
        graph = graph.with_split(s)?;
    }
    let isolated = graph.isolated_nodes();
    if !isolated.is_empty() {
        warnings.push(format!("{} isolated node(s), first {}", isolated.len(), isolated[0]));
    }
    for w in &warnings {
        tracing::warn!("{w}");
    }
    Ok(LoadedDataset { graph, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edges_dedupe_with_warning() {
        let (edges, warnings) = parse_edges(Path::new("e.tsv"), "0\t1\n1\t0\n# note\n\n1\t2\n").unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 2)]);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("e.tsv:2"));
    }

    #[test]
    fn edge_errors_carry_line_numbers() {
        let err = parse_edges(Path::new("e.tsv"), "0\t1\n2 x\n").unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 2, .. }), "{err}");
        let err = parse_edges(Path::new("e.tsv"), "0\t1\n1\t1\n").unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 2, .. }));
    }

    #[test]
    fn ragged_features_rejected() {
        let err = parse_features(Path::new("f.csv"), "1,2\n3,4\n5\n").unwrap_err();
        assert!(matches!(err, LoadError::Parse { line: 3, .. }), "{err}");
        let x = parse_features(Path::new("f.csv"), "1, 2\n3,4.5\n").unwrap();
        assert_eq!(x, ndarray::array![[1.0, 2.0], [3.0, 4.5]]);
    }

    #[test]
    fn labels_allow_header() {
        assert_eq!(parse_labels(Path::new("l.csv"), "node_id,label\n0,1\n2,0\n").unwrap(), vec![(0, 1), (2, 0)]);
        assert!(matches!(parse_labels(Path::new("l.csv"), "0,1\nx,0\n"), Err(LoadError::Parse { line: 2, .. })));
    }
}
