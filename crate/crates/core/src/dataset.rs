//! Loading real hypernetworks: duplicate removal, giant-component
//! extraction, and summary statistics.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::Hypernetwork;
use crate::io::{parse, Format};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub path: String,
    pub raw_nodes: usize,
    pub raw_hyperedges: usize,
    pub nodes: usize,
    pub hyperedges: usize,
    pub avg_hyperdegree: f64,
    pub avg_hyperedge_size: f64,
}

/// Mean hyperdegree and mean hyperedge size of `g`.
pub fn statistics(g: &Hypernetwork) -> (f64, f64) {
    let incidences = g.num_incidences() as f64;
    let per_node = if g.num_nodes() == 0 { 0.0 } else { incidences / g.num_nodes() as f64 };
    let per_edge = if g.num_hyperedges() == 0 {
        0.0
    } else {
        incidences / g.num_hyperedges() as f64
    };
    (per_node, per_edge)
}

/// Drops repeated hyperedges, keeping the first occurrence.
pub fn dedup_hyperedges(g: &Hypernetwork) -> Hypernetwork {
    let mut seen = HashSet::new();
    let kept: Vec<Vec<usize>> = g
        .hyperedges()
        .iter()
        .filter(|e| seen.insert((*e).clone()))
        .cloned()
        .collect();
    let out = Hypernetwork::new(g.num_nodes(), kept).expect("subset of valid hyperedges");
    match g.node_labels() {
        Some(labels) => out.with_labels(labels.to_vec()).expect("same node count"),
        None => out,
    }
}

/// Parses `bytes`, removes duplicates, and keeps only the giant component.
pub fn ingest_bytes(
    bytes: &[u8],
    format: Format,
    name: &str,
    path: &str,
) -> Result<(Hypernetwork, DatasetManifest)> {
    let raw = parse(bytes, format)?;
    if raw.num_hyperedges() == 0 {
        return invalid(format!("dataset `{name}` has no hyperedges"));
    }
    let deduped = dedup_hyperedges(&raw);
    let gcc = deduped.giant_component().graph;
    let (avg_hyperdegree, avg_hyperedge_size) = statistics(&gcc);
    let manifest = DatasetManifest {
        name: name.to_string(),
        path: path.to_string(),
        raw_nodes: raw.num_nodes(),
        raw_hyperedges: raw.num_hyperedges(),
        nodes: gcc.num_nodes(),
        hyperedges: gcc.num_hyperedges(),
        avg_hyperdegree,
        avg_hyperedge_size,
    };
    Ok((gcc, manifest))
}

pub fn ingest(path: &Path, format: Format) -> Result<(Hypernetwork, DatasetManifest)> {
    let bytes = std::fs::read(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    ingest_bytes(&bytes, format, &name, &path.to_string_lossy())
}
