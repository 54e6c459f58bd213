//! Text and JSON encodings of hypernetworks.
//!
//! Hyperedge-list: one hyperedge per line, whitespace-separated node tokens.
//! Tokens become dense ids in order of first appearance. Blank lines and
//! lines starting with `#` are skipped. Repeated tokens on one line collapse.
//!
//! Structured: a JSON object `{"num_nodes", "hyperedges", "node_labels"}`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypernetwork;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    HyperedgeList,
    Structured,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hyperedge-list" => Ok(Self::HyperedgeList),
            "structured" => Ok(Self::Structured),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

/// Parses the hyperedge-list format. Every hyperedge keeps its line order.
pub fn parse_hyperedge_list(bytes: &[u8]) -> Result<Hypernetwork> {
    let mut ids: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut hyperedges = Vec::new();
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw).map_err(|_| Error::Format {
            line: idx + 1,
            msg: "line is not valid UTF-8".into(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut members = Vec::new();
        for token in line.split_whitespace() {
            if token.chars().any(char::is_control) {
                return Err(Error::Format {
                    line: idx + 1,
                    msg: format!("control character in token {token:?}"),
                });
            }
            let id = *ids.entry(token.to_string()).or_insert_with(|| {
                labels.push(token.to_string());
                labels.len() - 1
            });
            if !members.contains(&id) {
                members.push(id);
            }
        }
        hyperedges.push(members);
    }
    Hypernetwork::new(labels.len(), hyperedges)?.with_labels(labels)
}

/// Writes one line per hyperedge using node labels when present.
pub fn to_hyperedge_list(g: &Hypernetwork) -> String {
    let mut out = String::new();
    for members in g.hyperedges() {
        let tokens: Vec<String> = members.iter().map(|&v| g.label(v)).collect();
        out.push_str(&tokens.join(" "));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Structured {
    num_nodes: usize,
    hyperedges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node_labels: Option<Vec<String>>,
}

pub fn parse_structured(bytes: &[u8]) -> Result<Hypernetwork> {
    let doc: Structured = serde_json::from_slice(bytes).map_err(|e| Error::Format {
        line: e.line(),
        msg: e.to_string(),
    })?;
    let g = Hypernetwork::new(doc.num_nodes, doc.hyperedges).map_err(|e| Error::Format {
        line: 0,
        msg: e.to_string(),
    })?;
    match doc.node_labels {
        Some(labels) => g.with_labels(labels).map_err(|e| Error::Format {
            line: 0,
            msg: e.to_string(),
        }),
        None => Ok(g),
    }
}

pub fn to_structured(g: &Hypernetwork) -> String {
    let doc = Structured {
        num_nodes: g.num_nodes(),
        hyperedges: g.hyperedges().to_vec(),
        node_labels: g.node_labels().map(<[String]>::to_vec),
    };
    serde_json::to_string_pretty(&doc).expect("plain data serializes")
}

pub fn parse(bytes: &[u8], format: Format) -> Result<Hypernetwork> {
    match format {
        Format::HyperedgeList => parse_hyperedge_list(bytes),
        Format::Structured => parse_structured(bytes),
    }
}

pub fn export(g: &Hypernetwork, format: Format) -> String {
    match format {
        Format::HyperedgeList => to_hyperedge_list(g),
        Format::Structured => to_structured(g),
    }
}
