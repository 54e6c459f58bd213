use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Seed, configuration digest and tool version stamped into every output.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, config_hash: String) -> Self {
        Self {
            tool: "hnd",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            config_hash,
        }
    }

    /// Comment lines placed at the top of text outputs.
    pub fn header(&self) -> String {
        format!(
            "# {} {} {}\n# seed={} config={}\n",
            self.tool, self.version, self.command, self.seed, self.config_hash
        )
    }
}

pub struct OutputDir {
    root: PathBuf,
    pub provenance: Provenance,
}

impl OutputDir {
    pub fn create(root: &Path, provenance: Provenance) -> Result<Self> {
        fs::create_dir_all(root)
            .with_context(|| format!("creating output directory {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            provenance,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// CSV table: provenance comments, a header row, then `rows`.
    pub fn write_table(&self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let mut text = self.provenance.header();
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.write_bytes(name, text.as_bytes())
    }

    /// Two whitespace-separated numeric columns under a provenance header.
    pub fn write_trace(&self, name: &str, points: &[(f64, f64)]) -> Result<PathBuf> {
        let mut text = self.provenance.header();
        for (x, y) in points {
            writeln!(text, "{x} {y}").expect("writing to a string");
        }
        self.write_bytes(name, text.as_bytes())
    }

    /// `{"provenance": ..., "result": value}` as pretty JSON.
    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            provenance: &'a Provenance,
            result: &'a T,
        }
        let json = serde_json::to_vec_pretty(&Wrapped {
            provenance: &self.provenance,
            result: value,
        })?;
        self.write_bytes(name, &json)
    }
}

/// CSV field with quoting when needed.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-tripping decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}
