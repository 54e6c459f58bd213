//! Binary checkpoint container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        8 bytes  "HNDCKPT\0"
//! version      u32      currently 1
//! meta_len     u32      length of the JSON metadata block
//! meta         meta_len bytes of UTF-8 JSON (CheckpointMeta)
//! tensors      u32      number of tensors T
//! shape table  T x (rows u32, cols u32)
//! data         row-major f64 values of every tensor, in table order
//! ```
//!
//! Tensor order is that of [`ModelParams::tensors`]; the bias is the last
//! `1 x 1` entry. The file must end exactly after the data.

use serde::{Deserialize, Serialize};

use super::{ModelParams, Readout, Scaling};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"HNDCKPT\0";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointMeta {
    pub layers: usize,
    pub widths: Vec<usize>,
    pub activation: Readout,
    #[serde(default)]
    pub scaling: Scaling,
    /// Hex digest of the serialized training configuration.
    pub config_hash: String,
    pub seed: u64,
}

impl CheckpointMeta {
    pub fn for_params(params: &ModelParams, config_hash: impl Into<String>, seed: u64) -> Self {
        Self {
            layers: params.num_layers(),
            widths: params.widths.clone(),
            activation: params.activation,
            scaling: params.scaling,
            config_hash: config_hash.into(),
            seed,
        }
    }
}

pub fn save_checkpoint(params: &ModelParams, meta: &CheckpointMeta) -> Vec<u8> {
    let meta_json = serde_json::to_vec(meta).expect("metadata serializes");
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(meta_json.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta_json);
    let shapes = params.shapes();
    out.extend_from_slice(&(shapes.len() as u32).to_le_bytes());
    for (rows, cols) in shapes {
        out.extend_from_slice(&(rows as u32).to_le_bytes());
        out.extend_from_slice(&(cols as u32).to_le_bytes());
    }
    for tensor in params.tensors() {
        for x in tensor {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(corrupt(format!("truncated while reading {what} at byte {}", self.pos))),
        }
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        let b = self.take(8, "tensor data")?;
        Ok(f64::from_le_bytes(b.try_into().expect("8 bytes")))
    }
}

fn corrupt(msg: String) -> Error {
    Error::Checkpoint(msg)
}

pub fn load_checkpoint(bytes: &[u8]) -> Result<(ModelParams, CheckpointMeta)> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8, "magic")? != MAGIC {
        return Err(corrupt("not a checkpoint (bad magic)".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(corrupt(format!("unsupported checkpoint version {version}")));
    }
    let meta_len = r.u32("metadata length")? as usize;
    let meta: CheckpointMeta = serde_json::from_slice(r.take(meta_len, "metadata")?)
        .map_err(|e| corrupt(format!("bad metadata: {e}")))?;
    if meta.widths.len() != meta.layers + 1 || meta.widths.first() != Some(&1) {
        return Err(corrupt("metadata widths disagree with the layer count".into()));
    }
    if meta.widths.contains(&0) {
        return Err(corrupt("zero-width layer in metadata".into()));
    }

    let mut params = ModelParams::zeros_with_widths(meta.widths.clone(), meta.activation)
        .with_scaling(meta.scaling);
    let expected = params.shapes();
    let count = r.u32("tensor count")? as usize;
    if count != expected.len() {
        return Err(corrupt(format!(
            "{count} tensors stored, {} expected",
            expected.len()
        )));
    }
    for (t, &(rows, cols)) in expected.iter().enumerate() {
        let stored = (r.u32("shape table")? as usize, r.u32("shape table")? as usize);
        if stored != (rows, cols) {
            return Err(corrupt(format!("tensor {t} has shape {stored:?}, expected ({rows}, {cols})")));
        }
    }
    for tensor in params.tensors_mut() {
        for x in tensor.iter_mut() {
            *x = r.f64()?;
        }
    }
    if r.pos != bytes.len() {
        return Err(corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok((params, meta))
}
