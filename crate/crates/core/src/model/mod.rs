//! Hypergraph attention network that scores nodes by approximate betweenness.
//!
//! Every layer pools node embeddings into hyperedges through a masked
//! attention, mixes each hyperedge with its overlap neighbourhood, and sends
//! the result back to member nodes. Node and hyperedge embeddings are
//! rescaled to unit root mean square after each layer, and a linear readout
//! turns final node embeddings into scores. All arithmetic is `f64`.

mod adam;
mod backward;
mod checkpoint;
mod forward;
mod gradcheck;
mod loss;

pub use adam::{adam_step, AdamConfig, OptimizerState};
pub use backward::{backward, backward_from_scores};
pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointMeta};
pub use forward::{forward, predict, ForwardTrace, LayerTrace, SCALE_EPSILON};
pub use gradcheck::{
    check_against, grad_check, move_off_kinks, GradCheckReport, TensorCheck, DEFAULT_TOLERANCE,
};
pub use loss::{batch_loss, bpr_instance_loss, network_loss, InstanceLoss};

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Output nonlinearity applied to the readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Readout {
    Rectifier,
    #[default]
    Identity,
}

/// Rescaling applied to node and hyperedge embeddings after every layer.
///
/// Sum aggregation multiplies magnitudes by roughly the overlap degree at
/// each layer; `Rms` divides each embedding matrix by its root mean square so
/// that depth and network size do not saturate the ranking loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    #[default]
    Rms,
    None,
}

/// Weights of one aggregation layer mapping width `d_in` to `d_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    /// `d_in x 1`: attention logits of member nodes.
    pub attention: Array2<f64>,
    /// `d_in x d_out`: pooled hyperedge features.
    pub edge_self: Array2<f64>,
    /// `d_in x d_out`: overlap-weighted neighbouring hyperedges.
    pub edge_overlap: Array2<f64>,
    /// `2 d_out x d_out`: mixes the two hyperedge branches.
    pub edge_mix: Array2<f64>,
    /// `d_in x d_out`: node self features.
    pub node_self: Array2<f64>,
    /// `d_out x d_out`: sum of incident hyperedge features.
    pub node_edges: Array2<f64>,
    /// `2 d_out x d_out`: mixes the two node branches.
    pub node_mix: Array2<f64>,
}

impl LayerParams {
    fn zeros(d_in: usize, d_out: usize) -> Self {
        Self {
            attention: Array2::zeros((d_in, 1)),
            edge_self: Array2::zeros((d_in, d_out)),
            edge_overlap: Array2::zeros((d_in, d_out)),
            edge_mix: Array2::zeros((2 * d_out, d_out)),
            node_self: Array2::zeros((d_in, d_out)),
            node_edges: Array2::zeros((d_out, d_out)),
            node_mix: Array2::zeros((2 * d_out, d_out)),
        }
    }

    fn tensors(&self) -> [&Array2<f64>; 7] {
        [
            &self.attention,
            &self.edge_self,
            &self.edge_overlap,
            &self.edge_mix,
            &self.node_self,
            &self.node_edges,
            &self.node_mix,
        ]
    }

    fn tensors_mut(&mut self) -> [&mut Array2<f64>; 7] {
        [
            &mut self.attention,
            &mut self.edge_self,
            &mut self.edge_overlap,
            &mut self.edge_mix,
            &mut self.node_self,
            &mut self.node_edges,
            &mut self.node_mix,
        ]
    }
}

const LAYER_TENSOR_NAMES: [&str; 7] = [
    "attention",
    "edge_self",
    "edge_overlap",
    "edge_mix",
    "node_self",
    "node_edges",
    "node_mix",
];

/// All trainable tensors plus the architecture they describe.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Embedding widths `D_0 = 1, D_1, ..., D_L`.
    pub widths: Vec<usize>,
    pub layers: Vec<LayerParams>,
    /// `D_L x 1` readout weights.
    pub readout: Array2<f64>,
    pub bias: f64,
    pub activation: Readout,
    pub scaling: Scaling,
}

impl ModelParams {
    /// All-zero parameters for `layers` layers of constant width `dim`.
    pub fn zeros(layers: usize, dim: usize, activation: Readout) -> Self {
        let mut widths = vec![1];
        widths.extend(std::iter::repeat_n(dim, layers));
        Self::zeros_with_widths(widths, activation)
    }

    pub fn zeros_with_widths(widths: Vec<usize>, activation: Readout) -> Self {
        let layers = widths
            .windows(2)
            .map(|w| LayerParams::zeros(w[0], w[1]))
            .collect();
        let last = *widths.last().expect("widths start with D_0");
        Self {
            widths,
            layers,
            readout: Array2::zeros((last, 1)),
            bias: 0.0,
            activation,
            scaling: Scaling::default(),
        }
    }

    /// Glorot-uniform weights drawn from ChaCha8 seeded by `seed`; zero bias.
    pub fn init(layers: usize, dim: usize, activation: Readout, seed: u64) -> Self {
        let mut params = Self::zeros(layers, dim, activation);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t in params.weight_arrays_mut() {
            let (fan_in, fan_out) = t.dim();
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            t.mapv_inplace(|_| rng.random_range(-limit..limit));
        }
        params
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Same architecture, every entry zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            scaling: self.scaling,
            ..Self::zeros_with_widths(self.widths.clone(), self.activation)
        }
    }

    pub fn with_scaling(mut self, scaling: Scaling) -> Self {
        self.scaling = scaling;
        self
    }

    fn weight_arrays(&self) -> Vec<&Array2<f64>> {
        let mut out: Vec<&Array2<f64>> = self.layers.iter().flat_map(|l| l.tensors()).collect();
        out.push(&self.readout);
        out
    }

    /// Rewrites any transposed-layout tensor into row-major order.
    pub(crate) fn standardize(&mut self) {
        for t in self.weight_arrays_mut() {
            if !t.is_standard_layout() {
                *t = t.as_standard_layout().into_owned();
            }
        }
    }

    fn weight_arrays_mut(&mut self) -> Vec<&mut Array2<f64>> {
        let mut out: Vec<&mut Array2<f64>> = self
            .layers
            .iter_mut()
            .flat_map(|l| l.tensors_mut())
            .collect();
        out.push(&mut self.readout);
        out
    }

    /// Every tensor as a row-major slice, bias last (as a 1-element slice).
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = self
            .weight_arrays()
            .into_iter()
            .map(|t| t.as_slice().expect("standard layout"))
            .collect();
        out.push(std::slice::from_ref(&self.bias));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let Self {
            layers,
            readout,
            bias,
            ..
        } = self;
        let mut out: Vec<&mut [f64]> = layers
            .iter_mut()
            .flat_map(|l| l.tensors_mut())
            .map(|t| t.as_slice_mut().expect("standard layout"))
            .collect();
        out.push(readout.as_slice_mut().expect("standard layout"));
        out.push(std::slice::from_mut(bias));
        out
    }

    /// `(rows, cols)` of each entry of [`Self::tensors`].
    pub fn shapes(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.weight_arrays().iter().map(|t| t.dim()).collect();
        out.push((1, 1));
        out
    }

    /// Human-readable names aligned with [`Self::tensors`].
    pub fn tensor_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for l in 0..self.layers.len() {
            for name in LAYER_TENSOR_NAMES {
                out.push(format!("layers[{l}].{name}"));
            }
        }
        out.push("readout".into());
        out.push("bias".into());
        out
    }

    /// Layer index of tensor `t`; readout tensors report `L`.
    pub(crate) fn tensor_layer(&self, t: usize) -> usize {
        (t / LAYER_TENSOR_NAMES.len()).min(self.layers.len())
    }

    pub fn num_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    /// Checks shapes against `widths` and that every entry is finite.
    pub fn validate(&self) -> Result<()> {
        if self.widths.first() != Some(&1) {
            return invalid("the input width must be 1");
        }
        if self.widths.contains(&0) {
            return invalid("zero-width layer");
        }
        if self.layers.len() + 1 != self.widths.len() {
            return invalid(format!(
                "{} layers but {} widths",
                self.layers.len(),
                self.widths.len()
            ));
        }
        let expected = Self::zeros_with_widths(self.widths.clone(), self.activation).shapes();
        if expected != self.shapes() {
            return invalid("tensor shapes do not match the layer widths");
        }
        if self.tensors().iter().any(|t| t.iter().any(|x| !x.is_finite())) {
            return invalid("non-finite parameter");
        }
        Ok(())
    }

    pub(crate) fn same_shape(&self, other: &Self) -> bool {
        self.widths == other.widths && self.shapes() == other.shapes()
    }
}
