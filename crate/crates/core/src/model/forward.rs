use ndarray::{concatenate, Array2, ArrayView2, Axis};

use super::{ModelParams, Readout, Scaling};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::Hypernetwork;

/// Intermediate values of one layer, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct LayerTrace {
    /// Node embeddings entering the layer (`N x d_in`).
    pub input: Array2<f64>,
    /// Attention weights per hyperedge, aligned with its sorted member list.
    pub attention: Vec<Vec<f64>>,
    /// Attention-pooled hyperedge embeddings (`M x d_in`).
    pub pooled: Array2<f64>,
    /// Pooled embeddings propagated through `H^T H` (`M x d_in`).
    pub overlap: Array2<f64>,
    /// `[pooled W_self || overlap W_overlap]` (`M x 2 d_out`).
    pub edge_concat: Array2<f64>,
    pub edge_pre: Array2<f64>,
    /// Divisor applied to the rectified hyperedge embeddings.
    pub edge_scale: f64,
    /// Hyperedge embeddings after aggregation and rescaling (`M x d_out`).
    pub edges: Array2<f64>,
    /// `[input W_self || H edges W_edges]` (`N x 2 d_out`).
    pub node_concat: Array2<f64>,
    pub node_pre: Array2<f64>,
    /// Divisor applied to the rectified node embeddings.
    pub node_scale: f64,
    /// Node embeddings leaving the layer (`N x d_out`).
    pub output: Array2<f64>,
}

/// Full record of a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub num_nodes: usize,
    pub num_hyperedges: usize,
    pub layers: Vec<LayerTrace>,
    /// Readout before the output nonlinearity.
    pub readout_pre: Vec<f64>,
    /// Predicted scores, one per node.
    pub scores: Vec<f64>,
}

impl ForwardTrace {
    /// Final node embeddings `X^L`.
    pub fn embeddings(&self) -> &Array2<f64> {
        &self.layers.last().expect("at least one layer").output
    }

    /// Dense `M x N` attention matrix of layer `l`.
    pub fn attention_matrix(&self, g: &Hypernetwork, l: usize) -> Array2<f64> {
        let mut a = Array2::zeros((self.num_hyperedges, self.num_nodes));
        for (e, weights) in self.layers[l].attention.iter().enumerate() {
            for (&v, &w) in g.hyperedge(e).iter().zip(weights) {
                a[[e, v]] = w;
            }
        }
        a
    }
}

pub(crate) fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// `out[e] = sum of x[v] over members v of e` (the product `H^T x`).
pub(crate) fn gather_to_edges(g: &Hypernetwork, x: ArrayView2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((g.num_hyperedges(), x.ncols()));
    for (e, members) in g.hyperedges().iter().enumerate() {
        let mut row = out.row_mut(e);
        for &v in members {
            row += &x.row(v);
        }
    }
    out
}

/// `out[v] = sum of y[e] over hyperedges e containing v` (the product `H y`).
pub(crate) fn scatter_to_nodes(g: &Hypernetwork, y: ArrayView2<f64>) -> Array2<f64> {
    let mut out = Array2::zeros((g.num_nodes(), y.ncols()));
    for (e, members) in g.hyperedges().iter().enumerate() {
        let row = y.row(e);
        for &v in members {
            let mut target = out.row_mut(v);
            target += &row;
        }
    }
    out
}

/// Softmax of `logits` restricted to the members of each hyperedge.
pub(crate) fn masked_softmax(g: &Hypernetwork, logits: &[f64]) -> Vec<Vec<f64>> {
    g.hyperedges()
        .iter()
        .map(|members| {
            let max = members
                .iter()
                .map(|&v| logits[v])
                .fold(f64::NEG_INFINITY, f64::max);
            let mut weights: Vec<f64> = members.iter().map(|&v| (logits[v] - max).exp()).collect();
            let total: f64 = weights.iter().sum();
            for w in &mut weights {
                *w /= total;
            }
            weights
        })
        .collect()
}

/// Added to the mean square before the square root so all-zero embeddings
/// stay finite.
pub const SCALE_EPSILON: f64 = 1e-12;

/// Rectifies `pre` and divides the result by its scale under `scaling`.
pub(crate) fn activate(pre: &Array2<f64>, scaling: Scaling) -> (Array2<f64>, f64) {
    let mut out = pre.mapv(relu);
    let scale = match scaling {
        Scaling::None => 1.0,
        Scaling::Rms => {
            // Factor out the largest entry so squaring cannot overflow.
            let top = out.iter().fold(0.0f64, |m, &x| m.max(x));
            if top == 0.0 {
                SCALE_EPSILON.sqrt()
            } else {
                let mean_square =
                    out.iter().map(|x| (x / top).powi(2)).sum::<f64>() / out.len() as f64;
                top * (mean_square + SCALE_EPSILON / (top * top)).sqrt()
            }
        }
    };
    if scale != 1.0 {
        out.mapv_inplace(|x| x / scale);
    }
    (out, scale)
}

fn check_finite(layer: usize, what: &str, values: &Array2<f64>) -> Result<()> {
    if values.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric {
            layer,
            msg: format!("non-finite {what}"),
        })
    }
}

/// Runs the network on `g`, starting from all-ones node features.
pub fn forward(g: &Hypernetwork, params: &ModelParams) -> Result<ForwardTrace> {
    if g.num_nodes() == 0 {
        return invalid("forward pass on an empty hypernetwork");
    }
    params.validate()?;
    let mut x = Array2::ones((g.num_nodes(), 1));
    let mut layers = Vec::with_capacity(params.num_layers());
    for (l, lp) in params.layers.iter().enumerate() {
        let d_out = lp.edge_self.ncols();

        let logits = x.dot(&lp.attention);
        let attention = masked_softmax(g, logits.as_slice().expect("column vector"));
        let mut pooled = Array2::zeros((g.num_hyperedges(), x.ncols()));
        for (e, weights) in attention.iter().enumerate() {
            let mut row = pooled.row_mut(e);
            for (&v, &w) in g.hyperedge(e).iter().zip(weights) {
                row.scaled_add(w, &x.row(v));
            }
        }
        let overlap = gather_to_edges(g, scatter_to_nodes(g, pooled.view()).view());

        let edge_concat = concatenate![
            Axis(1),
            pooled.dot(&lp.edge_self),
            overlap.dot(&lp.edge_overlap)
        ];
        let edge_pre = edge_concat.dot(&lp.edge_mix);
        let (edges, edge_scale) = activate(&edge_pre, params.scaling);
        check_finite(l, "hyperedge embedding", &edges)?;

        let node_concat = concatenate![
            Axis(1),
            x.dot(&lp.node_self),
            scatter_to_nodes(g, edges.view()).dot(&lp.node_edges)
        ];
        let node_pre = node_concat.dot(&lp.node_mix);
        let (output, node_scale) = activate(&node_pre, params.scaling);
        check_finite(l, "node embedding", &output)?;
        debug_assert_eq!(output.ncols(), d_out);

        layers.push(LayerTrace {
            input: std::mem::replace(&mut x, output.clone()),
            attention,
            pooled,
            overlap,
            edge_concat,
            edge_pre,
            edge_scale,
            edges,
            node_concat,
            node_pre,
            node_scale,
            output,
        });
    }

    let readout_pre: Vec<f64> = x
        .dot(&params.readout)
        .iter()
        .map(|o| o + params.bias)
        .collect();
    let scores: Vec<f64> = match params.activation {
        Readout::Rectifier => readout_pre.iter().map(|&o| relu(o)).collect(),
        Readout::Identity => readout_pre.clone(),
    };
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Numeric {
            layer: params.num_layers(),
            msg: "non-finite readout".into(),
        });
    }
    Ok(ForwardTrace {
        num_nodes: g.num_nodes(),
        num_hyperedges: g.num_hyperedges(),
        layers,
        readout_pre,
        scores,
    })
}

/// Scores only; same arithmetic as [`forward`].
pub fn predict(g: &Hypernetwork, params: &ModelParams) -> Result<Vec<f64>> {
    forward(g, params).map(|t| t.scores)
}
