use ndarray::{s, Array2, Axis};

use super::forward::{gather_to_edges, scatter_to_nodes, ForwardTrace};
use super::loss::network_loss;
use super::{ModelParams, Readout, Scaling};
use crate::error::{invalid, Result};
use crate::hypergraph::Hypernetwork;
use crate::training::RankingSampleSet;

fn relu_mask(grad: &mut Array2<f64>, pre: &Array2<f64>) {
    grad.zip_mut_with(pre, |g, &p| {
        if p <= 0.0 {
            *g = 0.0;
        }
    });
}

/// Gradient through `activate`: `grad` is taken with respect to the rescaled
/// output `out`, which was divided by `scale`.
fn activate_backward(
    mut grad: Array2<f64>,
    out: &Array2<f64>,
    pre: &Array2<f64>,
    scale: f64,
    scaling: Scaling,
) -> Array2<f64> {
    if scaling == Scaling::Rms {
        let n = out.len() as f64;
        let projection: f64 = grad.iter().zip(out.iter()).map(|(g, y)| g * y).sum::<f64>() / n;
        grad.zip_mut_with(out, |g, &y| *g = (*g - y * projection) / scale);
    }
    relu_mask(&mut grad, pre);
    grad
}

fn check_trace(g: &Hypernetwork, params: &ModelParams, trace: &ForwardTrace) -> Result<()> {
    if trace.num_nodes != g.num_nodes() || trace.num_hyperedges != g.num_hyperedges() {
        return invalid("trace was computed on a different hypernetwork");
    }
    if trace.layers.len() != params.num_layers() {
        return invalid("trace and parameters disagree on the layer count");
    }
    for (l, (lt, lp)) in trace.layers.iter().zip(&params.layers).enumerate() {
        if lt.input.ncols() != lp.attention.nrows() || lt.output.ncols() != lp.edge_self.ncols() {
            return invalid(format!("trace and parameters disagree on widths at layer {l}"));
        }
    }
    Ok(())
}

/// Gradient of the mean ranking loss of one network's sample set.
pub fn backward(
    g: &Hypernetwork,
    params: &ModelParams,
    trace: &ForwardTrace,
    samples: &RankingSampleSet,
) -> Result<ModelParams> {
    let (_, grad_scores) = network_loss(&trace.scores, samples)?;
    backward_from_scores(g, params, trace, &grad_scores)
}

/// Reverse pass given `d loss / d score` for every node.
pub fn backward_from_scores(
    g: &Hypernetwork,
    params: &ModelParams,
    trace: &ForwardTrace,
    grad_scores: &[f64],
) -> Result<ModelParams> {
    check_trace(g, params, trace)?;
    if grad_scores.len() != g.num_nodes() {
        return invalid("one score gradient per node is required");
    }
    let mut grads = params.zeros_like();

    // Readout.
    let grad_pre: Vec<f64> = grad_scores
        .iter()
        .zip(&trace.readout_pre)
        .map(|(&gs, &o)| match params.activation {
            Readout::Rectifier if o <= 0.0 => 0.0,
            _ => gs,
        })
        .collect();
    let grad_pre = Array2::from_shape_vec((g.num_nodes(), 1), grad_pre).expect("column");
    grads.bias = grad_pre.sum();
    let final_embeddings = trace.embeddings();
    grads.readout = final_embeddings.t().dot(&grad_pre);
    let mut grad_x = grad_pre.dot(&params.readout.t());

    for (l, (lt, lp)) in trace.layers.iter().zip(&params.layers).enumerate().rev() {
        let gl = &mut grads.layers[l];
        let d_out = lp.edge_self.ncols();

        // Node aggregation.
        let grad_node_pre =
            activate_backward(grad_x, &lt.output, &lt.node_pre, lt.node_scale, params.scaling);
        gl.node_mix = lt.node_concat.t().dot(&grad_node_pre);
        let grad_node_concat = grad_node_pre.dot(&lp.node_mix.t());
        let grad_self = grad_node_concat.slice(s![.., ..d_out]);
        let grad_from_edges = grad_node_concat.slice(s![.., d_out..]);

        gl.node_self = lt.input.t().dot(&grad_self);
        let mut grad_input = grad_self.dot(&lp.node_self.t());

        let edge_sum = scatter_to_nodes(g, lt.edges.view());
        gl.node_edges = edge_sum.t().dot(&grad_from_edges);
        let grad_edge_sum = grad_from_edges.dot(&lp.node_edges.t());

        // Hyperedge aggregation.
        let grad_edge_pre = activate_backward(
            gather_to_edges(g, grad_edge_sum.view()),
            &lt.edges,
            &lt.edge_pre,
            lt.edge_scale,
            params.scaling,
        );
        gl.edge_mix = lt.edge_concat.t().dot(&grad_edge_pre);
        let grad_edge_concat = grad_edge_pre.dot(&lp.edge_mix.t());
        let grad_pooled_branch = grad_edge_concat.slice(s![.., ..d_out]);
        let grad_overlap_branch = grad_edge_concat.slice(s![.., d_out..]);

        gl.edge_self = lt.pooled.t().dot(&grad_pooled_branch);
        gl.edge_overlap = lt.overlap.t().dot(&grad_overlap_branch);
        let mut grad_pooled = grad_pooled_branch.dot(&lp.edge_self.t());
        let grad_overlap = grad_overlap_branch.dot(&lp.edge_overlap.t());
        // H^T H is symmetric.
        grad_pooled += &gather_to_edges(g, scatter_to_nodes(g, grad_overlap.view()).view());

        // Attention pooling and its softmax.
        let mut grad_logits = vec![0.0; g.num_nodes()];
        for (e, weights) in lt.attention.iter().enumerate() {
            let members = g.hyperedge(e);
            let grad_row = grad_pooled.row(e);
            let grad_weights: Vec<f64> = members
                .iter()
                .map(|&v| grad_row.dot(&lt.input.row(v)))
                .collect();
            let mean: f64 = weights.iter().zip(&grad_weights).map(|(a, b)| a * b).sum();
            for ((&v, &w), &gw) in members.iter().zip(weights).zip(&grad_weights) {
                grad_input.row_mut(v).scaled_add(w, &grad_row);
                grad_logits[v] += w * (gw - mean);
            }
        }
        let grad_logits =
            Array2::from_shape_vec((g.num_nodes(), 1), grad_logits).expect("column");
        gl.attention = lt.input.t().dot(&grad_logits);
        grad_input += &grad_logits.dot(&lp.attention.t());

        grad_x = grad_input;
    }
    debug_assert_eq!(grad_x.len_of(Axis(1)), 1);
    grads.standardize();
    Ok(grads)
}
