use super::ForwardTrace;
use crate::error::{invalid, Result};
use crate::training::RankingSampleSet;

/// Loss of one ranking pair and its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceLoss {
    pub loss: f64,
    pub grad_i: f64,
    pub grad_j: f64,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + exp(x))` without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Binary cross-entropy of `sigmoid(score_i - score_j)` against `label`
/// (`true` when node `i` should rank above node `j`).
pub fn bpr_instance_loss(score_i: f64, score_j: f64, label: bool) -> InstanceLoss {
    let delta = score_i - score_j;
    let (loss, grad) = if label {
        (softplus(-delta), sigmoid(delta) - 1.0)
    } else {
        (softplus(delta), sigmoid(delta))
    };
    InstanceLoss {
        loss,
        grad_i: grad,
        grad_j: -grad,
    }
}

/// Mean pair loss of one network and its gradient with respect to every score.
pub fn network_loss(scores: &[f64], samples: &RankingSampleSet) -> Result<(f64, Vec<f64>)> {
    if samples.pairs.is_empty() {
        return invalid("empty sample set");
    }
    let n = samples.pairs.len() as f64;
    let mut grad = vec![0.0; scores.len()];
    let mut total = 0.0;
    for pair in &samples.pairs {
        if pair.i >= scores.len() || pair.j >= scores.len() {
            return invalid(format!("sample ({}, {}) out of range", pair.i, pair.j));
        }
        let l = bpr_instance_loss(scores[pair.i], scores[pair.j], pair.label);
        total += l.loss;
        grad[pair.i] += l.grad_i / n;
        grad[pair.j] += l.grad_j / n;
    }
    Ok((total / n, grad))
}

/// Mean over networks of each network's mean pair loss.
pub fn batch_loss(items: &[(&ForwardTrace, &RankingSampleSet)]) -> Result<f64> {
    if items.is_empty() {
        return invalid("empty batch");
    }
    let mut total = 0.0;
    for (trace, samples) in items {
        total += network_loss(&trace.scores, samples)?.0;
    }
    Ok(total / items.len() as f64)
}
