//! Central-difference verification of [`backward`](super::backward).

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::forward::{forward, ForwardTrace};
use super::loss::network_loss;
use super::{backward, ModelParams, Readout};
use crate::error::{Error, Result};
use crate::hypergraph::Hypernetwork;
use crate::training::RankingSampleSet;

pub const DEFAULT_TOLERANCE: f64 = 1e-4;

/// Denominator floor of the relative error: gradients smaller than this are
/// compared in absolute terms.
const ERROR_FLOOR: f64 = 1e-3;

/// Pre-activations closer to zero than this count as sitting on a kink.
const KINK_MARGIN: f64 = 1e-3;

const JITTER: f64 = 0.05;
const MAX_ATTEMPTS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorCheck {
    pub name: String,
    pub max_rel_error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub tensors: Vec<TensorCheck>,
    pub tolerance: f64,
    pub step: f64,
    /// Parameters the differences were taken at (after any jitter).
    pub params: ModelParams,
    /// Coordinates whose `+step`/`-step` evaluations flipped a rectifier.
    pub kink_crossings: usize,
    pub attempts: usize,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.kink_crossings == 0 && self.tensors.iter().all(|t| !t.flagged)
    }

    pub fn max_rel_error(&self) -> f64 {
        self.tensors.iter().map(|t| t.max_rel_error).fold(0.0, f64::max)
    }

    pub fn flagged(&self) -> Vec<&str> {
        self.tensors
            .iter()
            .filter(|t| t.flagged)
            .map(|t| t.name.as_str())
            .collect()
    }
}

fn rectifier_pattern(trace: &ForwardTrace, activation: Readout) -> Vec<bool> {
    let mut out = Vec::new();
    for layer in &trace.layers {
        out.extend(layer.edge_pre.iter().map(|&x| x > 0.0));
        out.extend(layer.node_pre.iter().map(|&x| x > 0.0));
    }
    if activation == Readout::Rectifier {
        out.extend(trace.readout_pre.iter().map(|&x| x > 0.0));
    }
    out
}

fn min_kink_distance(trace: &ForwardTrace, activation: Readout) -> f64 {
    let mut all: Vec<&Array2<f64>> = Vec::new();
    for layer in &trace.layers {
        all.push(&layer.edge_pre);
        all.push(&layer.node_pre);
    }
    // Exact zeros come from all-zero inputs (an isolated node whose units
    // died); no weight change moves them, so they are not kinks.
    let nonzero = |x: &f64| *x != 0.0;
    let mut best = all
        .iter()
        .flat_map(|a| a.iter())
        .filter(|x| nonzero(x))
        .map(|x| x.abs())
        .fold(f64::INFINITY, f64::min);
    if activation == Readout::Rectifier {
        best = trace
            .readout_pre
            .iter()
            .filter(|x| nonzero(x))
            .map(|x| x.abs())
            .fold(best, f64::min);
    }
    best
}

fn jitter(params: &ModelParams, attempt: usize) -> ModelParams {
    let mut out = params.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6a17_7e55 ^ attempt as u64);
    for t in out.tensors_mut() {
        for x in t.iter_mut() {
            *x += rng.random_range(-JITTER..JITTER);
        }
    }
    out
}

/// Re-draws random offsets until no pre-activation lies within the kink
/// margin. Returns the parameters and the number of re-draws used.
pub fn move_off_kinks(g: &Hypernetwork, params: &ModelParams) -> Result<(ModelParams, usize)> {
    let mut current = params.clone();
    for attempt in 0..MAX_ATTEMPTS {
        let trace = forward(g, &current)?;
        if min_kink_distance(&trace, current.activation) > KINK_MARGIN {
            return Ok((current, attempt));
        }
        current = jitter(params, attempt + 1);
    }
    Err(Error::Numeric {
        layer: params.num_layers(),
        msg: "could not move parameters away from rectifier kinks".into(),
    })
}

fn loss_at(g: &Hypernetwork, params: &ModelParams, samples: &RankingSampleSet) -> Result<(f64, Vec<bool>)> {
    let trace = forward(g, params)?;
    let (loss, _) = network_loss(&trace.scores, samples)?;
    Ok((loss, rectifier_pattern(&trace, params.activation)))
}

/// Compares `analytic` against central differences of the mean sample loss at `params`.
pub fn check_against(
    g: &Hypernetwork,
    params: &ModelParams,
    samples: &RankingSampleSet,
    analytic: &ModelParams,
    step: f64,
    tolerance: f64,
) -> Result<GradCheckReport> {
    let (_, base_pattern) = loss_at(g, params, samples)?;
    let names = params.tensor_names();
    let analytic = analytic.tensors();
    let mut probe = params.clone();
    let mut kink_crossings = 0;
    let mut tensors = Vec::with_capacity(names.len());
    for (t, name) in names.into_iter().enumerate() {
        let mut worst: f64 = 0.0;
        for i in 0..analytic[t].len() {
            let original = probe.tensors()[t][i];
            probe.tensors_mut()[t][i] = original + step;
            let (plus, plus_pattern) = loss_at(g, &probe, samples)?;
            probe.tensors_mut()[t][i] = original - step;
            let (minus, minus_pattern) = loss_at(g, &probe, samples)?;
            probe.tensors_mut()[t][i] = original;
            if plus_pattern != base_pattern || minus_pattern != base_pattern {
                kink_crossings += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * step);
            let a = analytic[t][i];
            let err = (a - numeric).abs() / a.abs().max(numeric.abs()).max(ERROR_FLOOR);
            worst = worst.max(err);
        }
        tensors.push(TensorCheck {
            name,
            max_rel_error: worst,
            flagged: worst >= tolerance,
        });
    }
    Ok(GradCheckReport {
        tensors,
        tolerance,
        step,
        params: params.clone(),
        kink_crossings,
        attempts: 0,
    })
}

/// Checks [`backward`] against central differences with step `step`,
/// jittering the parameters away from rectifier kinks first.
pub fn grad_check(
    g: &Hypernetwork,
    params: &ModelParams,
    samples: &RankingSampleSet,
    step: f64,
) -> Result<GradCheckReport> {
    let (mut current, mut attempts) = move_off_kinks(g, params)?;
    loop {
        let trace = forward(g, &current)?;
        let analytic = backward(g, &current, &trace, samples)?;
        let mut report = check_against(g, &current, samples, &analytic, step, DEFAULT_TOLERANCE)?;
        report.attempts = attempts;
        if report.kink_crossings == 0 || attempts >= MAX_ATTEMPTS {
            return Ok(report);
        }
        attempts += 1;
        current = jitter(params, attempts);
    }
}
