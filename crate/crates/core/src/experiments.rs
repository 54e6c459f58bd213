//! Scorer comparison tables, inference-time scaling, and layer-depth sweeps.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::betweenness;
use crate::dismantle::{dismantle_with, DismantleConfig, Scorer};
use crate::error::{invalid, Result};
use crate::generator::{generate, HyperFFParams};
use crate::hypergraph::Hypernetwork;
use crate::model::{predict, ModelParams};
use crate::training::{train, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AncRow {
    pub dataset: String,
    pub scorer: String,
    pub anc: Option<f64>,
    pub removed: usize,
}

/// Dismantles every dataset with every scorer. Cells run in parallel; rows
/// come back dataset-major in input order.
pub fn evaluate_matrix(
    datasets: &[(String, Hypernetwork)],
    scorers: &[Scorer],
    config: &DismantleConfig,
) -> Result<Vec<AncRow>> {
    let cells: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..scorers.len()).map(move |s| (d, s)))
        .collect();
    cells
        .par_iter()
        .map(|&(d, s)| {
            let (name, g) = &datasets[d];
            let result = dismantle_with(g, &scorers[s], config)?;
            Ok(AncRow {
                dataset: name.clone(),
                scorer: scorers[s].name().to_string(),
                anc: result.anc,
                removed: result.removal.len(),
            })
        })
        .collect()
}

/// Mean ANC of `scorer` over `networks`; runs without removals are skipped.
pub fn mean_anc(networks: &[Hypernetwork], scorer: &Scorer, config: &DismantleConfig) -> Result<f64> {
    let values: Vec<Option<f64>> = networks
        .par_iter()
        .map(|g| dismantle_with(g, scorer, config).map(|r| r.anc))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = values.into_iter().flatten().collect();
    if values.is_empty() {
        return invalid("no network produced a removal sequence");
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub method: String,
    pub scale: usize,
    pub hyperedges: usize,
    pub incidences: usize,
    pub seconds: f64,
}

fn best_of<F: FnMut() -> Result<()>>(repeats: usize, mut f: F) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        f()?;
        best = best.min(start.elapsed().as_secs_f64());
    }
    Ok(best)
}

/// Times one model inference and one exact betweenness computation (2-section
/// expansion included) on a generated network of each scale. Each time is the
/// best of `repeats` runs.
pub fn scaling_benchmark(
    scales: &[usize],
    params: &ModelParams,
    burn_p: f64,
    expand_q: f64,
    seed: u64,
    repeats: usize,
) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for &scale in scales {
        let g = generate(&HyperFFParams::new(scale, burn_p, expand_q, seed))?;
        let row = |method: &str, seconds| TimingRow {
            method: method.to_string(),
            scale,
            hyperedges: g.num_hyperedges(),
            incidences: g.num_incidences(),
            seconds,
        };
        let hnd = best_of(repeats, || predict(&g, params).map(drop))?;
        rows.push(row("hnd", hnd));
        let exact = best_of(repeats, || {
            betweenness(&g.two_section());
            Ok(())
        })?;
        rows.push(row("betweenness", exact));
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub layers: usize,
    pub mean_anc: f64,
    pub best_validation_loss: f64,
    pub best_iteration: usize,
}

/// Trains one model per depth in `layers` and dismantles `test_suite` with each.
pub fn layer_sweep(
    layers: &[usize],
    base: &TrainConfig,
    test_suite: &[Hypernetwork],
    config: &DismantleConfig,
) -> Result<Vec<SweepRow>> {
    layers
        .iter()
        .map(|&l| {
            let trained = train(&TrainConfig {
                layers: l,
                ..base.clone()
            })?;
            let mean = mean_anc(test_suite, &Scorer::hnd(trained.params), config)?;
            Ok(SweepRow {
                layers: l,
                mean_anc: mean,
                best_validation_loss: trained.log.best_validation_loss,
                best_iteration: trained.log.best_iteration,
            })
        })
        .collect()
}
