//! Adaptive dismantling and accumulated normalized connectivity (ANC).
//!
//! A run scores the surviving nodes, removes the best-scoring batch, and
//! rescoring happens on the residual hypernetwork. Connectivity is recorded
//! after every individual removal.

use serde::{Deserialize, Serialize};

use crate::centrality::{betweenness, collective_influence, Neighborhood};
use crate::error::{invalid, Result};
use crate::hypergraph::Hypernetwork;
use crate::model::{predict, ModelParams};

/// Strategy mapping a residual hypernetwork to one score per surviving node.
#[derive(Debug, Clone)]
pub enum Scorer {
    /// Learned betweenness approximation.
    Hnd(Box<ModelParams>),
    /// Distinct-neighbour degree.
    Hda,
    /// Hyperdegree.
    Hhda,
    /// Collective influence on the 2-section graph.
    Ci { k: usize, hood: Neighborhood },
    /// Exact betweenness of the 2-section graph.
    ExactBetweenness,
}

impl Scorer {
    pub fn hnd(params: ModelParams) -> Self {
        Self::Hnd(Box::new(params))
    }

    pub fn ci(k: usize) -> Self {
        Self::Ci {
            k,
            hood: Neighborhood::Frontier,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Hnd(_) => "hnd",
            Self::Hda => "hda",
            Self::Hhda => "hhda",
            Self::Ci { .. } => "ci",
            Self::ExactBetweenness => "betweenness",
        }
    }

    pub fn score(&self, g: &Hypernetwork) -> Result<Vec<f64>> {
        let n = g.num_nodes();
        Ok(match self {
            // Removals leave size-1 and repeated hyperedges behind. They carry
            // no paths and never occur in generated training networks.
            Self::Hnd(params) => predict(&g.without_redundant_hyperedges(), params)?,
            Self::Hda => {
                let s = g.two_section();
                (0..n).map(|v| s.degree(v) as f64).collect()
            }
            Self::Hhda => (0..n).map(|v| g.memberships(v).len() as f64).collect(),
            Self::Ci { k, hood } => {
                if *k == 0 {
                    return invalid("collective influence radius must be at least 1");
                }
                collective_influence(&g.two_section(), *k, *hood)
            }
            Self::ExactBetweenness => betweenness(&g.two_section()),
        })
    }
}

/// How each recorded ratio is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AncDenominator {
    /// `|V_GCC(residual)| / |V_GCC(original)|`.
    #[default]
    OriginalGcc,
    /// `connectivity(residual) / connectivity(original)`, with the residual's
    /// own node count in its connectivity.
    Residual,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DismantleConfig {
    pub batch_fraction: f64,
    pub stop_threshold: f64,
    pub denominator: AncDenominator,
}

impl Default for DismantleConfig {
    fn default() -> Self {
        Self {
            batch_fraction: 0.01,
            stop_threshold: 0.0,
            denominator: AncDenominator::OriginalGcc,
        }
    }
}

impl DismantleConfig {
    pub fn new(batch_fraction: f64, stop_threshold: f64) -> Self {
        Self {
            batch_fraction,
            stop_threshold,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.batch_fraction > 0.0 && self.batch_fraction <= 1.0) {
            return invalid(format!("batch fraction {} outside (0, 1]", self.batch_fraction));
        }
        if !(0.0..1.0).contains(&self.stop_threshold) {
            return invalid(format!("stop threshold {} outside [0, 1)", self.stop_threshold));
        }
        Ok(())
    }

    /// Nodes removed per scoring round for a network of `n` nodes.
    pub fn batch_size(&self, n: usize) -> usize {
        ((self.batch_fraction * n as f64).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DismantleResult {
    pub scorer: String,
    pub config: DismantleConfig,
    pub num_nodes: usize,
    pub initial_gcc_nodes: usize,
    /// Removed nodes in order, as ids of the input hypernetwork.
    pub removal: Vec<usize>,
    /// Giant-component node count after each removal.
    pub gcc_nodes: Vec<usize>,
    /// Normalized connectivity after each removal.
    pub ratios: Vec<f64>,
    /// Mean of `ratios`; `None` when nothing was removed.
    pub anc: Option<f64>,
}

/// Arithmetic mean of the per-removal connectivity ratios.
pub fn anc(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return invalid("ANC of an empty removal sequence");
    }
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// `(k / N, ratio_k)` for every removal `k = 1..K`.
pub fn dismantling_curve(result: &DismantleResult) -> Vec<(f64, f64)> {
    result
        .ratios
        .iter()
        .enumerate()
        .map(|(k, &r)| ((k + 1) as f64 / result.num_nodes as f64, r))
        .collect()
}

/// Residual network plus bookkeeping shared by adaptive and replayed runs.
struct Progress {
    residual: Hypernetwork,
    /// Input-network id of every residual node.
    original_id: Vec<usize>,
    num_nodes: usize,
    initial_gcc: usize,
    initial_connectivity: f64,
    config: DismantleConfig,
    removal: Vec<usize>,
    gcc_nodes: Vec<usize>,
    ratios: Vec<f64>,
}

impl Progress {
    fn new(g: &Hypernetwork, config: DismantleConfig) -> Result<Self> {
        config.validate()?;
        let initial_gcc = g.components().giant_node_count();
        let n = g.num_nodes();
        Ok(Self {
            residual: g.clone(),
            original_id: (0..n).collect(),
            num_nodes: n,
            initial_gcc,
            initial_connectivity: if n == 0 { 0.0 } else { initial_gcc as f64 / n as f64 },
            config,
            removal: Vec::new(),
            gcc_nodes: Vec::new(),
            ratios: Vec::new(),
        })
    }

    fn done(&self) -> bool {
        let current = self.gcc_nodes.last().copied().unwrap_or(self.initial_gcc);
        self.residual.num_nodes() == 0
            || self.num_nodes == 0
            || current as f64 / self.num_nodes as f64 <= self.config.stop_threshold
    }

    /// Removes one node given by its input-network id.
    fn remove(&mut self, original: usize) -> Result<()> {
        // Residual ids keep the input order, so `original_id` stays sorted.
        let Ok(current) = self.original_id.binary_search(&original) else {
            return invalid(format!("node {original} already removed or out of range"));
        };
        let removal = self.residual.remove_nodes(&[current])?;
        self.original_id.remove(current);
        self.residual = removal.graph;
        let gcc = self.residual.components().giant_node_count();
        let ratio = match self.config.denominator {
            AncDenominator::OriginalGcc => gcc as f64 / self.initial_gcc as f64,
            AncDenominator::Residual => {
                let n = self.residual.num_nodes();
                let connectivity = if n == 0 { 0.0 } else { gcc as f64 / n as f64 };
                connectivity / self.initial_connectivity
            }
        };
        self.removal.push(original);
        self.gcc_nodes.push(gcc);
        self.ratios.push(ratio);
        Ok(())
    }

    fn finish(self, scorer: &str) -> DismantleResult {
        let anc = anc(&self.ratios).ok();
        DismantleResult {
            scorer: scorer.to_string(),
            config: self.config,
            num_nodes: self.num_nodes,
            initial_gcc_nodes: self.initial_gcc,
            removal: self.removal,
            gcc_nodes: self.gcc_nodes,
            ratios: self.ratios,
            anc,
        }
    }
}

/// Greedy adaptive dismantling with [`AncDenominator::OriginalGcc`] ratios.
pub fn dismantle(
    g: &Hypernetwork,
    scorer: &Scorer,
    batch_fraction: f64,
    stop_threshold: f64,
) -> Result<DismantleResult> {
    dismantle_with(g, scorer, &DismantleConfig::new(batch_fraction, stop_threshold))
}

pub fn dismantle_with(
    g: &Hypernetwork,
    scorer: &Scorer,
    config: &DismantleConfig,
) -> Result<DismantleResult> {
    let mut progress = Progress::new(g, *config)?;
    let batch = config.batch_size(g.num_nodes());
    while !progress.done() {
        let scores = scorer.score(&progress.residual)?;
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| {
            scores[b]
                .total_cmp(&scores[a])
                .then(progress.original_id[a].cmp(&progress.original_id[b]))
        });
        let chosen: Vec<usize> = order
            .into_iter()
            .take(batch)
            .map(|c| progress.original_id[c])
            .collect();
        for v in chosen {
            progress.remove(v)?;
            if progress.done() {
                break;
            }
        }
    }
    Ok(progress.finish(scorer.name()))
}

/// Applies a fixed removal order under the same stop rule and bookkeeping.
pub fn replay(g: &Hypernetwork, order: &[usize], config: &DismantleConfig) -> Result<DismantleResult> {
    let mut progress = Progress::new(g, *config)?;
    for &v in order {
        if progress.done() {
            break;
        }
        progress.remove(v)?;
    }
    Ok(progress.finish("replay"))
}
