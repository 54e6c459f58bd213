//! Ranking labels from exact betweenness and the supervised training loop.

use std::collections::HashSet;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::betweenness;
use crate::error::{invalid, Error, Result};
use crate::generator::{generate, stream_rng, HyperFFParams, SynthBatchSpec};
use crate::hypergraph::Hypernetwork;
use crate::model::{
    adam_step, backward_from_scores, forward, network_loss, predict, AdamConfig, ModelParams,
    OptimizerState, Readout, Scaling,
};

/// One labelled pair: `label` is `true` when node `i` has the larger betweenness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingSample {
    pub i: usize,
    pub j: usize,
    pub label: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RankingSampleSet {
    pub pairs: Vec<RankingSample>,
}

impl RankingSampleSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Betweenness values this close (relative) are treated as tied.
pub fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Draws `ceil(ratio * N)` distinct unordered pairs with unequal betweenness.
pub fn build_samples(
    g: &Hypernetwork,
    betweenness: &[f64],
    ratio: f64,
    seed: u64,
) -> Result<RankingSampleSet> {
    let n = g.num_nodes();
    if betweenness.len() != n {
        return invalid("one betweenness value per node is required");
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return invalid(format!("pair ratio {ratio} must be positive"));
    }
    let need = (ratio * n as f64).ceil() as usize;
    let mut available = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            if !tied(betweenness[i], betweenness[j]) {
                available += 1;
            }
        }
    }
    if available < need {
        return Err(Error::Degenerate(format!(
            "{need} pairs requested but only {available} have unequal betweenness"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(need);
    if 2 * need <= available {
        let mut seen = HashSet::with_capacity(need);
        while pairs.len() < need {
            let i = rng.random_range(0..n);
            let j = rng.random_range(0..n);
            if i == j || tied(betweenness[i], betweenness[j]) || !seen.insert((i.min(j), i.max(j)))
            {
                continue;
            }
            pairs.push((i, j));
        }
    } else {
        let mut all = Vec::with_capacity(available);
        for i in 0..n {
            for j in i + 1..n {
                if !tied(betweenness[i], betweenness[j]) {
                    all.push((i, j));
                }
            }
        }
        for k in index::sample(&mut rng, all.len(), need) {
            let (i, j) = all[k];
            pairs.push(if rng.random::<bool>() { (i, j) } else { (j, i) });
        }
    }
    Ok(RankingSampleSet {
        pairs: pairs
            .into_iter()
            .map(|(i, j)| RankingSample {
                i,
                j,
                label: betweenness[i] > betweenness[j],
            })
            .collect(),
    })
}

/// A generated network with its exact labels.
#[derive(Debug, Clone)]
pub struct LabeledNetwork {
    pub generator: HyperFFParams,
    pub graph: Hypernetwork,
    pub betweenness: Vec<f64>,
    pub samples: RankingSampleSet,
}

const DEGENERATE_RETRIES: u64 = 10;

fn label_one(spec: &SynthBatchSpec, index: usize, ratio: f64) -> Result<Option<LabeledNetwork>> {
    let drawn = spec.draw(index);
    for attempt in 0..=DEGENERATE_RETRIES {
        let generator = if attempt == 0 {
            drawn
        } else {
            HyperFFParams {
                seed: stream_rng(drawn.seed, attempt).random(),
                ..drawn
            }
        };
        let graph = generate(&generator)?;
        let values = betweenness(&graph.two_section());
        let sample_seed = stream_rng(generator.seed, u64::MAX).random();
        match build_samples(&graph, &values, ratio, sample_seed) {
            Ok(samples) => {
                return Ok(Some(LabeledNetwork {
                    generator,
                    graph,
                    betweenness: values,
                    samples,
                }))
            }
            Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Generates and labels a batch; degenerate networks are regenerated with
/// fresh seeds and dropped after the retry budget.
pub fn labeled_batch(spec: &SynthBatchSpec, ratio: f64) -> Result<Vec<LabeledNetwork>> {
    spec.validate()?;
    let labeled: Vec<Option<LabeledNetwork>> = (0..spec.count)
        .into_par_iter()
        .map(|i| label_one(spec, i, ratio))
        .collect::<Result<_>>()?;
    Ok(labeled.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub networks: usize,
    pub n_range: (usize, usize),
    pub p_range: (f64, f64),
    pub q_range: (f64, f64),
    pub pair_ratio: f64,
    pub max_iterations: usize,
    pub validation_networks: usize,
    pub patience: usize,
    pub layers: usize,
    pub dim: usize,
    pub learning_rate: f64,
    pub activation: Readout,
    pub scaling: Scaling,
    pub seed: u64,
    /// Visit training networks in a fresh random order every iteration.
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            networks: 1000,
            n_range: (100, 150),
            p_range: (0.1, 0.4),
            q_range: (0.1, 0.4),
            pair_ratio: 0.9,
            max_iterations: 1000,
            validation_networks: 50,
            patience: 100,
            layers: 4,
            dim: 32,
            learning_rate: 0.005,
            activation: Readout::Identity,
            scaling: Scaling::Rms,
            seed: 0,
            shuffle: false,
        }
    }
}

const STREAM_TRAIN: u64 = 1;
const STREAM_VALIDATION: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_SHUFFLE: u64 = 4;

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pair_ratio > 0.0) {
            return Err(Error::Config("pair ratio must be positive".into()));
        }
        if self.patience == 0 || self.max_iterations == 0 {
            return Err(Error::Config("patience and iterations must be at least 1".into()));
        }
        if self.layers == 0 || self.dim == 0 {
            return Err(Error::Config("layers and dim must be at least 1".into()));
        }
        if self.validation_networks == 0 {
            return Err(Error::Config("at least one validation network is required".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        self.training_spec().validate()
    }

    fn derived_seed(&self, stream: u64) -> u64 {
        stream_rng(self.seed, stream).random()
    }

    pub fn training_spec(&self) -> SynthBatchSpec {
        SynthBatchSpec {
            count: self.networks,
            n_range: self.n_range,
            p_range: self.p_range,
            q_range: self.q_range,
            seed: self.derived_seed(STREAM_TRAIN),
        }
    }

    pub fn validation_spec(&self) -> SynthBatchSpec {
        SynthBatchSpec {
            count: self.validation_networks,
            seed: self.derived_seed(STREAM_VALIDATION),
            ..self.training_spec()
        }
    }

    pub fn init_seed(&self) -> u64 {
        self.derived_seed(STREAM_INIT)
    }

    pub fn hash(&self) -> String {
        crate::config_hash(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub iteration: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
    pub validation_accuracy: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingLog {
    pub initial_validation_loss: f64,
    pub rows: Vec<LogRow>,
    /// Iteration whose parameters were returned; 0 means the initialization.
    pub best_iteration: usize,
    pub best_validation_loss: f64,
    pub training_networks: usize,
}

impl TrainingLog {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,train_loss,validation_loss,validation_accuracy,seconds\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.3}\n",
                r.iteration, r.train_loss, r.validation_loss, r.validation_accuracy, r.seconds
            ));
        }
        out
    }
}

/// Mean per-network loss and pooled pairwise accuracy over `networks`.
pub fn evaluate(params: &ModelParams, networks: &[LabeledNetwork]) -> Result<(f64, f64)> {
    if networks.is_empty() {
        return invalid("no networks to evaluate");
    }
    let per: Vec<(f64, usize, usize)> = networks
        .par_iter()
        .map(|net| {
            let scores = predict(&net.graph, params)?;
            let (loss, _) = network_loss(&scores, &net.samples)?;
            let correct = count_correct(&scores, &net.samples);
            Ok((loss, correct, net.samples.len()))
        })
        .collect::<Result<_>>()?;
    let loss = per.iter().map(|p| p.0).sum::<f64>() / per.len() as f64;
    let correct: usize = per.iter().map(|p| p.1).sum();
    let total: usize = per.iter().map(|p| p.2).sum();
    Ok((loss, correct as f64 / total as f64))
}

fn count_correct(scores: &[f64], samples: &RankingSampleSet) -> usize {
    samples
        .pairs
        .iter()
        .filter(|p| {
            let delta = scores[p.i] - scores[p.j];
            (p.label && delta > 0.0) || (!p.label && delta < 0.0)
        })
        .count()
}

/// Fraction of pairs ordered correctly by the model; ties count as wrong.
pub fn pairwise_accuracy(
    params: &ModelParams,
    sets: &[(&Hypernetwork, &RankingSampleSet)],
) -> Result<f64> {
    let total: usize = sets.iter().map(|(_, s)| s.len()).sum();
    if total == 0 {
        return invalid("no samples to score");
    }
    let mut correct = 0;
    for (g, samples) in sets {
        let scores = predict(g, params)?;
        if samples.pairs.iter().any(|p| p.i >= scores.len() || p.j >= scores.len()) {
            return invalid("sample refers to a node outside its network");
        }
        correct += count_correct(&scores, samples);
    }
    Ok(correct as f64 / total as f64)
}

/// Output of [`train`].
#[derive(Debug, Clone)]
pub struct Trained {
    pub params: ModelParams,
    pub log: TrainingLog,
}

/// Runs the optimization loop on freshly generated training and validation networks.
pub fn train(config: &TrainConfig) -> Result<Trained> {
    config.validate()?;
    let training = labeled_batch(&config.training_spec(), config.pair_ratio)?;
    let validation = labeled_batch(&config.validation_spec(), config.pair_ratio)?;
    if training.is_empty() || validation.is_empty() {
        return Err(Error::Config("every generated network was degenerate".into()));
    }
    train_on(config, &training, &validation)
}

/// The optimization loop on given labelled networks.
pub fn train_on(
    config: &TrainConfig,
    training: &[LabeledNetwork],
    validation: &[LabeledNetwork],
) -> Result<Trained> {
    config.validate()?;
    if training.is_empty() || validation.is_empty() {
        return Err(Error::Config("training and validation sets must be non-empty".into()));
    }
    let start = Instant::now();
    let mut params = ModelParams::init(config.layers, config.dim, config.activation, config.init_seed())
        .with_scaling(config.scaling);
    let mut state = OptimizerState::new(
        &params,
        AdamConfig {
            learning_rate: config.learning_rate,
            ..AdamConfig::default()
        },
    );
    let (initial_validation_loss, _) = evaluate(&params, validation)?;
    let mut best = (initial_validation_loss, params.clone(), 0);
    let mut since_best = 0;
    let mut rows = Vec::new();
    let mut order: Vec<usize> = (0..training.len()).collect();
    let mut shuffle_rng = stream_rng(config.seed, STREAM_SHUFFLE);

    for iteration in 1..=config.max_iterations {
        if config.shuffle {
            order.shuffle(&mut shuffle_rng);
        }
        let mut train_loss = 0.0;
        for &k in &order {
            let net = &training[k];
            let trace = forward(&net.graph, &params)?;
            let (loss, grad_scores) = network_loss(&trace.scores, &net.samples)?;
            let grads = backward_from_scores(&net.graph, &params, &trace, &grad_scores)?;
            adam_step(&mut state, &mut params, &grads)?;
            train_loss += loss;
        }
        train_loss /= training.len() as f64;
        let (validation_loss, validation_accuracy) = evaluate(&params, validation)?;
        rows.push(LogRow {
            iteration,
            train_loss,
            validation_loss,
            validation_accuracy,
            seconds: start.elapsed().as_secs_f64(),
        });
        if validation_loss < best.0 {
            best = (validation_loss, params.clone(), iteration);
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= config.patience {
                break;
            }
        }
    }
    let (best_validation_loss, best_params, best_iteration) = best;
    Ok(Trained {
        params: best_params,
        log: TrainingLog {
            initial_validation_loss,
            rows,
            best_iteration,
            best_validation_loss,
            training_networks: training.len(),
        },
    })
}
