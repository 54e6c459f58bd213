use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hnd_core::model::Scaling;
use hnd_core::{AncDenominator, DismantleConfig, Format, Readout, TrainConfig};

#[derive(Debug, Parser, Serialize)]
#[command(name = "hnd", version, about = "Betweenness-guided hypernetwork dismantling")]
pub struct Cli {
    /// Master seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Directory that receives output files.
    #[arg(long, global = true, env = "HND_OUTPUT_DIR", default_value = "hnd-out")]
    #[serde(skip)]
    pub output: PathBuf,

    /// Hypernetwork file format for reading and writing.
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::HyperedgeList)]
    pub format: FormatArg,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Generate a batch of synthetic hypernetworks.
    Generate(GenerateArgs),
    /// Train the betweenness ranking model.
    Train(TrainArgs),
    /// Score the nodes of one hypernetwork.
    Score(ScoreArgs),
    /// Adaptively dismantle one hypernetwork.
    Dismantle(DismantleArgs),
    /// Dismantle several datasets with several scorers and tabulate ANC.
    Evaluate(EvaluateArgs),
    /// Inference-time scaling and layer-depth sweeps.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum FormatArg {
    HyperedgeList,
    Structured,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::HyperedgeList => Format::HyperedgeList,
            FormatArg::Structured => Format::Structured,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ScorerName {
    Hnd,
    Hda,
    Hhda,
    Ci,
    Betweenness,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum ReadoutArg {
    Identity,
    Rectifier,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum ScalingArg {
    Rms,
    None,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
pub enum DenominatorArg {
    OriginalGcc,
    Residual,
}

/// `MIN,MAX` or `MIN..MAX`, both ends inclusive.
pub fn parse_pair<T: std::str::FromStr>(s: &str) -> std::result::Result<(T, T), String> {
    let (a, b) = s
        .split_once(',')
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected MIN,MAX but got `{s}`"))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| format!("cannot parse `{x}` in `{s}`"))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Parsed by [`parse_list`] as one argument; the alias keeps clap from
/// treating the field as a repeated flag.
pub type CountList = Vec<usize>;

/// `1..6` (inclusive) or a comma-separated list.
pub fn parse_list(s: &str) -> std::result::Result<CountList, String> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (usize, usize) = parse_pair(&format!("{a},{b}"))?;
        if a > b {
            return Err(format!("empty range `{s}`"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| format!("cannot parse `{x}` in `{s}`")))
        .collect()
}

#[derive(Debug, Args, Serialize)]
pub struct SynthArgs {
    /// Number of networks.
    #[arg(long, default_value_t = 1000)]
    pub networks: usize,
    /// Node count range.
    #[arg(long, value_parser = parse_pair::<usize>, default_value = "100,150")]
    pub n_range: (usize, usize),
    /// Burning probability range.
    #[arg(long, value_parser = parse_pair::<f64>, default_value = "0.1,0.4")]
    pub p_range: (f64, f64),
    /// Expanding probability range.
    #[arg(long, value_parser = parse_pair::<f64>, default_value = "0.1,0.4")]
    pub q_range: (f64, f64),
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Let secondary fires spread recursively.
    #[arg(long)]
    pub expand_recursive: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 4)]
    pub layers: usize,
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = ReadoutArg::Identity)]
    pub readout: ReadoutArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::Rms)]
    pub scaling: ScalingArg,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0.005)]
    pub lr: f64,
    /// Maximum passes over the training networks.
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    /// Passes without validation improvement before stopping.
    #[arg(long, default_value_t = 100)]
    pub patience: usize,
    /// Sampled pairs per network as a multiple of its node count.
    #[arg(long, default_value_t = 0.9)]
    pub pairs_ratio: f64,
    #[arg(long, default_value_t = 50)]
    pub validation_networks: usize,
    /// Visit training networks in a new random order every pass.
    #[arg(long)]
    pub shuffle: bool,
}

impl TrainArgs {
    pub fn config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            networks: self.synth.networks,
            n_range: self.synth.n_range,
            p_range: self.synth.p_range,
            q_range: self.synth.q_range,
            pair_ratio: self.pairs_ratio,
            max_iterations: self.iterations,
            validation_networks: self.validation_networks,
            patience: self.patience,
            layers: self.model.layers,
            dim: self.model.dim,
            learning_rate: self.lr,
            activation: match self.model.readout {
                ReadoutArg::Identity => Readout::Identity,
                ReadoutArg::Rectifier => Readout::Rectifier,
            },
            scaling: match self.model.scaling {
                ScalingArg::Rms => Scaling::Rms,
                ScalingArg::None => Scaling::None,
            },
            seed,
            shuffle: self.shuffle,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScorerArgs {
    /// Scoring strategy (repeat or comma-separate for `evaluate`).
    #[arg(long, value_enum, value_delimiter = ',', default_value = "hnd")]
    pub scorer: Vec<ScorerName>,
    /// Trained model, required by the hnd scorer.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Collective-influence radius.
    #[arg(long, default_value_t = 2)]
    pub ci_k: usize,
    /// Collective influence sums over the whole ball instead of the frontier.
    #[arg(long)]
    pub ci_ball: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct RemovalArgs {
    /// Fraction of the original node count removed per batch.
    #[arg(long, default_value_t = 0.01)]
    pub batch_fraction: f64,
    /// Stop once the giant component holds at most this fraction of nodes.
    #[arg(long, default_value_t = 0.0)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = DenominatorArg::OriginalGcc)]
    pub anc_denominator: DenominatorArg,
}

impl RemovalArgs {
    pub fn config(&self) -> DismantleConfig {
        DismantleConfig {
            denominator: match self.anc_denominator {
                DenominatorArg::OriginalGcc => AncDenominator::OriginalGcc,
                DenominatorArg::Residual => AncDenominator::Residual,
            },
            ..DismantleConfig::new(self.batch_fraction, self.threshold)
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// Hypernetwork file.
    pub input: PathBuf,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Also emit exact betweenness of the 2-section graph.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct DismantleArgs {
    /// Hypernetwork file.
    pub input: PathBuf,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub removal: RemovalArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Dataset files; each is reduced to its giant component first.
    #[arg(required = true)]
    pub datasets: Vec<PathBuf>,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[command(flatten)]
    pub removal: RemovalArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct BenchArgs {
    /// Network sizes for the timing comparison.
    #[arg(long, value_parser = parse_list)]
    pub scales: Option<CountList>,
    /// Layer counts for the depth sweep, e.g. `1..6`.
    #[arg(long, value_parser = parse_list)]
    pub layers: Option<CountList>,
    /// Timing runs per measurement; the fastest is kept.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Burning and expanding probability of the timed networks.
    #[arg(long, default_value_t = 0.25)]
    pub timing_pq: f64,
    /// Model timed by the scaling benchmark; random weights otherwise.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Held-out networks the sweep dismantles.
    #[arg(long, default_value_t = 20)]
    pub test_networks: usize,
    /// Node count of each held-out network.
    #[arg(long, default_value_t = 200)]
    pub test_n: usize,
    #[command(flatten)]
    pub removal: RemovalArgs,
    #[command(flatten)]
    pub train: BenchTrainArgs,
}

/// Training settings for the sweep; kept separate from `train` so the
/// depth is owned by `--layers`.
#[derive(Debug, Args, Serialize)]
pub struct BenchTrainArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value_t = 32)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = ReadoutArg::Identity)]
    pub readout: ReadoutArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::Rms)]
    pub scaling: ScalingArg,
    #[arg(long, default_value_t = 0.005)]
    pub lr: f64,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 100)]
    pub patience: usize,
    #[arg(long, default_value_t = 0.9)]
    pub pairs_ratio: f64,
    #[arg(long, default_value_t = 50)]
    pub validation_networks: usize,
}

impl BenchTrainArgs {
    pub fn train_args(&self) -> TrainArgs {
        TrainArgs {
            synth: SynthArgs {
                networks: self.synth.networks,
                n_range: self.synth.n_range,
                p_range: self.synth.p_range,
                q_range: self.synth.q_range,
            },
            model: ModelArgs {
                layers: 1,
                dim: self.dim,
                readout: self.readout,
                scaling: self.scaling,
            },
            lr: self.lr,
            iterations: self.iterations,
            patience: self.patience,
            pairs_ratio: self.pairs_ratio,
            validation_networks: self.validation_networks,
            shuffle: false,
        }
    }
}
