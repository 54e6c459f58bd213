use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use hnd_core::dataset::{ingest, DatasetManifest};
use hnd_core::experiments::{evaluate_matrix, layer_sweep, loglog_slope, scaling_benchmark};
use hnd_core::generator::stream_rng;
use hnd_core::io::{export, parse};
use hnd_core::model::{load_checkpoint, save_checkpoint, CheckpointMeta};
use hnd_core::{
    betweenness, config_hash, dismantle_with, dismantling_curve, generate, train, Format,
    HyperFFParams, Hypernetwork, ModelParams, Neighborhood, Readout, Scorer, SynthBatchSpec,
};
use rand::Rng;

use crate::args::{
    BenchArgs, Cli, Command, DismantleArgs, EvaluateArgs, GenerateArgs, ScoreArgs, ScorerArgs,
    ScorerName, TrainArgs,
};
use crate::output::{csv_field, num, OutputDir, Provenance};
use crate::UsageError;

/// Stream of the master seed reserved for the sweep's held-out networks.
const STREAM_TEST_SUITE: u64 = 16;

pub fn run(cli: &Cli) -> Result<()> {
    let name = match &cli.command {
        Command::Generate(_) => "generate",
        Command::Train(_) => "train",
        Command::Score(_) => "score",
        Command::Dismantle(_) => "dismantle",
        Command::Evaluate(_) => "evaluate",
        Command::Bench(_) => "bench",
    };
    let provenance = Provenance::new(name, cli.seed, config_hash(cli));
    let out = OutputDir::create(&cli.output, provenance)?;
    let format = Format::from(cli.format);
    match &cli.command {
        Command::Generate(a) => run_generate(a, cli.seed, format, &out),
        Command::Train(a) => run_train(a, cli.seed, &out),
        Command::Score(a) => run_score(a, format, &out),
        Command::Dismantle(a) => run_dismantle(a, format, &out),
        Command::Evaluate(a) => run_evaluate(a, format, &out),
        Command::Bench(a) => run_bench(a, cli.seed, &out),
    }
}

fn read_network(path: &Path, format: Format) -> Result<Hypernetwork> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&bytes, format).with_context(|| format!("parsing {}", path.display()))
}

fn load_model(path: &Path) -> Result<ModelParams> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let (params, _) =
        load_checkpoint(&bytes).with_context(|| format!("loading {}", path.display()))?;
    Ok(params)
}

fn build_scorer(name: ScorerName, args: &ScorerArgs, model: Option<&ModelParams>) -> Result<Scorer> {
    Ok(match name {
        ScorerName::Hnd => match model {
            Some(params) => Scorer::hnd(params.clone()),
            None => return Err(UsageError("the hnd scorer needs --checkpoint".into()).into()),
        },
        ScorerName::Hda => Scorer::Hda,
        ScorerName::Hhda => Scorer::Hhda,
        ScorerName::Ci => Scorer::Ci {
            k: args.ci_k,
            hood: if args.ci_ball {
                Neighborhood::Ball
            } else {
                Neighborhood::Frontier
            },
        },
        ScorerName::Betweenness => Scorer::ExactBetweenness,
    })
}

fn build_scorers(args: &ScorerArgs) -> Result<Vec<Scorer>> {
    let model = args.checkpoint.as_deref().map(load_model).transpose()?;
    args.scorer
        .iter()
        .map(|&name| build_scorer(name, args, model.as_ref()))
        .collect()
}

fn single_scorer(args: &ScorerArgs) -> Result<Scorer> {
    if args.scorer.len() != 1 {
        return Err(UsageError("exactly one --scorer is expected here".into()).into());
    }
    Ok(build_scorers(args)?.remove(0))
}

fn extension(format: Format) -> &'static str {
    match format {
        Format::HyperedgeList => "txt",
        Format::Structured => "json",
    }
}

#[derive(Serialize)]
struct GeneratedEntry {
    file: String,
    params: HyperFFParams,
    nodes: usize,
    hyperedges: usize,
}

fn run_generate(a: &GenerateArgs, seed: u64, format: Format, out: &OutputDir) -> Result<()> {
    let spec = SynthBatchSpec {
        count: a.synth.networks,
        n_range: a.synth.n_range,
        p_range: a.synth.p_range,
        q_range: a.synth.q_range,
        seed,
    };
    spec.validate()?;
    let networks: Vec<(HyperFFParams, Hypernetwork)> = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let params = HyperFFParams {
                expand_recursive: a.expand_recursive,
                ..spec.draw(i)
            };
            generate(&params).map(|g| (params, g))
        })
        .collect::<hnd_core::Result<_>>()?;
    let mut entries = Vec::with_capacity(networks.len());
    for (i, (params, g)) in networks.iter().enumerate() {
        let file = format!("network_{i:05}.{}", extension(format));
        out.write_bytes(&file, export(g, format).as_bytes())?;
        entries.push(GeneratedEntry {
            file,
            params: *params,
            nodes: g.num_nodes(),
            hyperedges: g.num_hyperedges(),
        });
    }
    out.write_json("manifest.json", &entries)?;
    println!("wrote {} networks to {}", entries.len(), out.path("").display());
    Ok(())
}

fn run_train(a: &TrainArgs, seed: u64, out: &OutputDir) -> Result<()> {
    let config = a.config(seed);
    let trained = train(&config)?;
    let meta = CheckpointMeta::for_params(&trained.params, config.hash(), seed);
    out.write_bytes("checkpoint.bin", &save_checkpoint(&trained.params, &meta))?;
    let log = &trained.log;
    let rows: Vec<Vec<String>> = log
        .rows
        .iter()
        .map(|r| {
            vec![
                r.iteration.to_string(),
                num(r.train_loss),
                num(r.validation_loss),
                num(r.validation_accuracy),
                format!("{:.3}", r.seconds),
            ]
        })
        .collect();
    out.write_table(
        "training_log.csv",
        &["iteration", "train_loss", "validation_loss", "validation_accuracy", "seconds"],
        &rows,
    )?;
    out.write_json("config.json", &config)?;
    let accuracy = log
        .rows
        .iter()
        .find(|r| r.iteration == log.best_iteration)
        .map_or(f64::NAN, |r| r.validation_accuracy);
    println!(
        "best validation loss {:.6} at iteration {} (accuracy {:.4}); initial {:.6}",
        log.best_validation_loss, log.best_iteration, accuracy, log.initial_validation_loss
    );
    Ok(())
}

fn run_score(a: &ScoreArgs, format: Format, out: &OutputDir) -> Result<()> {
    let g = read_network(&a.input, format)?;
    let scorer = single_scorer(&a.scorer)?;
    let scores = scorer.score(&g)?;
    let exact = a.exact.then(|| betweenness(&g.two_section()));
    let mut columns = vec!["node", "label", scorer.name()];
    if exact.is_some() && !matches!(scorer, Scorer::ExactBetweenness) {
        columns.push("betweenness");
    }
    let rows: Vec<Vec<String>> = (0..g.num_nodes())
        .map(|v| {
            let mut row = vec![v.to_string(), csv_field(&g.label(v)), num(scores[v])];
            if let (Some(b), 4) = (&exact, columns.len()) {
                row.push(num(b[v]));
            }
            row
        })
        .collect();
    let path = out.write_table("scores.csv", &columns, &rows)?;
    println!("scored {} nodes into {}", g.num_nodes(), path.display());
    Ok(())
}

#[derive(Serialize)]
struct DismantleReport<'a> {
    input: String,
    result: &'a hnd_core::DismantleResult,
    removed_labels: Vec<String>,
}

fn run_dismantle(a: &DismantleArgs, format: Format, out: &OutputDir) -> Result<()> {
    let g = read_network(&a.input, format)?;
    let scorer = single_scorer(&a.scorer)?;
    let result = dismantle_with(&g, &scorer, &a.removal.config())?;
    let name = scorer.name();
    out.write_json(
        &format!("dismantle_{name}.json"),
        &DismantleReport {
            input: a.input.display().to_string(),
            result: &result,
            removed_labels: result.removal.iter().map(|&v| g.label(v)).collect(),
        },
    )?;
    out.write_trace(&format!("curve_{name}.txt"), &dismantling_curve(&result))?;
    let rows: Vec<Vec<String>> = result
        .removal
        .iter()
        .enumerate()
        .map(|(step, &v)| {
            vec![
                (step + 1).to_string(),
                v.to_string(),
                csv_field(&g.label(v)),
                result.gcc_nodes[step].to_string(),
                num(result.ratios[step]),
            ]
        })
        .collect();
    out.write_table(
        &format!("removal_{name}.csv"),
        &["step", "node", "label", "gcc_nodes", "ratio"],
        &rows,
    )?;
    match result.anc {
        Some(v) => println!("{name}: removed {} nodes, ANC {v}", result.removal.len()),
        None => println!("{name}: nothing removed (already below threshold)"),
    }
    Ok(())
}

fn run_evaluate(a: &EvaluateArgs, format: Format, out: &OutputDir) -> Result<()> {
    let scorers = build_scorers(&a.scorer)?;
    let mut datasets = Vec::new();
    let mut manifests: Vec<DatasetManifest> = Vec::new();
    for path in &a.datasets {
        let (g, manifest) =
            ingest(path, format).with_context(|| format!("ingesting {}", path.display()))?;
        datasets.push((manifest.name.clone(), g));
        manifests.push(manifest);
    }
    let config = a.removal.config();
    let rows = evaluate_matrix(&datasets, &scorers, &config)?;
    for row in &rows {
        out.write_json(&format!("cells/{}_{}.json", row.dataset, row.scorer), row)?;
    }
    out.write_json("datasets.json", &manifests)?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                csv_field(&r.dataset),
                r.scorer.clone(),
                r.anc.map_or_else(String::new, num),
                r.removed.to_string(),
            ]
        })
        .collect();
    let path = out.write_table("anc.csv", &["dataset", "scorer", "anc", "removed"], &table)?;
    for r in &rows {
        println!(
            "{:<20} {:<12} {}",
            r.dataset,
            r.scorer,
            r.anc.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
        );
    }
    println!("table written to {}", path.display());
    Ok(())
}

fn run_bench(a: &BenchArgs, seed: u64, out: &OutputDir) -> Result<()> {
    let scales = match (&a.scales, &a.layers) {
        (None, None) => Some(vec![1000, 2000, 4000, 8000]),
        (s, _) => s.clone(),
    };
    if let Some(scales) = scales {
        let params = match &a.checkpoint {
            Some(path) => load_model(path)?,
            None => ModelParams::init(4, a.train.dim, Readout::Identity, seed),
        };
        let rows = scaling_benchmark(&scales, &params, a.timing_pq, a.timing_pq, seed, a.repeats)?;
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.method.clone(),
                    r.scale.to_string(),
                    r.hyperedges.to_string(),
                    r.incidences.to_string(),
                    num(r.seconds),
                ]
            })
            .collect();
        out.write_table(
            "timing.csv",
            &["method", "scale", "hyperedges", "incidences", "seconds"],
            &table,
        )?;
        for method in ["hnd", "betweenness"] {
            let points: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.method == method)
                .map(|r| (r.scale as f64, r.seconds))
                .collect();
            out.write_trace(&format!("timing_{method}.txt"), &points)?;
            if points.len() >= 2 {
                println!("{method}: log-log slope {:.3}", loglog_slope(&points));
            }
        }
    }
    if let Some(layers) = &a.layers {
        if layers.contains(&0) {
            return Err(UsageError("layer counts must be at least 1".into()).into());
        }
        let base = a.train.train_args().config(seed);
        let test_seed: u64 = stream_rng(seed, STREAM_TEST_SUITE).random();
        let suite = hnd_core::generate_batch(&SynthBatchSpec {
            count: a.test_networks,
            n_range: (a.test_n, a.test_n),
            p_range: base.p_range,
            q_range: base.q_range,
            seed: test_seed,
        })?;
        let rows = layer_sweep(layers, &base, &suite, &a.removal.config())?;
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.layers.to_string(),
                    num(r.mean_anc),
                    num(r.best_validation_loss),
                    r.best_iteration.to_string(),
                ]
            })
            .collect();
        out.write_table(
            "layer_sweep.csv",
            &["layers", "mean_anc", "best_validation_loss", "best_iteration"],
            &table,
        )?;
        for r in &rows {
            println!("L={} mean ANC {:.6}", r.layers, r.mean_anc);
        }
    }
    Ok(())
}
