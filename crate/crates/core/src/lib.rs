//! Betweenness-guided dismantling of hypernetworks.
//!
//! A hypergraph attention network is trained on small forest-fire
//! hypernetworks to rank nodes by their 2-section betweenness. The ranking
//! then drives greedy adaptive node removal, compared against degree,
//! hyperdegree, collective-influence and exact-betweenness baselines by
//! accumulated normalized connectivity (ANC).

pub mod centrality;
pub mod dataset;
pub mod dismantle;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod hypergraph;
pub mod io;
pub mod model;
pub mod training;
pub mod unionfind;

pub use centrality::{betweenness, collective_influence, Neighborhood};
pub use dataset::{ingest, ingest_bytes, DatasetManifest};
pub use dismantle::{
    anc, dismantle, dismantle_with, dismantling_curve, replay, AncDenominator, DismantleConfig,
    DismantleResult, Scorer,
};
pub use error::{Error, Result};
pub use generator::{generate, generate_batch, HyperFFParams, SynthBatchSpec};
pub use hypergraph::{ComponentLabel, Hypernetwork, NodeRemoval, SimpleGraph};
pub use io::Format;
pub use model::{forward, predict, ForwardTrace, ModelParams, Readout};
pub use training::{
    build_samples, pairwise_accuracy, train, RankingSample, RankingSampleSet, TrainConfig,
    TrainingLog,
};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// First 16 hex digits of the SHA-256 of `value` serialized as JSON.
pub fn config_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("configuration serializes");
    let digest = Sha256::digest(&json);
    hex::encode(&digest[..8])
}
