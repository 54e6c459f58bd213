//! Forest-fire growth of synthetic hypernetworks (HyperFF).
//!
//! Growth starts from node 0. Each arriving node `v` picks an ambassador `a`
//! uniformly among existing nodes and lights a fire there: every node popped
//! from the fire queue burns `k ~ Geometric(burn_p)` of its still-unburned
//! 2-section neighbours. The burned set plus `v` becomes a hyperedge. Each
//! burned node other than `a` then seeds, with probability `expand_q`, one
//! secondary fire over still-unburned nodes; its burned set plus `v` is an
//! additional hyperedge.
//!
//! Randomness comes from ChaCha8. A batch derives the stream of network `i`
//! by seeding with the master seed and selecting stream `i`, so results do
//! not depend on scheduling or platform.

use std::collections::VecDeque;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::Hypernetwork;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperFFParams {
    pub n_target: usize,
    pub burn_p: f64,
    pub expand_q: f64,
    pub seed: u64,
    /// Let nodes burned by secondary fires seed further secondary fires.
    #[serde(default)]
    pub expand_recursive: bool,
}

impl HyperFFParams {
    pub fn new(n_target: usize, burn_p: f64, expand_q: f64, seed: u64) -> Self {
        Self {
            n_target,
            burn_p,
            expand_q,
            seed,
            expand_recursive: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_target == 0 {
            return invalid("n_target must be at least 1");
        }
        if !(0.0..1.0).contains(&self.burn_p) {
            return invalid(format!("burn_p = {} outside [0, 1)", self.burn_p));
        }
        if !(0.0..=1.0).contains(&self.expand_q) {
            return invalid(format!("expand_q = {} outside [0, 1]", self.expand_q));
        }
        Ok(())
    }
}

/// Parameters for a batch of generated networks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthBatchSpec {
    pub count: usize,
    pub n_range: (usize, usize),
    pub p_range: (f64, f64),
    pub q_range: (f64, f64),
    pub seed: u64,
}

impl SynthBatchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return invalid("batch count must be at least 1");
        }
        let (n_lo, n_hi) = self.n_range;
        if n_lo == 0 || n_lo > n_hi {
            return invalid(format!("bad node range ({n_lo}, {n_hi})"));
        }
        let (p_lo, p_hi) = self.p_range;
        if !(0.0 <= p_lo && p_lo <= p_hi && p_hi < 1.0) {
            return invalid(format!("bad burning range ({p_lo}, {p_hi})"));
        }
        let (q_lo, q_hi) = self.q_range;
        if !(0.0 <= q_lo && q_lo <= q_hi && q_hi <= 1.0) {
            return invalid(format!("bad expanding range ({q_lo}, {q_hi})"));
        }
        Ok(())
    }

    /// Generator parameters of network `index`, drawn from its own stream.
    pub fn draw(&self, index: usize) -> HyperFFParams {
        let mut rng = stream_rng(self.seed, index as u64);
        let n_target = rng.random_range(self.n_range.0..=self.n_range.1);
        let burn_p = uniform(&mut rng, self.p_range);
        let expand_q = uniform(&mut rng, self.q_range);
        HyperFFParams::new(n_target, burn_p, expand_q, rng.random())
    }
}

/// ChaCha8 seeded with `seed`, positioned on stream `stream`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

/// Successes before the first failure, each success with probability `p`.
fn geometric(rng: &mut impl Rng, p: f64) -> usize {
    let mut k = 0;
    while rng.random::<f64>() < p {
        k += 1;
    }
    k
}

struct Growth {
    adjacency: Vec<Vec<usize>>,
    hyperedges: Vec<Vec<usize>>,
}

impl Growth {
    fn link(&mut self, u: usize, w: usize) {
        if let Err(pos) = self.adjacency[u].binary_search(&w) {
            self.adjacency[u].insert(pos, w);
        }
        if let Err(pos) = self.adjacency[w].binary_search(&u) {
            self.adjacency[w].insert(pos, u);
        }
    }

    fn add_hyperedge(&mut self, members: Vec<usize>) {
        for (i, &u) in members.iter().enumerate() {
            for &w in &members[i + 1..] {
                self.link(u, w);
            }
        }
        self.hyperedges.push(members);
    }

    /// Spreads a fire from `start` (already marked burned). Returns every node
    /// burned by this fire, `start` first.
    fn burn(&self, start: usize, burned: &mut [bool], p: f64, rng: &mut impl Rng) -> Vec<usize> {
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(w) = queue.pop_front() {
            let k = geometric(rng, p);
            if k == 0 {
                continue;
            }
            let candidates: Vec<usize> = self.adjacency[w]
                .iter()
                .copied()
                .filter(|&u| !burned[u])
                .collect();
            let take = k.min(candidates.len());
            for i in index::sample(rng, candidates.len(), take) {
                let u = candidates[i];
                burned[u] = true;
                out.push(u);
                queue.push_back(u);
            }
        }
        out
    }
}

/// Grows one hypernetwork with exactly `n_target` nodes.
pub fn generate(params: &HyperFFParams) -> Result<Hypernetwork> {
    params.validate()?;
    let n = params.n_target;
    if n == 1 {
        return Hypernetwork::new(1, vec![vec![0]]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut growth = Growth {
        adjacency: vec![Vec::new(); n],
        hyperedges: Vec::new(),
    };
    let mut burned = vec![false; n];
    for v in 1..n {
        let ambassador = rng.random_range(0..v);
        burned[ambassador] = true;
        let primary = growth.burn(ambassador, &mut burned, params.burn_p, &mut rng);
        let mut touched = primary.clone();

        let mut seeds: VecDeque<usize> = primary[1..].iter().copied().collect();
        let mut secondary = Vec::new();
        while let Some(b) = seeds.pop_front() {
            if rng.random::<f64>() >= params.expand_q {
                continue;
            }
            let fire = growth.burn(b, &mut burned, params.burn_p, &mut rng);
            if params.expand_recursive {
                seeds.extend(fire[1..].iter().copied());
            }
            touched.extend_from_slice(&fire[1..]);
            secondary.push(fire);
        }

        let mut first = primary;
        first.push(v);
        growth.add_hyperedge(first);
        for mut fire in secondary {
            fire.push(v);
            growth.add_hyperedge(fire);
        }
        for u in touched {
            burned[u] = false;
        }
    }
    Hypernetwork::new(n, growth.hyperedges)
}

/// Generates `spec.count` networks, in index order.
pub fn generate_batch(spec: &SynthBatchSpec) -> Result<Vec<Hypernetwork>> {
    spec.validate()?;
    (0..spec.count)
        .into_par_iter()
        .map(|i| generate(&spec.draw(i)))
        .collect()
}
