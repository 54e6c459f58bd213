//! Independent reference implementations used by the integration tests and
//! the acceptance target. Nothing here calls the algorithm under test.
#![allow(dead_code)]

use hnd_core::model::{ModelParams, Readout, Scaling};
use hnd_core::{Hypernetwork, RankingSample, RankingSampleSet, SimpleGraph};
use ndarray::{concatenate, Array2, Axis};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Erdos-Renyi graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> SimpleGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, w));
            }
        }
    }
    SimpleGraph::from_edges(n, &edges).unwrap()
}

pub fn path_graph(n: usize) -> SimpleGraph {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    SimpleGraph::from_edges(n, &edges).unwrap()
}

pub fn star_graph(n: usize) -> SimpleGraph {
    let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
    SimpleGraph::from_edges(n, &edges).unwrap()
}

pub fn cycle_graph(n: usize) -> SimpleGraph {
    let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
    SimpleGraph::from_edges(n, &edges).unwrap()
}

/// Random hypernetwork: `m` hyperedges of 1..=`max_size` distinct members.
pub fn random_hypernetwork(n: usize, m: usize, max_size: usize, rng: &mut ChaCha8Rng) -> Hypernetwork {
    let nodes: Vec<usize> = (0..n).collect();
    let edges = (0..m)
        .map(|_| {
            let size = rng.random_range(1..=max_size.min(n));
            nodes.choose_multiple(rng, size).copied().collect()
        })
        .collect();
    Hypernetwork::new(n, edges).unwrap()
}

fn bfs_distances(g: &SimpleGraph, s: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_nodes()];
    dist[s] = Some(0);
    let mut frontier = vec![s];
    let mut d = 0;
    while !frontier.is_empty() {
        d += 1;
        let mut next = Vec::new();
        for v in frontier {
            for &w in g.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d);
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    dist
}

/// Betweenness by listing every shortest path of every unordered pair.
pub fn betweenness_by_enumeration(g: &SimpleGraph) -> Vec<f64> {
    let n = g.num_nodes();
    let dist: Vec<Vec<Option<usize>>> = (0..n).map(|s| bfs_distances(g, s)).collect();
    let mut out = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let Some(target) = dist[s][t] else { continue };
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![vec![s]];
            while let Some(path) = stack.pop() {
                let last = *path.last().unwrap();
                if last == t {
                    paths.push(path);
                    continue;
                }
                for &w in g.neighbors(last) {
                    // Step forward along the shortest-path DAG towards t.
                    if dist[s][w] == Some(path.len()) && dist[w][t] == Some(target - path.len()) {
                        let mut longer = path.clone();
                        longer.push(w);
                        stack.push(longer);
                    }
                }
            }
            let share = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    out[v] += share;
                }
            }
        }
    }
    out
}

/// Component structure derived from the transitive closure of hyperedge overlap.
#[derive(Debug, PartialEq)]
pub struct ClosureComponents {
    /// Smallest node id of each node's component (itself when isolated).
    pub node_rep: Vec<usize>,
    /// Nodes of the giant component, sorted; empty when there are no hyperedges.
    pub giant_nodes: Vec<usize>,
    pub giant_edges: usize,
}

pub fn closure_components(g: &Hypernetwork) -> ClosureComponents {
    let m = g.num_hyperedges();
    let n = g.num_nodes();
    let mut reach = vec![vec![false; m]; m];
    for a in 0..m {
        for b in 0..m {
            reach[a][b] = a == b || g.hyperedge(a).iter().any(|v| g.hyperedge(b).contains(v));
        }
    }
    for k in 0..m {
        for a in 0..m {
            if reach[a][k] {
                for b in 0..m {
                    if reach[k][b] {
                        reach[a][b] = true;
                    }
                }
            }
        }
    }
    let edge_nodes = |a: usize| -> Vec<usize> {
        let mut nodes: Vec<usize> = (0..m)
            .filter(|&b| reach[a][b])
            .flat_map(|b| g.hyperedge(b).iter().copied())
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    };
    let node_rep = (0..n)
        .map(|v| match (0..m).find(|&e| g.hyperedge(e).contains(&v)) {
            Some(e) => edge_nodes(e)[0],
            None => v,
        })
        .collect();
    // Candidates in increasing smallest-hyperedge order; strict improvement only.
    let mut giant: Option<(usize, Vec<usize>, usize)> = None;
    for a in 0..m {
        if (0..a).any(|b| reach[a][b]) {
            continue;
        }
        let edges = (0..m).filter(|&b| reach[a][b]).count();
        let nodes = edge_nodes(a);
        let better = match &giant {
            None => true,
            Some((ge, gn, _)) => (edges, nodes.len()) > (*ge, gn.len()),
        };
        if better {
            giant = Some((edges, nodes, a));
        }
    }
    let (giant_edges, giant_nodes) = giant.map_or((0, Vec::new()), |(e, n, _)| (e, n));
    ClosureComponents {
        node_rep,
        giant_nodes,
        giant_edges,
    }
}

/// Dense 0/1 incidence matrix, nodes by hyperedges.
pub fn incidence(g: &Hypernetwork) -> Array2<f64> {
    let mut h = Array2::zeros((g.num_nodes(), g.num_hyperedges()));
    for (e, members) in g.hyperedges().iter().enumerate() {
        for &v in members {
            h[[v, e]] = 1.0;
        }
    }
    h
}

fn rectify_and_scale(z: Array2<f64>, scaling: Scaling) -> Array2<f64> {
    let r = z.mapv(|x| if x > 0.0 { x } else { 0.0 });
    match scaling {
        Scaling::None => r,
        Scaling::Rms => {
            let ms = r.iter().map(|x| x * x).sum::<f64>() / r.len() as f64;
            &r / (ms + 1e-12).sqrt()
        }
    }
}

/// Straight-line dense forward pass written from the layer equations.
pub fn dense_forward(g: &Hypernetwork, p: &ModelParams) -> Vec<f64> {
    let h = incidence(g);
    let (n, m) = h.dim();
    let mut x = Array2::<f64>::ones((n, 1));
    for lp in &p.layers {
        let logits = x.dot(&lp.attention);
        let mut a = Array2::<f64>::zeros((m, n));
        for e in 0..m {
            let members: Vec<usize> = (0..n).filter(|&v| h[[v, e]] == 1.0).collect();
            let top = members.iter().map(|&v| logits[[v, 0]]).fold(f64::MIN, f64::max);
            let total: f64 = members.iter().map(|&v| (logits[[v, 0]] - top).exp()).sum();
            for &v in &members {
                a[[e, v]] = (logits[[v, 0]] - top).exp() / total;
            }
        }
        let y = a.dot(&x);
        let hth = h.t().dot(&h);
        let edge_in = concatenate![Axis(1), y.dot(&lp.edge_self), hth.dot(&y).dot(&lp.edge_overlap)];
        let y_next = rectify_and_scale(edge_in.dot(&lp.edge_mix), p.scaling);
        let node_in = concatenate![Axis(1), x.dot(&lp.node_self), h.dot(&y_next).dot(&lp.node_edges)];
        x = rectify_and_scale(node_in.dot(&lp.node_mix), p.scaling);
    }
    let out = x.dot(&p.readout);
    out.iter()
        .map(|&o| {
            let o = o + p.bias;
            match p.activation {
                Readout::Identity => o,
                Readout::Rectifier => o.max(0.0),
            }
        })
        .collect()
}

/// Mean pairwise logistic loss over `samples`, written directly.
pub fn reference_loss(scores: &[f64], samples: &RankingSampleSet) -> f64 {
    let total: f64 = samples
        .pairs
        .iter()
        .map(|s| {
            let d = scores[s.i] - scores[s.j];
            let prob = 1.0 / (1.0 + (-d).exp());
            if s.label {
                -prob.ln()
            } else {
                -(1.0 - prob).ln()
            }
        })
        .sum();
    total / samples.len() as f64
}

/// Random distinct pairs with random labels.
pub fn random_samples(n: usize, count: usize, rng: &mut ChaCha8Rng) -> RankingSampleSet {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs.shuffle(rng);
    RankingSampleSet {
        pairs: pairs
            .into_iter()
            .take(count)
            .map(|(i, j)| RankingSample {
                i,
                j,
                label: rng.random(),
            })
            .collect(),
    }
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(x: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..x.len()).collect();
        idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
        let mut r = vec![0.0; x.len()];
        let mut k = 0;
        while k < idx.len() {
            let mut end = k;
            while end + 1 < idx.len() && x[idx[end + 1]] == x[idx[k]] {
                end += 1;
            }
            let avg = (k + end) as f64 / 2.0;
            for &i in &idx[k..=end] {
                r[i] = avg;
            }
            k = end + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

/// Every sequence of `m` distinct nonempty subsets of `0..n`, taken in
/// lexicographic order of subset bitmasks, for `m` in `1..=max_m`.
pub fn for_each_hypernetwork(n: usize, max_m: usize, mut f: impl FnMut(&Hypernetwork)) {
    let subsets: Vec<Vec<usize>> = (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&v| mask & (1 << v) != 0).collect())
        .collect();
    fn recurse(
        n: usize,
        subsets: &[Vec<usize>],
        start: usize,
        left: usize,
        chosen: &mut Vec<Vec<usize>>,
        f: &mut dyn FnMut(&Hypernetwork),
    ) {
        if !chosen.is_empty() {
            f(&Hypernetwork::new(n, chosen.clone()).unwrap());
        }
        if left == 0 {
            return;
        }
        for k in start..subsets.len() {
            chosen.push(subsets[k].clone());
            recurse(n, subsets, k + 1, left - 1, chosen, f);
            chosen.pop();
        }
    }
    recurse(n, &subsets, 0, max_m, &mut Vec::new(), &mut f);
}
