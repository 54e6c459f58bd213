mod oracles;

use hnd_core::{
    anc, dismantle, dismantle_with, replay, AncDenominator, DismantleConfig, Hypernetwork, Scorer,
    SimpleGraph,
};
use oracles::*;
use rand::Rng;

fn g0() -> Hypernetwork {
    Hypernetwork::new(4, vec![vec![0, 1, 2], vec![2, 3]]).unwrap()
}

/// Residual hypernetwork written without the library's removal routine.
fn residual(g: &Hypernetwork, removed: &[usize]) -> Hypernetwork {
    let keep: Vec<usize> = (0..g.num_nodes()).filter(|v| !removed.contains(v)).collect();
    let edges = g
        .hyperedges()
        .iter()
        .map(|e| {
            e.iter()
                .filter_map(|v| keep.iter().position(|k| k == v))
                .collect::<Vec<_>>()
        })
        .filter(|e| !e.is_empty())
        .collect();
    Hypernetwork::new(keep.len(), edges).unwrap()
}

/// ANC of removing nodes one at a time in `order` until the giant component is empty.
fn oracle_anc(g: &Hypernetwork, order: &[usize]) -> f64 {
    let initial = closure_components(g).giant_nodes.len() as f64;
    let mut ratios = Vec::new();
    for k in 1..=order.len() {
        let giant = closure_components(&residual(g, &order[..k])).giant_nodes.len();
        ratios.push(giant as f64 / initial);
        if giant == 0 {
            break;
        }
    }
    ratios.iter().sum::<f64>() / ratios.len() as f64
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn hand_computed_example() {
    let result = dismantle(&g0(), &Scorer::ExactBetweenness, 0.25, 0.0).unwrap();
    assert_eq!(result.removal[0], 2);
    let first = dismantle(&g0(), &Scorer::Hhda, 0.25, 0.0).unwrap();
    assert_eq!(first.removal[0], 2);
    let forced = replay(&g0(), &[2, 0], &DismantleConfig::new(0.25, 0.0)).unwrap();
    assert_eq!(forced.ratios, vec![0.5, 0.25]);
    assert_eq!(anc(&forced.ratios).unwrap(), 0.375);
}

#[test]
fn scorer_anc_lies_between_brute_force_extremes() {
    let mut r = rng(41);
    let scorers = [Scorer::Hda, Scorer::Hhda, Scorer::ExactBetweenness, Scorer::ci(1), Scorer::ci(2)];
    for _ in 0..25 {
        let n = r.random_range(3..=7);
        let m = r.random_range(2..=6);
        let g = random_hypernetwork(n, m, 3, &mut r);
        let all: Vec<f64> = permutations(n).iter().map(|p| oracle_anc(&g, p)).collect();
        let best = all.iter().cloned().fold(f64::INFINITY, f64::min);
        let worst = all.iter().cloned().fold(0.0, f64::max);
        for s in &scorers {
            let result = dismantle(&g, s, 1.0 / n as f64, 0.0).unwrap();
            let value = result.anc.unwrap();
            assert!((value - oracle_anc(&g, &result.removal)).abs() < 1e-12);
            assert!(best - 1e-12 <= value && value <= worst + 1e-12, "{}: {value}", s.name());
        }
    }
}

#[test]
fn replay_reproduces_every_run() {
    let mut r = rng(42);
    for k in 0..30 {
        let g = random_hypernetwork(25, 20, 4, &mut r);
        let config = DismantleConfig {
            batch_fraction: [0.04, 0.1, 0.3][k % 3],
            stop_threshold: [0.0, 0.2][k % 2],
            denominator: if k % 5 == 0 { AncDenominator::Residual } else { AncDenominator::OriginalGcc },
        };
        for s in [Scorer::Hda, Scorer::ExactBetweenness] {
            let run = dismantle_with(&g, &s, &config).unwrap();
            let again = replay(&g, &run.removal, &config).unwrap();
            assert_eq!(run.ratios, again.ratios);
            assert_eq!(run.gcc_nodes, again.gcc_nodes);
            let last = *run.gcc_nodes.last().unwrap() as f64 / 25.0;
            assert!(last <= config.stop_threshold);
            // Stopping happens at the first removal that crosses the threshold.
            let before = run.gcc_nodes.iter().rev().nth(1).map_or(run.initial_gcc_nodes, |&c| c);
            assert!(before as f64 / 25.0 > config.stop_threshold);
        }
    }
}

#[test]
fn removal_composes() {
    let mut r = rng(43);
    for _ in 0..100 {
        let g = random_hypernetwork(15, 12, 5, &mut r);
        let a: Vec<usize> = (0..15).filter(|_| r.random_bool(0.3)).collect();
        let once = g.remove_nodes(&a).unwrap();
        assert_eq!(once.graph, residual(&g, &a));
        let survivors: Vec<usize> = (0..15).filter(|v| !a.contains(v)).collect();
        let b: Vec<usize> = survivors.iter().copied().filter(|_| r.random_bool(0.3)).collect();
        let b_new: Vec<usize> = b.iter().map(|&v| once.old_to_new[v].unwrap()).collect();
        let twice = once.graph.remove_nodes(&b_new).unwrap().graph;
        let both: Vec<usize> = a.iter().chain(&b).copied().collect();
        assert_eq!(twice, g.remove_nodes(&both).unwrap().graph);
    }
}

#[test]
fn degree_heuristics_agree_on_simple_graphs() {
    let mut r = rng(44);
    for _ in 0..20 {
        let s = random_graph(40, 0.08, &mut r);
        let g = s.to_hypernetwork();
        let degrees: Vec<f64> = (0..40).map(|v| s.degree(v) as f64).collect();
        assert_eq!(Scorer::Hda.score(&g).unwrap(), degrees);
        assert_eq!(Scorer::Hhda.score(&g).unwrap(), degrees);
        if g.num_hyperedges() > 0 {
            let run = dismantle(&g, &Scorer::Hda, 0.05, 0.0).unwrap();
            let expected = adaptive_degree_order(&s, 2);
            assert_eq!(run.removal, expected[..run.removal.len()]);
        }
    }
}

/// Adaptive highest-degree order on a simple graph, `batch` nodes per round,
/// ties to the smaller id.
fn adaptive_degree_order(s: &SimpleGraph, batch: usize) -> Vec<usize> {
    let n = s.num_nodes();
    let mut alive = vec![true; n];
    let mut order = Vec::new();
    while order.len() < n {
        let degree = |v: usize, alive: &[bool]| s.neighbors(v).iter().filter(|&&w| alive[w]).count();
        let mut candidates: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        candidates.sort_by_key(|&v| (std::cmp::Reverse(degree(v, &alive)), v));
        for &v in candidates.iter().take(batch) {
            alive[v] = false;
            order.push(v);
        }
    }
    order
}

#[test]
fn betweenness_scorer_uses_the_two_section() {
    let g = Hypernetwork::new(5, vec![vec![0, 1, 2, 3], vec![3, 4]]).unwrap();
    let scores = Scorer::ExactBetweenness.score(&g).unwrap();
    let s = SimpleGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
    assert_eq!(scores, hnd_core::betweenness(&s));
    assert_eq!(scores[3], 3.0);
}
