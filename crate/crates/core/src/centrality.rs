//! Exact shortest-path betweenness and collective influence on simple graphs.

use std::collections::VecDeque;

use crate::hypergraph::SimpleGraph;

/// Unnormalized betweenness of every node.
///
/// Each unordered pair `{s, t}` contributes once; endpoints are excluded and
/// disconnected pairs contribute nothing. Brandes' accumulation over BFS trees.
pub fn betweenness(g: &SimpleGraph) -> Vec<f64> {
    let n = g.num_nodes();
    let mut centrality = vec![0.0; n];
    let mut order = Vec::with_capacity(n);
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0f64; n];
    let mut queue = VecDeque::with_capacity(n);

    for s in 0..n {
        order.clear();
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        // Predecessors are the neighbours one level closer to s.
        for &w in order.iter().rev() {
            let coeff = (1.0 + delta[w]) / sigma[w];
            for &v in g.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] * coeff;
                }
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    // Every unordered pair was seen from both ends.
    for c in &mut centrality {
        *c /= 2.0;
    }
    centrality
}

/// Which nodes count as the `k`-hop neighbourhood in [`collective_influence`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Neighborhood {
    /// Nodes at distance exactly `k`.
    #[default]
    Frontier,
    /// Nodes at distance `1..=k`.
    Ball,
}

/// `CI(v) = (deg(v) - 1) * sum over the k-hop neighbourhood of (deg(u) - 1)`.
pub fn collective_influence(g: &SimpleGraph, k: usize, hood: Neighborhood) -> Vec<f64> {
    assert!(k >= 1, "collective influence needs k >= 1");
    let n = g.num_nodes();
    let mut dist = vec![usize::MAX; n];
    let mut seen = Vec::new();
    let mut queue = VecDeque::new();
    (0..n)
        .map(|v| {
            let dv = g.degree(v);
            if dv <= 1 {
                return 0.0;
            }
            for &u in &seen {
                dist[u] = usize::MAX;
            }
            seen.clear();
            dist[v] = 0;
            seen.push(v);
            queue.push_back(v);
            let mut total = 0usize;
            while let Some(u) = queue.pop_front() {
                let du = dist[u];
                let counts = match hood {
                    Neighborhood::Frontier => du == k,
                    Neighborhood::Ball => du >= 1,
                };
                if counts {
                    total += g.degree(u).saturating_sub(1);
                }
                if du == k {
                    continue;
                }
                for &w in g.neighbors(u) {
                    if dist[w] == usize::MAX {
                        dist[w] = du + 1;
                        seen.push(w);
                        queue.push_back(w);
                    }
                }
            }
            ((dv - 1) * total) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SimpleGraph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        SimpleGraph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> SimpleGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        SimpleGraph::from_edges(n, &edges).unwrap()
    }

    fn star(leaves: usize) -> SimpleGraph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        SimpleGraph::from_edges(leaves + 1, &edges).unwrap()
    }

    #[test]
    fn path_of_three() {
        assert_eq!(betweenness(&path(3)), vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn star_center_carries_leaf_pairs() {
        assert_eq!(betweenness(&star(3)), vec![3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn even_cycle_splits_paths() {
        // C4: each opposite pair has two shortest paths, one through each other node.
        assert_eq!(betweenness(&cycle(4)), vec![0.5; 4]);
    }

    #[test]
    fn disconnected_pairs_contribute_nothing() {
        let g = SimpleGraph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
        assert_eq!(betweenness(&g), vec![0.0, 1.0, 0.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn ci_examples() {
        assert_eq!(collective_influence(&cycle(5), 2, Neighborhood::Frontier), vec![2.0; 5]);
        let p = collective_influence(&path(4), 2, Neighborhood::Frontier);
        assert_eq!(p[1], 0.0);
        assert_eq!(p[0], 0.0);
        // Leaves of a star always score zero.
        let s = collective_influence(&star(4), 2, Neighborhood::Frontier);
        assert!(s[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn ci_star_center_with_unit_radius() {
        for leaves in 3..=6 {
            let ci = collective_influence(&star(leaves), 1, Neighborhood::Frontier);
            assert_eq!(ci[0], 0.0);
        }
    }

    #[test]
    fn ci_ball_includes_inner_shells() {
        // Path 0-1-2-3-4, node 1 within distance 2: {0, 2, 3} -> (0 + 1 + 1).
        let ci = collective_influence(&path(5), 2, Neighborhood::Ball);
        assert_eq!(ci[1], 2.0);
        let ci = collective_influence(&path(5), 2, Neighborhood::Frontier);
        assert_eq!(ci[1], 1.0);
    }
}
