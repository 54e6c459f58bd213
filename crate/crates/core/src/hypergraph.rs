//! Hypernetworks, their 2-section graphs, and giant-component connectivity.
//!
//! A [`Hypernetwork`] stores its hyperedges as sorted member lists over dense
//! node ids `0..N`. The incidence matrix is never materialized; the per-node
//! membership lists derived at construction play its role.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::unionfind::UnionFind;

/// An undirected hypernetwork over dense node ids `0..num_nodes`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypernetwork {
    num_nodes: usize,
    hyperedges: Vec<Vec<usize>>,
    memberships: Vec<Vec<usize>>,
    node_labels: Option<Vec<String>>,
}

impl Hypernetwork {
    /// Builds a hypernetwork, sorting each hyperedge.
    ///
    /// Fails if a hyperedge is empty, repeats a node, or names an id `>= num_nodes`.
    pub fn new(num_nodes: usize, hyperedges: Vec<Vec<usize>>) -> Result<Self> {
        let mut hyperedges = hyperedges;
        for (e, members) in hyperedges.iter_mut().enumerate() {
            if members.is_empty() {
                return invalid(format!("hyperedge {e} is empty"));
            }
            members.sort_unstable();
            if let Some(&v) = members.last() {
                if v >= num_nodes {
                    return invalid(format!("hyperedge {e} names node {v} but N = {num_nodes}"));
                }
            }
            if members.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("hyperedge {e} repeats a node"));
            }
        }
        let mut memberships = vec![Vec::new(); num_nodes];
        for (e, members) in hyperedges.iter().enumerate() {
            for &v in members {
                memberships[v].push(e);
            }
        }
        Ok(Self {
            num_nodes,
            hyperedges,
            memberships,
            node_labels: None,
        })
    }

    /// Attaches external names, one per node id.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.num_nodes {
            return invalid(format!(
                "{} labels supplied for {} nodes",
                labels.len(),
                self.num_nodes
            ));
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_hyperedges(&self) -> usize {
        self.hyperedges.len()
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, e: usize) -> &[usize] {
        &self.hyperedges[e]
    }

    /// Hyperedges containing `v`, in increasing order.
    pub fn memberships(&self, v: usize) -> &[usize] {
        &self.memberships[v]
    }

    pub fn node_labels(&self) -> Option<&[String]> {
        self.node_labels.as_deref()
    }

    /// External name of `v`, falling back to the numeric id.
    pub fn label(&self, v: usize) -> String {
        match &self.node_labels {
            Some(labels) => labels[v].clone(),
            None => v.to_string(),
        }
    }

    /// Total number of (node, hyperedge) incidences.
    pub fn num_incidences(&self) -> usize {
        self.hyperedges.iter().map(Vec::len).sum()
    }

    fn check_node(&self, v: usize) -> Result<()> {
        if v >= self.num_nodes {
            return invalid(format!("node {v} out of range (N = {})", self.num_nodes));
        }
        Ok(())
    }

    /// Number of hyperedges containing `v`.
    pub fn hyperdegree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.memberships[v].len())
    }

    /// Number of distinct nodes sharing at least one hyperedge with `v`.
    pub fn degree(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        let mut neighbors: Vec<usize> = self.memberships[v]
            .iter()
            .flat_map(|&e| self.hyperedges[e].iter().copied())
            .filter(|&u| u != v)
            .collect();
        neighbors.sort_unstable();
        neighbors.dedup();
        Ok(neighbors.len())
    }

    /// Row sum of `H Hᵀ` minus the hyperdegree: co-memberships counted with multiplicity.
    pub fn degree_multiplicity(&self, v: usize) -> Result<usize> {
        self.check_node(v)?;
        Ok(self.memberships[v]
            .iter()
            .map(|&e| self.hyperedges[e].len() - 1)
            .sum())
    }

    /// Clique expansion: `u` and `w` are adjacent iff some hyperedge holds both.
    pub fn two_section(&self) -> SimpleGraph {
        let mut adjacency = vec![Vec::new(); self.num_nodes];
        for members in &self.hyperedges {
            for (i, &u) in members.iter().enumerate() {
                for &w in &members[i + 1..] {
                    adjacency[u].push(w);
                    adjacency[w].push(u);
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        SimpleGraph {
            num_nodes: self.num_nodes,
            adjacency,
        }
    }

    /// Connected components through node-sharing hyperedges.
    pub fn components(&self) -> ComponentLabel {
        let m = self.hyperedges.len();
        let mut uf = UnionFind::new(m);
        for edges in &self.memberships {
            if let Some((&first, rest)) = edges.split_first() {
                for &e in rest {
                    uf.union(first, e);
                }
            }
        }

        // Ids follow the smallest hyperedge index of each component.
        let mut root_to_id = vec![usize::MAX; m];
        let mut edge_component = vec![0; m];
        let mut edge_counts = Vec::new();
        for e in 0..m {
            let root = uf.find(e);
            if root_to_id[root] == usize::MAX {
                root_to_id[root] = edge_counts.len();
                edge_counts.push(0);
            }
            edge_component[e] = root_to_id[root];
            edge_counts[root_to_id[root]] += 1;
        }
        let mut node_counts = vec![0; edge_counts.len()];
        let mut node_component = vec![0; self.num_nodes];
        let mut next = edge_counts.len();
        for v in 0..self.num_nodes {
            match self.memberships[v].first() {
                Some(&e) => {
                    node_component[v] = edge_component[e];
                    node_counts[edge_component[e]] += 1;
                }
                None => {
                    node_component[v] = next;
                    next += 1;
                }
            }
        }
        let isolated = next - edge_counts.len();
        edge_counts.extend(std::iter::repeat_n(0, isolated));
        node_counts.extend(std::iter::repeat_n(1, isolated));

        let with_edges = next - isolated;
        let mut giant = None;
        for c in 0..with_edges {
            let better = match giant {
                None => true,
                Some(g) => {
                    (edge_counts[c], node_counts[c]) > (edge_counts[g], node_counts[g])
                }
            };
            if better {
                giant = Some(c);
            }
        }
        ComponentLabel {
            edge_component,
            node_component,
            edge_counts,
            node_counts,
            giant,
        }
    }

    /// Fraction of nodes inside the giant component.
    pub fn connectivity(&self) -> Result<f64> {
        if self.num_nodes == 0 {
            return invalid("connectivity of an empty hypernetwork");
        }
        Ok(self.components().giant_node_count() as f64 / self.num_nodes as f64)
    }

    /// Deletes `removed` from every hyperedge, drops emptied hyperedges, and
    /// relabels the surviving nodes densely in increasing id order.
    pub fn remove_nodes(&self, removed: &[usize]) -> Result<NodeRemoval> {
        let mut gone = vec![false; self.num_nodes];
        for &v in removed {
            self.check_node(v)?;
            gone[v] = true;
        }
        let mut old_to_new = vec![None; self.num_nodes];
        let mut next = 0;
        for v in 0..self.num_nodes {
            if !gone[v] {
                old_to_new[v] = Some(next);
                next += 1;
            }
        }
        let hyperedges: Vec<Vec<usize>> = self
            .hyperedges
            .iter()
            .map(|members| members.iter().filter_map(|&v| old_to_new[v]).collect::<Vec<_>>())
            .filter(|members| !members.is_empty())
            .collect();
        let mut graph = Hypernetwork::new(next, hyperedges)?;
        if let Some(labels) = &self.node_labels {
            let kept = (0..self.num_nodes)
                .filter(|&v| !gone[v])
                .map(|v| labels[v].clone())
                .collect();
            graph = graph.with_labels(kept)?;
        }
        Ok(NodeRemoval { graph, old_to_new })
    }

    /// Same nodes, keeping the first copy of each hyperedge with at least two
    /// members. The 2-section graph, and so every path, is unchanged.
    pub fn without_redundant_hyperedges(&self) -> Hypernetwork {
        let mut seen = std::collections::HashSet::new();
        let kept: Vec<Vec<usize>> = self
            .hyperedges
            .iter()
            .filter(|e| e.len() >= 2 && seen.insert(e.as_slice()))
            .cloned()
            .collect();
        let mut out = Hypernetwork::new(self.num_nodes, kept).expect("subset of valid hyperedges");
        out.node_labels = self.node_labels.clone();
        out
    }

    /// The sub-hypernetwork spanned by the giant component, relabeled densely.
    pub fn giant_component(&self) -> NodeRemoval {
        let labels = self.components();
        let outside: Vec<usize> = (0..self.num_nodes)
            .filter(|&v| Some(labels.node_component[v]) != labels.giant)
            .collect();
        self.remove_nodes(&outside)
            .expect("ids produced from 0..N are in range")
    }
}

/// Result of [`Hypernetwork::remove_nodes`].
#[derive(Debug, Clone)]
pub struct NodeRemoval {
    pub graph: Hypernetwork,
    /// `old_to_new[v]` is the id of `v` in `graph`, or `None` if removed.
    pub old_to_new: Vec<Option<usize>>,
}

/// Component labelling of a hypernetwork.
///
/// Components holding hyperedges are numbered by their smallest hyperedge
/// index; nodes in no hyperedge follow as singleton components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabel {
    pub edge_component: Vec<usize>,
    pub node_component: Vec<usize>,
    pub edge_counts: Vec<usize>,
    pub node_counts: Vec<usize>,
    /// Component with the most hyperedges; ties go to more nodes, then the
    /// smaller hyperedge index. `None` when there are no hyperedges.
    pub giant: Option<usize>,
}

impl ComponentLabel {
    pub fn num_components(&self) -> usize {
        self.edge_counts.len()
    }

    pub fn giant_node_count(&self) -> usize {
        self.giant.map_or(0, |g| self.node_counts[g])
    }

    pub fn giant_edge_count(&self) -> usize {
        self.giant.map_or(0, |g| self.edge_counts[g])
    }
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleGraph {
    num_nodes: usize,
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Builds a graph from an edge list, merging parallel edges.
    pub fn from_edges(num_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_nodes];
        for &(u, w) in edges {
            if u >= num_nodes || w >= num_nodes {
                return invalid(format!("edge ({u}, {w}) out of range (N = {num_nodes})"));
            }
            if u == w {
                return invalid(format!("self-loop at {u}"));
            }
            adjacency[u].push(w);
            adjacency[w].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self {
            num_nodes,
            adjacency,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_edges(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Each undirected edge once, as `(u, w)` with `u < w`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&w| u < w).map(move |&w| (u, w)))
    }

    /// The same graph viewed as a hypernetwork of 2-node hyperedges.
    pub fn to_hypernetwork(&self) -> Hypernetwork {
        Hypernetwork::new(self.num_nodes, self.edges().map(|(u, w)| vec![u, w]).collect())
            .expect("simple graph edges are valid hyperedges")
    }
}
