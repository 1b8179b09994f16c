//! Dynamic simple-graph representation plus the exact reference solvers and
//! structural verifiers used by every gadget family.

mod density;
mod expansion;
mod matching;
mod mincut;
mod powerlaw;
mod traversal;

pub use density::{densest_subgraph, density_at_least, DensityValue};
pub use expansion::{edge_expansion_exact, expansion_lower_bound_spectral, ExpansionCertificate, EXHAUSTIVE_CAP};
pub use matching::{augmenting_path_exists, max_matching, max_matching_size, Matching};
pub use mincut::global_min_cut;
pub use powerlaw::{check_power_law, target_count, zeta, PowerLawParams, PowerLawReport, PowerLawVariant};
pub use traversal::{bfs_distance, is_bipartite, is_connected};

use crate::error::{Error, Result};
use std::collections::BTreeSet;
use std::fmt::Write as _;

pub type NodeId = u32;

/// A single edge insertion or deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum UpdateOp {
    Insert(NodeId, NodeId),
    Delete(NodeId, NodeId),
}

impl UpdateOp {
    pub fn endpoints(&self) -> (NodeId, NodeId) {
        match *self {
            UpdateOp::Insert(a, b) | UpdateOp::Delete(a, b) => (a, b),
        }
    }

    pub fn inverse(&self) -> UpdateOp {
        match *self {
            UpdateOp::Insert(a, b) => UpdateOp::Delete(a, b),
            UpdateOp::Delete(a, b) => UpdateOp::Insert(a, b),
        }
    }
}

/// Simple undirected graph on a fixed node set with an update log.
///
/// Invariants: no self-loops, no parallel edges, adjacency symmetric, and `m`
/// equals half the degree sum. Reductions must never trigger a duplicate
/// insert or a missing delete, so both are hard errors.
#[derive(Debug, Clone)]
pub struct DynamicGraph {
    adj: Vec<BTreeSet<NodeId>>,
    m: usize,
    log: Vec<UpdateOp>,
}

impl DynamicGraph {
    pub fn new(node_count: usize) -> Self {
        DynamicGraph { adj: vec![BTreeSet::new(); node_count], m: 0, log: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn update_log(&self) -> &[UpdateOp] {
        self.log.len();
        &self.log
    }

    pub fn clear_log(&mut self) {
        self.log.clear();
    }

    fn check_node(&self, v: NodeId) -> Result<()> {
        if (v as usize) < self.adj.len() {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange(v, self.adj.len() as u32))
        }
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        (a as usize) < self.adj.len() && self.adj[a as usize].contains(&b)
    }

    pub fn insert_edge(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        if self.adj[a as usize].contains(&b) {
            return Err(Error::DuplicateEdge(a, b));
        }
        self.adj[a as usize].insert(b);
        self.adj[b as usize].insert(a);
        self.m += 1;
        self.log.push(UpdateOp::Insert(a, b));
        Ok(())
    }

    pub fn delete_edge(&mut self, a: NodeId, b: NodeId) -> Result<()> {
        self.check_node(a)?;
        self.check_node(b)?;
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        if !self.adj[a as usize].contains(&b) {
            return Err(Error::MissingEdge(a, b));
        }
        self.adj[a as usize].remove(&b);
        self.adj[b as usize].remove(&a);
        self.m -= 1;
        self.log.push(UpdateOp::Delete(a, b));
        Ok(())
    }

    pub fn apply(&mut self, op: UpdateOp) -> Result<()> {
        match op {
            UpdateOp::Insert(a, b) => self.insert_edge(a, b),
            UpdateOp::Delete(a, b) => self.delete_edge(a, b),
        }
    }

    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adj[v as usize].iter().copied()
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    /// Edges as (a, b) with a < b, in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(a, nbrs)| {
            nbrs.iter()
                .copied()
                .filter(move |&b| (a as NodeId) < b)
                .map(move |b| (a as NodeId, b))
        })
    }

    /// (max degree, histogram indexed by degree).
    pub fn degree_stats(&self) -> (usize, Vec<usize>) {
        let max = self.adj.iter().map(|s| s.len()).max().unwrap_or(0);
        let mut hist = vec![0usize; max + 1];
        for s in &self.adj {
            hist[s.len()] += 1;
        }
        (max, hist)
    }

    /// Degree histogram as (degree, count) pairs for degrees that occur.
    pub fn degree_histogram(&self) -> std::collections::BTreeMap<u32, usize> {
        let mut out = std::collections::BTreeMap::new();
        for s in &self.adj {
            *out.entry(s.len() as u32).or_insert(0) += 1;
        }
        out
    }

    /// Connected component ids, numbered in order of smallest member.
    pub fn components(&self) -> (usize, Vec<u32>) {
        let n = self.node_count();
        let mut comp = vec![u32::MAX; n];
        let mut count = 0;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..n {
            if comp[start] != u32::MAX {
                continue;
            }
            comp[start] = count;
            queue.push_back(start as NodeId);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if comp[w as usize] == u32::MAX {
                        comp[w as usize] = count;
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        (count as usize, comp)
    }

    /// Rebuilds a graph by replaying an update log on `node_count` fresh nodes.
    pub fn replay(node_count: usize, log: &[UpdateOp]) -> Result<Self> {
        let mut g = DynamicGraph::new(node_count);
        for &op in log {
            g.apply(op)?;
        }
        Ok(g)
    }

    pub fn same_adjacency(&self, other: &DynamicGraph) -> bool {
        self.adj == other.adj
    }

    /// Edge-list text format: header `N m`, then one `a b` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.node_count(), self.m);
        for (a, b) in self.edges() {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty edge list".into()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad node count".into()))?;
        let m: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad edge count".into()))?;
        let mut g = DynamicGraph::new(n);
        for line in lines {
            let mut parts = line.split_whitespace();
            let a: NodeId = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line `{line}`")))?;
            let b: NodeId = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line `{line}`")))?;
            g.insert_edge(a, b)?;
        }
        if g.edge_count() != m {
            return Err(Error::Parse(format!(
                "edge list header declares {m} edges, found {}",
                g.edge_count()
            )));
        }
        g.clear_log();
        Ok(g)
    }

    /// DOT export. `labels[v]`, when provided, becomes the node label.
    pub fn to_dot(&self, name: &str, labels: Option<&[String]>, highlight: Option<&Matching>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {name} {{");
        for v in 0..self.node_count() as NodeId {
            match labels {
                Some(ls) => {
                    let _ = writeln!(out, "  n{v} [label=\"{}\"];", ls[v as usize]);
                }
                None => {
                    let _ = writeln!(out, "  n{v};");
                }
            }
        }
        for (a, b) in self.edges() {
            let matched = highlight.map(|m| m.partner(a) == Some(b)).unwrap_or(false);
            if matched {
                let _ = writeln!(out, "  n{a} -- n{b} [color=red, penwidth=2];");
            } else {
                let _ = writeln!(out, "  n{a} -- n{b};");
            }
        }
        let _ = writeln!(out, "}}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_then_delete_restores_graph() {
        let mut g = DynamicGraph::new(4);
        g.insert_edge(1, 2).unwrap();
        g.delete_edge(1, 2).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.update_log().len(), 2);
        assert!(g.same_adjacency(&DynamicGraph::new(4)));
    }

    #[test]
    fn self_loop_rejected() {
        let mut g = DynamicGraph::new(3);
        assert!(matches!(g.insert_edge(1, 1), Err(Error::SelfLoop(1))));
    }

    #[test]
    fn duplicate_insert_rejected() {
        let mut g = DynamicGraph::new(3);
        g.insert_edge(1, 2).unwrap();
        assert!(matches!(g.insert_edge(2, 1), Err(Error::DuplicateEdge(2, 1))));
    }

    #[test]
    fn missing_delete_rejected() {
        let mut g = DynamicGraph::new(3);
        assert!(matches!(g.delete_edge(0, 1), Err(Error::MissingEdge(0, 1))));
    }

    #[test]
    fn replay_reproduces_adjacency() {
        let mut g = DynamicGraph::new(6);
        g.insert_edge(0, 1).unwrap();
        g.insert_edge(1, 2).unwrap();
        g.insert_edge(2, 3).unwrap();
        g.delete_edge(1, 2).unwrap();
        g.insert_edge(4, 5).unwrap();
        let replayed = DynamicGraph::replay(6, g.update_log()).unwrap();
        assert!(g.same_adjacency(&replayed));
        assert_eq!(g.edge_count(), replayed.edge_count());
    }

    #[test]
    fn degree_stats_basics() {
        let g = DynamicGraph::new(5);
        let (max, hist) = g.degree_stats();
        assert_eq!(max, 0);
        assert_eq!(hist, vec![5]);

        let mut star = DynamicGraph::new(5);
        for leaf in 1..5 {
            star.insert_edge(0, leaf).unwrap();
        }
        let (max, _) = star.degree_stats();
        assert_eq!(max, 4);
    }

    #[test]
    fn edge_list_roundtrip() {
        let mut g = DynamicGraph::new(5);
        g.insert_edge(0, 3).unwrap();
        g.insert_edge(1, 2).unwrap();
        g.insert_edge(3, 4).unwrap();
        let text = g.to_edge_list();
        let back = DynamicGraph::from_edge_list(&text).unwrap();
        assert!(g.same_adjacency(&back));
    }
}
