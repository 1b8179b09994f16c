//! Exact densest subgraph via the parametric max-flow construction.
//!
//! Every candidate density is a rational p/q with q bounded by the node
//! count, so the binary search walks exact rationals and never touches
//! floating point. Capacities are scaled by the candidate's denominator to
//! stay integral.

use super::{DynamicGraph, NodeId};
use crate::Rational;
use num_traits::{Signed, Zero};
use std::collections::VecDeque;

pub type DensityValue = Rational;

struct FlowEdge {
    to: usize,
    cap: i64,
}

struct Dinic {
    edges: Vec<FlowEdge>,
    head: Vec<Vec<usize>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic { edges: Vec::new(), head: vec![Vec::new(); n], level: vec![0; n], iter: vec![0; n] }
    }

    fn add_edge(&mut self, from: usize, to: usize, cap: i64, rev_cap: i64) {
        let e = self.edges.len();
        self.edges.push(FlowEdge { to, cap });
        self.edges.push(FlowEdge { to: from, cap: rev_cap });
        self.head[from].push(e);
        self.head[to].push(e + 1);
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        let mut queue = VecDeque::new();
        self.level[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &e in &self.head[v] {
                let edge = &self.edges[e];
                if edge.cap > 0 && self.level[edge.to] < 0 {
                    self.level[edge.to] = self.level[v] + 1;
                    queue.push_back(edge.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, v: usize, t: usize, f: i64) -> i64 {
        if v == t {
            return f;
        }
        while self.iter[v] < self.head[v].len() {
            let e = self.head[v][self.iter[v]];
            let (to, cap) = (self.edges[e].to, self.edges[e].cap);
            if cap > 0 && self.level[to] == self.level[v] + 1 {
                let d = self.dfs(to, t, f.min(cap));
                if d > 0 {
                    self.edges[e].cap -= d;
                    self.edges[e ^ 1].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: i64) -> i64 {
        let mut flow = 0;
        while flow < limit && self.bfs(s, t) {
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Source side of a min cut after max_flow: nodes reachable in the residual.
    fn min_cut_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        let mut queue = VecDeque::new();
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &e in &self.head[v] {
                let edge = &self.edges[e];
                if edge.cap > 0 && !seen[edge.to] {
                    seen[edge.to] = true;
                    queue.push_back(edge.to);
                }
            }
        }
        seen
    }
}

/// Strict feasibility test: does some nonempty S satisfy |E(S)|/|S| > lambda?
/// Returns the witness set when one exists. Restricted to the given nodes.
fn strictly_denser_subset(
    g: &DynamicGraph,
    nodes: &[NodeId],
    lambda: Rational,
) -> Option<Vec<NodeId>> {
    let n = nodes.len();
    let mut local = std::collections::HashMap::with_capacity(n);
    for (i, &v) in nodes.iter().enumerate() {
        local.insert(v, i);
    }
    let m: i64 = nodes
        .iter()
        .map(|&v| g.neighbors(v).filter(|w| local.contains_key(w)).count() as i64)
        .sum::<i64>()
        / 2;
    if m == 0 {
        return if lambda.is_negative() { Some(vec![nodes[0]]) } else { None };
    }
    let p = *lambda.numer();
    let q = *lambda.denom();
    assert!(q > 0);
    let s = n;
    let t = n + 1;
    let mut net = Dinic::new(n + 2);
    for (i, &v) in nodes.iter().enumerate() {
        let deg = g.neighbors(v).filter(|w| local.contains_key(w)).count() as i64;
        net.add_edge(s, i, m * q, 0);
        // m + 2*lambda - deg(v), scaled by q. Nonnegative because lambda >= 0
        // in all callers and deg(v) <= m.
        let back = m * q + 2 * p - q * deg;
        assert!(back >= 0, "negative sink capacity: lambda too small");
        net.add_edge(i, t, back, 0);
    }
    for &v in nodes {
        for w in g.neighbors(v) {
            if v < w {
                if let (Some(&a), Some(&b)) = (local.get(&v), local.get(&w)) {
                    net.add_edge(a, b, q, q);
                }
            }
        }
    }
    let full = m * q * n as i64;
    let flow = net.max_flow(s, t, full);
    if flow >= full {
        return None;
    }
    let side = net.min_cut_side(s);
    let witness: Vec<NodeId> =
        nodes.iter().enumerate().filter(|(i, _)| side[*i]).map(|(_, &v)| v).collect();
    debug_assert!(!witness.is_empty());
    Some(witness)
}

fn density_of(g: &DynamicGraph, set: &[NodeId]) -> Rational {
    let lookup: std::collections::HashSet<NodeId> = set.iter().copied().collect();
    let edges: usize = set
        .iter()
        .map(|&v| g.neighbors(v).filter(|w| lookup.contains(w)).count())
        .sum::<usize>()
        / 2;
    Rational::new(edges as i64, set.len() as i64)
}

/// Exact test `max density >= threshold`, with a witness achieving it.
/// Works component by component: densities within a component C are
/// rationals with denominator at most |C|, so testing strictly above
/// `threshold - 1/(q(|C|+1))` decides the non-strict comparison exactly,
/// and the scaled capacities stay well inside i64.
pub fn density_at_least(g: &DynamicGraph, threshold: Rational) -> (bool, Option<Vec<NodeId>>) {
    let n = g.node_count();
    if n == 0 {
        return (false, None);
    }
    if threshold <= Rational::zero() {
        // Densities are nonnegative, so any single node is a witness.
        return (true, Some(vec![0]));
    }
    let (comp_count, comp) = g.components();
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); comp_count];
    for v in 0..n {
        members[comp[v] as usize].push(v as NodeId);
    }
    for nodes in members {
        // Any S with density >= threshold lies inside the ceil(threshold)-core:
        // every node of a maximum-density set has internal degree >= rho.
        let nodes = peel_below(g, nodes, threshold);
        if nodes.is_empty() {
            continue;
        }
        let sz = nodes.len() as i64;
        let eps_den = threshold.denom() * (sz + 1);
        let shifted = Rational::new(threshold.numer() * (sz + 1) - 1, eps_den);
        if let Some(witness) = strictly_denser_subset(g, &nodes, shifted) {
            debug_assert!(density_of(g, &witness) >= threshold);
            return (true, Some(witness));
        }
    }
    (false, None)
}

/// Iteratively removes nodes whose remaining degree is below `tau`.
fn peel_below(g: &DynamicGraph, nodes: Vec<NodeId>, tau: Rational) -> Vec<NodeId> {
    let index: std::collections::HashMap<NodeId, usize> =
        nodes.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut deg: Vec<i64> = nodes
        .iter()
        .map(|&v| g.neighbors(v).filter(|w| index.contains_key(w)).count() as i64)
        .collect();
    let mut alive = vec![true; nodes.len()];
    let below = |d: i64| Rational::new(d, 1) < tau;
    let mut queue: VecDeque<usize> =
        (0..nodes.len()).filter(|&i| below(deg[i])).collect();
    while let Some(i) = queue.pop_front() {
        if !alive[i] {
            continue;
        }
        alive[i] = false;
        for w in g.neighbors(nodes[i]) {
            if let Some(&k) = index.get(&w) {
                if alive[k] {
                    deg[k] -= 1;
                    if below(deg[k]) {
                        queue.push_back(k);
                    }
                }
            }
        }
    }
    nodes.iter().enumerate().filter(|(i, _)| alive[*i]).map(|(_, &v)| v).collect()
}

/// Simplest rational (smallest denominator, then smallest numerator) strictly
/// inside the open interval (lo, hi). Standard continued-fraction walk.
fn simplest_between(lo: Rational, hi: Rational) -> Rational {
    assert!(lo < hi);
    let fl = lo.floor();
    let candidate = fl + Rational::new(1, 1);
    if candidate > lo && candidate < hi {
        return candidate;
    }
    if lo == fl {
        // lo is an integer and hi <= lo + 1: recurse on (1/(hi-lo), inf).
        let inv = (hi - lo).recip();
        let next = inv.floor() + Rational::new(1, 1);
        return lo + next.recip();
    }
    // Both endpoints inside (fl, fl+1): recurse reciprocally.
    let inner = simplest_between((hi - fl).recip(), (lo - fl).recip());
    fl + inner.recip()
}

/// Exact maximum of |E(S)|/|S| over nonempty S, with the witness set.
/// Computed per connected component by rational binary search over the
/// parametric flow test.
pub fn densest_subgraph(g: &DynamicGraph) -> (DensityValue, Vec<NodeId>) {
    let n = g.node_count();
    if n == 0 {
        return (Rational::zero(), Vec::new());
    }
    if g.edge_count() == 0 {
        return (Rational::zero(), vec![0]);
    }
    let (comp_count, comp) = g.components();
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); comp_count];
    for v in 0..n {
        members[comp[v] as usize].push(v as NodeId);
    }
    let mut best: Option<(Rational, Vec<NodeId>)> = None;
    for nodes in members {
        if nodes.len() < 2 {
            continue;
        }
        let (rho, witness) = densest_in_component(g, &nodes);
        match &best {
            Some((b, _)) if *b >= rho => {}
            _ => best = Some((rho, witness)),
        }
    }
    best.unwrap_or((Rational::zero(), vec![0]))
}

fn densest_in_component(g: &DynamicGraph, nodes: &[NodeId]) -> (Rational, Vec<NodeId>) {
    let size = nodes.len() as i64;
    // Achievable lower bound: the whole component.
    let mut lo = density_of(g, nodes);
    let mut witness = nodes.to_vec();
    let max_deg = nodes.iter().map(|&v| g.degree(v)).max().unwrap_or(0) as i64;
    // No subgraph beats max degree / 2.
    let mut hi = Rational::new(max_deg, 2) + Rational::new(1, 1);
    // Exit once (lo, hi] pins the optimum: densities are rationals with
    // denominator <= |component|, and distinct such rationals differ by more
    // than 1/size^2.
    let gap = Rational::new(1, size * size);
    let mut rounds = 0;
    while hi - lo >= gap {
        rounds += 1;
        assert!(rounds < 10_000, "densest subgraph search failed to converge");
        let mid = simplest_between(lo, hi);
        match strictly_denser_subset(g, nodes, mid) {
            Some(w) => {
                lo = density_of(g, &w);
                witness = w;
                debug_assert!(lo > mid);
            }
            None => hi = mid,
        }
    }
    (lo, witness)
}
