//! Independent brute-force reference oracles. These deliberately share no
//! code with the production solvers: matching by branch-and-bound over
//! vertices, densest subgraph by subset enumeration, min cut by bipartition
//! enumeration. Desk-scale only; callers must respect the node caps.

use crate::graph::{DynamicGraph, NodeId};
use crate::Rational;
use num_traits::Zero;

/// Exponential-time maximum matching: branch on the lowest-id vertex that
/// still has usable edges. Practical to ~12 nodes.
pub fn brute_force_max_matching(g: &DynamicGraph) -> usize {
    fn rec(adj: &[Vec<usize>], used: &mut [bool], from: usize) -> usize {
        let mut v = from;
        while v < adj.len() && (used[v] || adj[v].iter().all(|&w| used[w])) {
            v += 1;
        }
        if v >= adj.len() {
            return 0;
        }
        used[v] = true;
        let mut best = rec(adj, used, v + 1);
        for &w in &adj[v] {
            if !used[w] {
                used[w] = true;
                best = best.max(1 + rec(adj, used, v + 1));
                used[w] = false;
            }
        }
        used[v] = false;
        best
    }
    let adj: Vec<Vec<usize>> = (0..g.node_count())
        .map(|v| g.neighbors(v as NodeId).map(|w| w as usize).collect())
        .collect();
    let mut used = vec![false; g.node_count()];
    rec(&adj, &mut used, 0)
}

/// Subset-enumeration densest subgraph, valid to 20 nodes.
pub fn brute_force_densest(g: &DynamicGraph) -> Rational {
    let n = g.node_count();
    assert!(n <= 20, "subset enumeration oracle capped at 20 nodes");
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v as NodeId).fold(0u32, |acc, w| acc | 1 << w))
        .collect();
    let mut best = Rational::zero();
    for mask in 1u32..1 << n {
        let size = mask.count_ones() as i64;
        let mut edges = 0i64;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            edges += (adj[v] & mask).count_ones() as i64;
        }
        edges /= 2;
        let rho = Rational::new(edges, size);
        if rho > best {
            best = rho;
        }
    }
    best
}

/// Bipartition-enumeration global min cut, valid to 16 nodes.
pub fn brute_force_min_cut(g: &DynamicGraph) -> usize {
    let n = g.node_count();
    assert!((2..=16).contains(&n));
    let adj: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v as NodeId).fold(0u32, |acc, w| acc | 1 << w))
        .collect();
    let mut best = usize::MAX;
    for mask in 1u32..(1 << (n - 1)) {
        let mut cut = 0;
        for v in 0..n {
            if mask >> v & 1 == 1 {
                cut += (adj[v] & !mask).count_ones() as usize;
            }
        }
        best = best.min(cut);
    }
    best
}
