//! Global minimum cut via maximum-adjacency (Stoer-Wagner) contraction with
//! deterministic tie-breaking by smallest node id.

use super::DynamicGraph;

/// Exact global min cut value. Returns 0 for disconnected or trivial graphs.
pub fn global_min_cut(g: &DynamicGraph) -> usize {
    let n = g.node_count();
    if n < 2 {
        return 0;
    }
    // Dense weight matrix; contractions accumulate parallel edges as weights.
    let mut w = vec![vec![0u64; n]; n];
    for (a, b) in g.edges() {
        w[a as usize][b as usize] = 1;
        w[b as usize][a as usize] = 1;
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while active.len() > 1 {
        // Maximum adjacency search from the smallest active node.
        let mut in_a = vec![false; n];
        let mut weight_to_a = vec![0u64; n];
        let mut order = Vec::with_capacity(active.len());
        for _ in 0..active.len() {
            let mut sel = usize::MAX;
            for &v in &active {
                if !in_a[v] && (sel == usize::MAX || weight_to_a[v] > weight_to_a[sel]) {
                    sel = v;
                }
            }
            in_a[sel] = true;
            order.push(sel);
            for &v in &active {
                if !in_a[v] {
                    weight_to_a[v] += w[sel][v];
                }
            }
        }
        let t = *order.last().unwrap();
        let s = order[order.len() - 2];
        best = best.min(weight_to_a[t]);
        // Contract t into s.
        for &v in &active {
            if v != s && v != t {
                w[s][v] += w[t][v];
                w[v][s] = w[s][v];
            }
        }
        active.retain(|&v| v != t);
    }
    if best == u64::MAX {
        0
    } else {
        best as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use crate::oracles::brute_force_min_cut;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cycle_has_min_cut_two() {
        let mut g = DynamicGraph::new(6);
        for v in 0..6 {
            g.insert_edge(v, (v + 1) % 6).unwrap();
        }
        assert_eq!(global_min_cut(&g), 2);
    }

    #[test]
    fn k4_has_min_cut_three() {
        let mut g = DynamicGraph::new(4);
        for a in 0..4 {
            for b in a + 1..4 {
                g.insert_edge(a, b).unwrap();
            }
        }
        assert_eq!(global_min_cut(&g), 3);
    }

    #[test]
    fn three_edge_disjoint_hamiltonian_cycles_are_six_connected() {
        // Circulant on 9 nodes with strides 1, 2, 4: union of three
        // edge-disjoint Hamiltonian cycles.
        let mut g = DynamicGraph::new(9);
        for s in [1u32, 2, 4] {
            for v in 0..9u32 {
                let w = (v + s) % 9;
                if !g.has_edge(v, w) {
                    g.insert_edge(v, w).unwrap();
                }
            }
        }
        assert_eq!(g.edge_count(), 27);
        assert_eq!(global_min_cut(&g), 6);
        assert_eq!(brute_force_min_cut(&g), 6);
    }

    #[test]
    fn matches_enumeration_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..60 {
            let n = rng.gen_range(2..=10);
            let mut g = DynamicGraph::new(n);
            for a in 0..n as NodeId {
                for b in a + 1..n as NodeId {
                    if rng.gen_ratio(3, 5) {
                        g.insert_edge(a, b).unwrap();
                    }
                }
            }
            assert_eq!(global_min_cut(&g), brute_force_min_cut(&g));
        }
    }

    #[test]
    fn disconnected_graph_has_zero_cut() {
        let mut g = DynamicGraph::new(4);
        g.insert_edge(0, 1).unwrap();
        assert_eq!(global_min_cut(&g), 0);
    }
}
