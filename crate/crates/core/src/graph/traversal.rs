use super::{DynamicGraph, NodeId};
use std::collections::VecDeque;

/// Exact hop count of the shortest path, `None` if disconnected.
pub fn bfs_distance(g: &DynamicGraph, s: NodeId, t: NodeId) -> Option<usize> {
    if s == t {
        return Some(0);
    }
    let mut dist = vec![usize::MAX; g.node_count()];
    dist[s as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v as usize];
        for w in g.neighbors(v) {
            if dist[w as usize] == usize::MAX {
                dist[w as usize] = dv + 1;
                if w == t {
                    return Some(dv + 1);
                }
                queue.push_back(w);
            }
        }
    }
    None
}

pub fn is_connected(g: &DynamicGraph) -> bool {
    let n = g.node_count();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[0] = true;
    queue.push_back(0 as NodeId);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// 2-coloring witness if bipartite: `Some(colors)` with colors in {0, 1} such
/// that every edge crosses colors, `None` on an odd cycle.
pub fn is_bipartite(g: &DynamicGraph) -> Option<Vec<u8>> {
    let n = g.node_count();
    let mut color = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        queue.push_back(start as NodeId);
        while let Some(v) = queue.pop_front() {
            let cv = color[v as usize];
            for w in g.neighbors(v) {
                if color[w as usize] == u8::MAX {
                    color[w as usize] = 1 - cv;
                    queue.push_back(w);
                } else if color[w as usize] == cv {
                    return None;
                }
            }
        }
    }
    Some(color)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_graph(n: usize) -> DynamicGraph {
        let mut g = DynamicGraph::new(n);
        for v in 0..n - 1 {
            g.insert_edge(v as NodeId, v as NodeId + 1).unwrap();
        }
        g
    }

    fn cycle_graph(n: usize) -> DynamicGraph {
        let mut g = path_graph(n);
        g.insert_edge(n as NodeId - 1, 0).unwrap();
        g
    }

    #[test]
    fn distance_to_self_is_zero() {
        let g = path_graph(3);
        assert_eq!(bfs_distance(&g, 1, 1), Some(0));
    }

    #[test]
    fn path_distance() {
        let g = path_graph(3);
        assert_eq!(bfs_distance(&g, 0, 2), Some(2));
    }

    #[test]
    fn disconnected_distance_is_none() {
        let g = DynamicGraph::new(4);
        assert_eq!(bfs_distance(&g, 0, 3), None);
        assert!(!is_connected(&g));
    }

    #[test]
    fn odd_cycle_not_bipartite_even_cycle_is() {
        assert!(is_bipartite(&cycle_graph(5)).is_none());
        let colors = is_bipartite(&cycle_graph(6)).unwrap();
        let g = cycle_graph(6);
        for (a, b) in g.edges() {
            assert_ne!(colors[a as usize], colors[b as usize]);
        }
    }
}
