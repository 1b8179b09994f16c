//! Exact maximum-cardinality matching: Hopcroft-Karp on bipartite components,
//! Edmonds blossom contraction on the rest.

use super::{is_bipartite, DynamicGraph, NodeId};
use crate::error::{Error, Result};
use std::collections::VecDeque;

const NONE: usize = usize::MAX;

/// Partner map: `partner(v)` is the matched neighbor or `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    partner: Vec<Option<NodeId>>,
}

impl Matching {
    pub fn empty(node_count: usize) -> Self {
        Matching { partner: vec![None; node_count] }
    }

    pub fn partner(&self, v: NodeId) -> Option<NodeId> {
        self.partner[v as usize]
    }

    pub fn node_count(&self) -> usize {
        self.partner.len()
    }

    /// Number of matched pairs.
    pub fn size(&self) -> usize {
        self.partner.iter().filter(|p| p.is_some()).count() / 2
    }

    pub fn pair(&mut self, a: NodeId, b: NodeId) {
        assert_ne!(a, b);
        self.partner[a as usize] = Some(b);
        self.partner[b as usize] = Some(a);
    }

    pub fn unmatched(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.partner
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_none())
            .map(|(v, _)| v as NodeId)
    }

    /// Involutive and every matched pair is an edge of `g`.
    pub fn validate(&self, g: &DynamicGraph) -> Result<()> {
        if self.partner.len() != g.node_count() {
            return Err(Error::InvalidMatching(format!(
                "matching covers {} nodes, graph has {}",
                self.partner.len(),
                g.node_count()
            )));
        }
        for (v, p) in self.partner.iter().enumerate() {
            if let Some(w) = *p {
                if self.partner[w as usize] != Some(v as NodeId) {
                    return Err(Error::InvalidMatching(format!("not involutive at {v}")));
                }
                if !g.has_edge(v as NodeId, w) {
                    return Err(Error::InvalidMatching(format!("pair ({v}, {w}) is not an edge")));
                }
            }
        }
        Ok(())
    }
}

/// Exact maximum matching size.
pub fn max_matching_size(g: &DynamicGraph) -> usize {
    max_matching(g).size()
}

/// Exact maximum-cardinality matching. The graph is split into connected
/// components; bipartite components use layered augmenting search, the rest
/// use blossom contraction.
pub fn max_matching(g: &DynamicGraph) -> Matching {
    let n = g.node_count();
    let mut result = Matching::empty(n);
    if n == 0 {
        return result;
    }
    let (comp_count, comp) = g.components();
    let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); comp_count];
    for v in 0..n {
        members[comp[v] as usize].push(v as NodeId);
    }
    let bip = is_bipartite(g);
    for nodes in &members {
        if nodes.len() < 2 {
            continue;
        }
        // Local ids are positions in `nodes` (sorted ascending already).
        let mut local_index = std::collections::HashMap::with_capacity(nodes.len());
        for (i, &v) in nodes.iter().enumerate() {
            local_index.insert(v, i);
        }
        let adj: Vec<Vec<usize>> = nodes
            .iter()
            .map(|&v| g.neighbors(v).map(|w| local_index[&w]).collect())
            .collect();
        let mate = match &bip {
            Some(colors) => hopcroft_karp(&adj, nodes, colors),
            None => {
                // Component may still be bipartite even if the whole graph is not.
                match component_two_coloring(&adj) {
                    Some(colors) => hopcroft_karp_local(&adj, &colors),
                    None => blossom_max_matching(&adj),
                }
            }
        };
        for (i, &m) in mate.iter().enumerate() {
            if m != NONE && i < m {
                result.pair(nodes[i], nodes[m]);
            }
        }
    }
    result
}

fn component_two_coloring(adj: &[Vec<usize>]) -> Option<Vec<u8>> {
    let n = adj.len();
    let mut color = vec![u8::MAX; n];
    let mut queue = VecDeque::new();
    for start in 0..n {
        if color[start] != u8::MAX {
            continue;
        }
        color[start] = 0;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[v];
                    queue.push_back(w);
                } else if color[w] == color[v] {
                    return None;
                }
            }
        }
    }
    Some(color)
}

fn hopcroft_karp(adj: &[Vec<usize>], nodes: &[NodeId], global_colors: &[u8]) -> Vec<usize> {
    let colors: Vec<u8> = nodes.iter().map(|&v| global_colors[v as usize]).collect();
    hopcroft_karp_local(adj, &colors)
}

/// Hopcroft-Karp on a 2-colored component; returns mate[] over local ids.
fn hopcroft_karp_local(adj: &[Vec<usize>], colors: &[u8]) -> Vec<usize> {
    let n = adj.len();
    let left: Vec<usize> = (0..n).filter(|&v| colors[v] == 0).collect();
    let mut mate = vec![NONE; n];
    // Greedy warm start.
    for &v in &left {
        if mate[v] == NONE {
            for &w in &adj[v] {
                if mate[w] == NONE {
                    mate[v] = w;
                    mate[w] = v;
                    break;
                }
            }
        }
    }
    let mut dist = vec![usize::MAX; n];
    loop {
        let mut queue = VecDeque::new();
        for &v in &left {
            if mate[v] == NONE {
                dist[v] = 0;
                queue.push_back(v);
            } else {
                dist[v] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                match mate[w] {
                    NONE => found = true,
                    u => {
                        if dist[u] == usize::MAX {
                            dist[u] = dist[v] + 1;
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        if !found {
            return mate;
        }
        for &v in &left {
            if mate[v] == NONE {
                hk_try(adj, &mut mate, &mut dist, v);
            }
        }
    }
}

fn hk_try(adj: &[Vec<usize>], mate: &mut [usize], dist: &mut [usize], v: usize) -> bool {
    let dv = std::mem::replace(&mut dist[v], usize::MAX);
    for &w in &adj[v] {
        match mate[w] {
            NONE => {
                mate[w] = v;
                mate[v] = w;
                return true;
            }
            u => {
                if dist[u] == dv + 1 && hk_try(adj, mate, dist, u) {
                    mate[w] = v;
                    mate[v] = w;
                    return true;
                }
            }
        }
    }
    false
}

/// Blossom-contraction search state over local ids.
struct BlossomSearch<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
}

impl<'a> BlossomSearch<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        let mut s = BlossomSearch {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
        };
        // Greedy warm start.
        for v in 0..n {
            if s.mate[v] == NONE {
                for &w in &adj[v] {
                    if s.mate[w] == NONE {
                        s.mate[v] = w;
                        s.mate[w] = v;
                        break;
                    }
                }
            }
        }
        s
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let n = self.adj.len();
        let mut seen = vec![false; n];
        loop {
            a = self.base[a];
            seen[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize, blossom: &mut [bool]) {
        while self.base[v] != b {
            blossom[self.base[v]] = true;
            blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// Alternating BFS from `root`. Returns the exposed endpoint of an
    /// augmenting path, or `target` if reached, without applying the
    /// augmentation. When `target` is set, other exposed vertices are treated
    /// as dead ends.
    fn find_path(&mut self, root: usize, target: Option<usize>) -> usize {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        let mut queue = VecDeque::new();
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let curbase = self.lca(v, to);
                    let mut blossom = vec![false; n];
                    self.mark_path(v, curbase, to, &mut blossom);
                    self.mark_path(to, curbase, v, &mut blossom);
                    for i in 0..n {
                        if blossom[self.base[i]] {
                            self.base[i] = curbase;
                            if !self.used[i] {
                                self.used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        match target {
                            Some(t) if to != t => {} // dead end: exposed but not the target
                            _ => return to,
                        }
                    } else {
                        self.used[self.mate[to]] = true;
                        queue.push_back(self.mate[to]);
                    }
                }
            }
        }
        NONE
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }
}

/// Maximum matching on one component via blossom contraction; mate[] in local ids.
fn blossom_max_matching(adj: &[Vec<usize>]) -> Vec<usize> {
    let mut search = BlossomSearch::new(adj);
    for v in 0..adj.len() {
        if search.mate[v] == NONE {
            let endpoint = search.find_path(v, None);
            if endpoint != NONE {
                search.augment(endpoint);
            }
        }
    }
    search.mate
}

/// True iff an alternating path from `s` to `t` augments `matching`.
/// Both endpoints must be unmatched; the matching must be valid in `g`.
pub fn augmenting_path_exists(
    g: &DynamicGraph,
    matching: &Matching,
    s: NodeId,
    t: NodeId,
) -> Result<bool> {
    matching.validate(g)?;
    if matching.partner(s).is_some() || matching.partner(t).is_some() {
        return Err(Error::InvalidMatching(format!(
            "endpoints {s}, {t} must be unmatched"
        )));
    }
    let adj: Vec<Vec<usize>> = (0..g.node_count())
        .map(|v| g.neighbors(v as NodeId).map(|w| w as usize).collect())
        .collect();
    let mut search = BlossomSearch::new(&adj);
    for v in 0..adj.len() {
        search.mate[v] = matching.partner(v as NodeId).map(|w| w as usize).unwrap_or(NONE);
    }
    Ok(search.find_path(s as usize, Some(t as usize)) == t as usize)
}
