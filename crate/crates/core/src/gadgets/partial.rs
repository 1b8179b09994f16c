//! Decremental constructions: the whole input stream is wired at build time
//! and each round only deletes edges. A generic log-reversal utility replays
//! a finished run as an insertions-only stream with measured thresholds.

use super::LabelMap;
use crate::error::{Error, Result};
use crate::graph::{bfs_distance, max_matching_size, DynamicGraph, NodeId, UpdateOp};
use crate::oumv::{BitMatrix, BitVector};

/// One round of a decremental run, recorded for reversal.
#[derive(Debug, Clone)]
pub struct RoundRecord {
    pub pre_ops: Vec<UpdateOp>,
    pub post_ops: Vec<UpdateOp>,
    /// Full potential input-edge set of the round (present or deleted).
    pub vector_edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialKind {
    /// Query is dist(s, t); round j decodes 1 iff dist == 6 log n + 5 + 2j.
    StDistance,
    /// Query is the unmatched count; round j decodes 1 iff it equals 4j - 2.
    Matching,
}

/// State of a decremental run: the static graph built from the full matrix,
/// per-round deletion scripts, and the thresholds table.
pub struct DecrementalState {
    pub kind: PartialKind,
    pub graph: DynamicGraph,
    pub n: usize,
    pub log_n: u32,
    pub s: NodeId,
    pub t: NodeId,
    /// 1-based round about to be played.
    pub next_round: usize,
    pub records: Vec<RoundRecord>,
    pub build_snapshot: DynamicGraph,
    geom: PartialGeometry,
}

#[derive(Debug, Clone, Copy)]
struct PartialGeometry {
    n: usize,
    per_side: usize,
}

impl PartialGeometry {
    // --- (s,t)-distance layout: tree + forest + paths + forest per side. ---
    fn tree(&self, heap: usize) -> NodeId {
        (heap - 1) as NodeId
    }
    fn l2(&self, i: usize) -> NodeId {
        self.tree(self.n - 1 + i)
    }
    fn forest_a(&self, tree: usize, heap: usize) -> NodeId {
        ((2 * self.n - 1) + (tree - 1) * (2 * self.n - 1) + heap - 1) as NodeId
    }
    fn l3_root(&self, tree: usize) -> NodeId {
        self.forest_a(tree, 1)
    }
    fn l4(&self, tree: usize, j: usize) -> NodeId {
        self.forest_a(tree, self.n + j - 1)
    }
    fn p(&self, i: usize, j: usize) -> NodeId {
        ((2 * self.n - 1) + self.n * (2 * self.n - 1) + (i - 1) * self.n + j - 1) as NodeId
    }
    fn forest_b(&self, tree: usize, heap: usize) -> NodeId {
        self.p(self.n, self.n) + 1 + ((tree - 1) * (2 * self.n - 1) + heap - 1) as NodeId
    }
    fn l5_root(&self, tree: usize) -> NodeId {
        self.forest_b(tree, 1)
    }
    fn l6(&self, tree: usize, j: usize) -> NodeId {
        self.forest_b(tree, self.n + j - 1)
    }

    // --- matching layout: three even-path gadget layers per side. ---
    fn gadget_node(&self, layer: usize, sub: usize, inner: usize, upper: bool) -> NodeId {
        let block = 2 * self.n + 2;
        let base = layer * self.n * block + (sub - 1) * block;
        (base + 2 * inner + if upper { 1 } else { 0 }) as NodeId
    }
    fn m1(&self, j: usize, i: usize) -> NodeId {
        self.gadget_node(0, j, i, false)
    }
    fn m2(&self, j: usize, i: usize) -> NodeId {
        self.gadget_node(0, j, i, true)
    }
    fn m3(&self, i: usize, j: usize) -> NodeId {
        self.gadget_node(1, i, j, false)
    }
    fn m4(&self, i: usize, j: usize) -> NodeId {
        self.gadget_node(1, i, j, true)
    }
    fn m5(&self, i: usize, j: usize) -> NodeId {
        self.gadget_node(2, i, j, false)
    }
    fn m6(&self, i: usize, j: usize) -> NodeId {
        self.gadget_node(2, i, j, true)
    }

    fn right(&self, v: NodeId) -> NodeId {
        v + self.per_side as NodeId
    }
}

fn log2_exact(n: usize) -> Result<u32> {
    if n >= 2 && n.is_power_of_two() {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::InvalidParam(format!("n must be a power of two >= 2, got {n}")))
    }
}

/// Decremental (s,t)-distance graph. Six forest/path blocks per side; all
/// input edges for all n rounds exist at build time; the stream after build
/// is deletions only. Round j decodes 1 iff dist(s,t) = 6 log n + 5 + 2j.
pub fn build_decremental_st(n: usize, m: &BitMatrix) -> Result<DecrementalState> {
    let log_n = log2_exact(n)?;
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    let per_side = 5 * n * n - 1;
    let geom = PartialGeometry { n, per_side };
    let mut g = DynamicGraph::new(2 * per_side);
    for side in 0..2 {
        let off = |v: NodeId| if side == 0 { v } else { geom.right(v) };
        for h in 2..2 * n {
            g.insert_edge(off(geom.tree(h / 2)), off(geom.tree(h)))?;
        }
        for tree in 1..=n {
            for h in 2..2 * n {
                g.insert_edge(off(geom.forest_a(tree, h / 2)), off(geom.forest_a(tree, h)))?;
                g.insert_edge(off(geom.forest_b(tree, h / 2)), off(geom.forest_b(tree, h)))?;
            }
        }
        for i in 1..=n {
            g.insert_edge(off(geom.l2(i)), off(geom.l3_root(i)))?;
            for j in 2..=n {
                g.insert_edge(off(geom.p(i, j)), off(geom.p(i, j - 1)))?;
            }
            g.insert_edge(off(geom.p(i, 1)), off(geom.l5_root(i)))?;
            for j in 1..=n {
                g.insert_edge(off(geom.l4(i, j)), off(geom.p(i, j)))?;
            }
        }
    }
    for (i, j) in m.iter_ones() {
        g.insert_edge(geom.l6(i, j), geom.right(geom.l6(j, i)))?;
    }
    g.clear_log();
    let snapshot = g.clone();
    Ok(DecrementalState {
        kind: PartialKind::StDistance,
        graph: g,
        n,
        log_n,
        s: geom.tree(1),
        t: geom.right(geom.tree(1)),
        next_round: 1,
        records: Vec::new(),
        build_snapshot: snapshot,
        geom,
    })
}

/// Decremental matching graph: three even-path gadget layers per side,
/// statically cross-wired; round j decodes 1 iff exactly 4j - 2 nodes are
/// unmatched.
pub fn build_decremental_matching(n: usize, m: &BitMatrix) -> Result<DecrementalState> {
    if n < 1 || m.n() != n {
        return Err(Error::DimensionMismatch(format!("n={n} with {}x{0} matrix", m.n())));
    }
    let per_side = 3 * n * (2 * n + 2);
    let geom = PartialGeometry { n, per_side };
    let mut g = DynamicGraph::new(2 * per_side);
    for side in 0..2 {
        let off = |v: NodeId| if side == 0 { v } else { geom.right(v) };
        for layer in 0..3 {
            for sub in 1..=n {
                for inner in 0..=n {
                    g.insert_edge(
                        off(geom.gadget_node(layer, sub, inner, false)),
                        off(geom.gadget_node(layer, sub, inner, true)),
                    )?;
                    if inner < n {
                        g.insert_edge(
                            off(geom.gadget_node(layer, sub, inner, true)),
                            off(geom.gadget_node(layer, sub, inner + 1, false)),
                        )?;
                    }
                }
            }
        }
        for i in 1..=n {
            for j in 1..=n {
                g.insert_edge(off(geom.m2(j, i)), off(geom.m3(i, j)))?;
            }
            g.insert_edge(off(geom.m4(i, n)), off(geom.m5(i, 0)))?;
        }
    }
    for (i, j) in m.iter_ones() {
        g.insert_edge(geom.m6(i, j), geom.right(geom.m6(j, i)))?;
    }
    g.clear_log();
    let snapshot = g.clone();
    Ok(DecrementalState {
        kind: PartialKind::Matching,
        graph: g,
        n,
        log_n: 0,
        s: 0,
        t: 0,
        next_round: 1,
        records: Vec::new(),
        build_snapshot: snapshot,
        geom,
    })
}

impl DecrementalState {
    /// The query value that decodes to 1 in round `j` (distance or
    /// unmatched-node count).
    pub fn one_value(&self, j: usize) -> usize {
        match self.kind {
            PartialKind::StDistance => 6 * self.log_n as usize + 5 + 2 * j,
            PartialKind::Matching => 4 * j - 2,
        }
    }

    /// Full potential input-edge set of round `j`.
    fn vector_edges(&self, j: usize) -> Vec<(NodeId, NodeId)> {
        let g = &self.geom;
        let mut edges = Vec::new();
        match self.kind {
            PartialKind::StDistance => {
                for i in 1..=self.n {
                    edges.push((g.l4(i, j), g.p(i, j)));
                    edges.push((g.right(g.l4(i, j)), g.right(g.p(i, j))));
                }
            }
            PartialKind::Matching => {
                for i in 1..=self.n {
                    edges.push((g.m2(j, i), g.m3(i, j)));
                    edges.push((g.right(g.m2(j, i)), g.right(g.m3(i, j))));
                }
            }
        }
        edges
    }

    /// Round-start deletions for the pair (u, v). Returns the ops applied.
    pub fn round_pre(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        let j = self.next_round;
        if j > self.n {
            return Err(Error::InvalidParam("stream exhausted".into()));
        }
        if u.len() != self.n || v.len() != self.n {
            return Err(Error::DimensionMismatch(format!("pair dimension != {}", self.n)));
        }
        let g = &self.geom;
        let mut ops = Vec::new();
        if self.kind == PartialKind::Matching {
            ops.push(UpdateOp::Delete(g.m1(j, 0), g.m2(j, 0)));
            ops.push(UpdateOp::Delete(g.right(g.m1(j, 0)), g.right(g.m2(j, 0))));
        }
        for i in 1..=self.n {
            match self.kind {
                PartialKind::StDistance => {
                    if !u.get(i) {
                        ops.push(UpdateOp::Delete(g.l4(i, j), g.p(i, j)));
                    }
                    if !v.get(i) {
                        ops.push(UpdateOp::Delete(g.right(g.l4(i, j)), g.right(g.p(i, j))));
                    }
                }
                PartialKind::Matching => {
                    if !u.get(i) {
                        ops.push(UpdateOp::Delete(g.m2(j, i), g.m3(i, j)));
                    }
                    if !v.get(i) {
                        ops.push(UpdateOp::Delete(g.right(g.m2(j, i)), g.right(g.m3(i, j))));
                    }
                }
            }
        }
        for &op in &ops {
            self.graph.apply(op)?;
        }
        self.records.push(RoundRecord {
            pre_ops: ops.clone(),
            post_ops: Vec::new(),
            vector_edges: self.vector_edges(j),
        });
        Ok(ops)
    }

    /// End-of-round sweep. Returns the ops applied.
    pub fn round_post(&mut self) -> Result<Vec<UpdateOp>> {
        let j = self.next_round;
        let g = &self.geom;
        let mut ops = Vec::new();
        match self.kind {
            PartialKind::StDistance => {
                for i in 1..=self.n {
                    if self.graph.has_edge(g.l4(i, j), g.p(i, j)) {
                        ops.push(UpdateOp::Delete(g.l4(i, j), g.p(i, j)));
                    }
                    if self.graph.has_edge(g.right(g.l4(i, j)), g.right(g.p(i, j))) {
                        ops.push(UpdateOp::Delete(g.right(g.l4(i, j)), g.right(g.p(i, j))));
                    }
                }
            }
            PartialKind::Matching => {
                ops.push(UpdateOp::Delete(g.m2(j, 0), g.m1(j, 1)));
                ops.push(UpdateOp::Delete(g.right(g.m2(j, 0)), g.right(g.m1(j, 1))));
                for i in 1..=self.n {
                    if self.graph.has_edge(g.m2(j, i), g.m3(i, j)) {
                        ops.push(UpdateOp::Delete(g.m2(j, i), g.m3(i, j)));
                    }
                    if self.graph.has_edge(g.right(g.m2(j, i)), g.right(g.m3(i, j))) {
                        ops.push(UpdateOp::Delete(g.right(g.m2(j, i)), g.right(g.m3(i, j))));
                    }
                }
            }
        }
        for &op in &ops {
            self.graph.apply(op)?;
        }
        self.records.last_mut().expect("round_pre ran").post_ops = ops.clone();
        self.next_round += 1;
        Ok(ops)
    }

    /// Queries the reference solver on the current graph.
    pub fn measure(&self) -> Option<usize> {
        match self.kind {
            PartialKind::StDistance => bfs_distance(&self.graph, self.s, self.t),
            PartialKind::Matching => {
                Some(self.graph.node_count() - 2 * max_matching_size(&self.graph))
            }
        }
    }

    pub fn decide(&self, measured: Option<usize>) -> bool {
        measured == Some(self.one_value(self.next_round))
    }

    pub fn label_map(&self) -> LabelMap {
        let g = &self.geom;
        let mut map = LabelMap::with_capacity(self.graph.node_count());
        match self.kind {
            PartialKind::StDistance => {
                for side in 0..2 {
                    let (sn, off): (&str, fn(&PartialGeometry, NodeId) -> NodeId) = if side == 0 {
                        ("L", |_, v| v)
                    } else {
                        ("R", PartialGeometry::right)
                    };
                    for h in 1..2 * self.n {
                        let name = if h < self.n {
                            format!("{sn}1[{h}]")
                        } else {
                            format!("{sn}2[{}]", h - self.n + 1)
                        };
                        map.set(off(g, g.tree(h)), name);
                    }
                    for tree in 1..=self.n {
                        for h in 1..2 * self.n {
                            let (a, b) = if h < self.n { ("3", h) } else { ("4", h - self.n + 1) };
                            map.set(off(g, g.forest_a(tree, h)), format!("{sn}{a}[{tree},{b}]"));
                            let (a, b) = if h < self.n { ("5", h) } else { ("6", h - self.n + 1) };
                            map.set(off(g, g.forest_b(tree, h)), format!("{sn}{a}[{tree},{b}]"));
                        }
                        for j in 1..=self.n {
                            let p = if side == 0 { "P" } else { "Q" };
                            map.set(off(g, g.p(tree, j)), format!("{p}[{tree},{j}]"));
                        }
                    }
                }
            }
            PartialKind::Matching => {
                for side in 0..2 {
                    let sn = if side == 0 { "L" } else { "R" };
                    for layer in 0..3 {
                        for sub in 1..=self.n {
                            for inner in 0..=self.n {
                                for (upper, name) in [(false, 2 * layer + 1), (true, 2 * layer + 2)] {
                                    let v = g.gadget_node(layer, sub, inner, upper);
                                    let v = if side == 0 { v } else { g.right(v) };
                                    map.set(v, format!("{sn}{name}[{sub},{inner}]"));
                                }
                            }
                        }
                    }
                }
            }
        }
        map
    }
}

/// Plays one full round: start deletions, query, decode, sweep.
pub fn advance_round(
    state: &mut DecrementalState,
    u: &BitVector,
    v: &BitVector,
) -> Result<(bool, usize)> {
    let pre = state.round_pre(u, v)?;
    let bit = state.decide(state.measure());
    let post = state.round_post()?;
    Ok((bit, pre.len() + post.len()))
}

/// A reversed (insertions-only) replay of a finished decremental run.
pub struct IncrementalReplay {
    pub kind: PartialKind,
    /// The final graph of the decremental run; insertions start here.
    pub start: DynamicGraph,
    pub s: NodeId,
    pub t: NodeId,
    /// Rounds in replay order (original order reversed).
    pub rounds: Vec<ReversedRound>,
}

#[derive(Debug, Clone)]
pub struct ReversedRound {
    /// Original 1-based round index.
    pub round: usize,
    pub insertions_before_query: Vec<UpdateOp>,
    pub insertions_after_query: Vec<UpdateOp>,
    pub vector_edges: Vec<(NodeId, NodeId)>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ReversedOutcome {
    pub round: usize,
    /// Measured answer with every round input edge present (the decode-1 value).
    pub ones_value: Option<usize>,
    /// Measured answer with every round input edge absent.
    pub zeros_value: Option<usize>,
    pub measured: Option<usize>,
    pub decoded: bool,
}

/// Emits the reversed log as insertions from the final graph.
pub fn reverse_to_incremental(state: &DecrementalState) -> IncrementalReplay {
    let rounds = state
        .records
        .iter()
        .enumerate()
        .rev()
        .map(|(idx, rec)| ReversedRound {
            round: idx + 1,
            insertions_before_query: rec.post_ops.iter().rev().map(|op| op.inverse()).collect(),
            insertions_after_query: rec.pre_ops.iter().rev().map(|op| op.inverse()).collect(),
            vector_edges: rec.vector_edges.clone(),
        })
        .collect();
    IncrementalReplay {
        kind: state.kind,
        start: state.graph.clone(),
        s: state.s,
        t: state.t,
        rounds,
    }
}

/// Replays the insertion stream and decodes each round against thresholds
/// measured from the reference solver: the all-present and all-absent probe
/// values of the round's input edges.
pub fn run_reversed(replay: &IncrementalReplay) -> Result<Vec<ReversedOutcome>> {
    let mut g = replay.start.clone();
    let measure = |g: &DynamicGraph| -> Option<usize> {
        match replay.kind {
            PartialKind::StDistance => bfs_distance(g, replay.s, replay.t),
            PartialKind::Matching => Some(g.node_count() - 2 * max_matching_size(g)),
        }
    };
    let mut out = Vec::new();
    for round in &replay.rounds {
        for &op in &round.insertions_before_query {
            g.apply(op)?;
        }
        let measured = measure(&g);
        let mut ones_probe = g.clone();
        for &(a, b) in &round.vector_edges {
            if !ones_probe.has_edge(a, b) {
                ones_probe.insert_edge(a, b)?;
            }
        }
        let ones_value = measure(&ones_probe);
        let mut zeros_probe = g.clone();
        for &(a, b) in &round.vector_edges {
            if zeros_probe.has_edge(a, b) {
                zeros_probe.delete_edge(a, b)?;
            }
        }
        let zeros_value = measure(&zeros_probe);
        let decoded = ones_value.is_some() && measured == ones_value && ones_value != zeros_value;
        out.push(ReversedOutcome {
            round: round.round,
            ones_value,
            zeros_value,
            measured,
            decoded,
        });
        for &op in &round.insertions_after_query {
            g.apply(op)?;
        }
    }
    Ok(out)
}
