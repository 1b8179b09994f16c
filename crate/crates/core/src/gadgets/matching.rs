//! Maximum-matching reductions: path subgadgets with canonical matchings,
//! wired so the maximum matching is N/2 exactly when the current pair
//! multiplies to 1, and N/2 - 1 otherwise.

use super::host::{build_filler, plan_host, FillerStyle, HostPlan};
use super::LabelMap;
use crate::error::{Error, Result};
use crate::expander::{build_expander, overlay_expander, ExpanderSpec, OverlayMode};
use crate::graph::{
    augmenting_path_exists, max_matching_size, DynamicGraph, ExpansionCertificate, Matching,
    NodeId, UpdateOp,
};
use crate::oumv::{augment_instance, BitMatrix, BitVector};

/// Shared geometry: one odd path gadget (X1/X2) and `rows` even path
/// subgadgets (X3/X4 with `cols`+1 leaf columns) per side.
#[derive(Debug, Clone, Copy)]
struct Geometry {
    odd: usize,
    rows: usize,
    cols: usize,
}

impl Geometry {
    fn per_side(&self) -> usize {
        (2 * self.odd + 1) + self.rows * (2 * self.cols + 2)
    }
}

#[derive(Debug, Clone)]
pub enum MatchingVariant {
    Const,
    Varying { t: f64, cols: usize, rounded: bool },
    Expander,
    PowerLaw { beta: f64 },
}

/// Bijection between structured node labels and dense node ids, plus the
/// canonical base matching that leaves exactly L2[0] and R2[0] unmatched.
#[derive(Debug, Clone)]
pub struct MatchingLayout {
    pub n: usize,
    pub variant: MatchingVariant,
    geom: Geometry,
    per_side: usize,
    pub expected_nodes: usize,
    pub base: Matching,
    /// L2[0]: the left unmatched endpoint.
    pub s: NodeId,
    /// R2[0]: the right unmatched endpoint.
    pub t: NodeId,
    /// Current input edges state, kept by the expander variant
    /// (dimension 2n after augmentation).
    current_u: Option<BitVector>,
    current_v: Option<BitVector>,
    /// Expander overlay edges, kept so tests can strip them.
    pub overlay_edges: Vec<(NodeId, NodeId)>,
    /// Power-law tail nodes (LT[0], LT[1], RT[0], RT[1]) when present.
    tail: Option<[NodeId; 4]>,
}

impl MatchingLayout {
    pub fn l1(&self, i: usize) -> NodeId {
        debug_assert!(i >= 1 && i <= self.geom.odd);
        (i - 1) as NodeId
    }
    pub fn l2(&self, i: usize) -> NodeId {
        debug_assert!(i <= self.geom.odd);
        (self.geom.odd + i) as NodeId
    }
    pub fn l3(&self, i: usize, j: usize) -> NodeId {
        debug_assert!(i >= 1 && i <= self.geom.rows && j <= self.geom.cols);
        (2 * self.geom.odd + 1 + (i - 1) * (2 * self.geom.cols + 2) + 2 * j) as NodeId
    }
    pub fn l4(&self, i: usize, j: usize) -> NodeId {
        self.l3(i, j) + 1
    }
    pub fn r1(&self, i: usize) -> NodeId {
        self.l1(i) + self.per_side as NodeId
    }
    pub fn r2(&self, i: usize) -> NodeId {
        self.l2(i) + self.per_side as NodeId
    }
    pub fn r3(&self, i: usize, j: usize) -> NodeId {
        self.l3(i, j) + self.per_side as NodeId
    }
    pub fn r4(&self, i: usize, j: usize) -> NodeId {
        self.l4(i, j) + self.per_side as NodeId
    }

    /// Gadget rows (subgadget count per side).
    pub fn rows(&self) -> usize {
        self.geom.rows
    }
    pub fn cols(&self) -> usize {
        self.geom.cols
    }

    pub fn label_map(&self) -> LabelMap {
        let mut map = LabelMap::with_capacity(self.expected_nodes);
        for side in 0..2 {
            let (a, b) = if side == 0 { ("L", 0) } else { ("R", self.per_side as NodeId) };
            for i in 1..=self.geom.odd {
                map.set(self.l1(i) + b, format!("{a}1[{i}]"));
            }
            for i in 0..=self.geom.odd {
                map.set(self.l2(i) + b, format!("{a}2[{i}]"));
            }
            for i in 1..=self.geom.rows {
                for j in 0..=self.geom.cols {
                    map.set(self.l3(i, j) + b, format!("{a}3[{i},{j}]"));
                    map.set(self.l4(i, j) + b, format!("{a}4[{i},{j}]"));
                }
            }
        }
        if let Some(tail) = self.tail {
            map.set(tail[0], "LT[0]".into());
            map.set(tail[1], "LT[1]".into());
            map.set(tail[2], "RT[0]".into());
            map.set(tail[3], "RT[1]".into());
        }
        map
    }
}

/// Lays down the odd gadget and the even subgadgets on both sides and
/// returns the layout with the canonical base matching.
fn build_skeleton(
    n: usize,
    geom: Geometry,
    variant: MatchingVariant,
    extra_nodes: usize,
) -> Result<(DynamicGraph, MatchingLayout)> {
    let per_side = geom.per_side();
    let total = 2 * per_side + extra_nodes;
    let mut layout = MatchingLayout {
        n,
        variant,
        geom,
        per_side,
        expected_nodes: total,
        base: Matching::empty(total),
        s: 0,
        t: 0,
        current_u: None,
        current_v: None,
        overlay_edges: Vec::new(),
        tail: None,
    };
    layout.s = layout.l2(0);
    layout.t = layout.r2(0);
    let mut g = DynamicGraph::new(total);
    for side in 0..2 {
        let off = if side == 0 { 0 } else { per_side as NodeId };
        // Odd path: X2[0], X1[1], X2[1], ..., X1[odd], X2[odd].
        for i in 1..=geom.odd {
            g.insert_edge(layout.l2(i - 1) + off, layout.l1(i) + off)?;
            g.insert_edge(layout.l1(i) + off, layout.l2(i) + off)?;
            layout.base.pair(layout.l1(i) + off, layout.l2(i) + off);
        }
        // Even paths: X3[i,0], X4[i,0], X3[i,1], ..., X3[i,cols], X4[i,cols].
        for i in 1..=geom.rows {
            for j in 0..=geom.cols {
                g.insert_edge(layout.l3(i, j) + off, layout.l4(i, j) + off)?;
                layout.base.pair(layout.l3(i, j) + off, layout.l4(i, j) + off);
                if j < geom.cols {
                    g.insert_edge(layout.l4(i, j) + off, layout.l3(i, j + 1) + off)?;
                }
            }
        }
    }
    Ok((g, layout))
}

/// Constant-degree matching reduction: N = 4n^2 + 8n + 2, max degree 3,
/// bipartite. Input edges are absent until the first pair is applied.
pub fn build_matching_const(n: usize, m: &BitMatrix) -> Result<(DynamicGraph, MatchingLayout)> {
    if n < 1 || m.n() != n {
        return Err(Error::DimensionMismatch(format!("n={n} with {}x{0} matrix", m.n())));
    }
    let geom = Geometry { odd: n, rows: n, cols: n };
    let (mut g, layout) = build_skeleton(n, geom, MatchingVariant::Const, 0)?;
    debug_assert_eq!(layout.expected_nodes, 4 * n * n + 8 * n + 2);
    for (i, j) in m.iter_ones() {
        g.insert_edge(layout.l4(i, j), layout.r4(j, i))?;
    }
    g.clear_log();
    Ok((g, layout))
}

/// ceil(x * cols / n): compresses matrix index x into a leaf column.
fn compress(x: usize, cols: usize, n: usize) -> usize {
    (x * cols).div_ceil(n)
}

/// Varying-degree matching reduction: subgadgets shrink to
/// ~n^((1-t)/(1+t)) columns and matrix edges share leaves, bounding the
/// maximum degree by ~n^(2t/(1+t)).
pub fn build_matching_varying(
    n: usize,
    t: f64,
    m: &BitMatrix,
) -> Result<(DynamicGraph, MatchingLayout)> {
    if n < 1 || m.n() != n {
        return Err(Error::DimensionMismatch(format!("n={n} with {}x{0} matrix", m.n())));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParam(format!("t must lie in [0,1], got {t}")));
    }
    let raw = (n as f64).powf((1.0 - t) / (1.0 + t));
    let cols = (raw - 1e-9).ceil().max(1.0) as usize;
    let rounded = (cols as f64 - raw).abs() > 1e-9;
    let geom = Geometry { odd: n, rows: n, cols };
    let (mut g, layout) =
        build_skeleton(n, geom, MatchingVariant::Varying { t, cols, rounded }, 0)?;
    for (i, j) in m.iter_ones() {
        let a = layout.l4(i, compress(j, cols, n));
        let b = layout.r4(j, compress(i, cols, n));
        if !g.has_edge(a, b) {
            g.insert_edge(a, b)?;
        }
    }
    g.clear_log();
    Ok((g, layout))
}

/// Replaces the input-dependent edges for the const and varying variants:
/// deletes all current L2xL3 / R2xR3 edges, then inserts edges for the new
/// pair. At most 4n updates.
pub fn apply_pair_matching(
    g: &mut DynamicGraph,
    layout: &MatchingLayout,
    u: &BitVector,
    v: &BitVector,
) -> Result<usize> {
    match layout.variant {
        MatchingVariant::Const | MatchingVariant::Varying { .. } => {}
        _ => return Err(Error::InvalidParam("apply_pair_matching needs const or varying".into())),
    }
    let n = layout.n;
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!("pair dimension != {n}")));
    }
    let mut ops = 0;
    for i in 1..=n {
        if g.has_edge(layout.l2(i), layout.l3(i, 0)) {
            g.delete_edge(layout.l2(i), layout.l3(i, 0))?;
            ops += 1;
        }
        if g.has_edge(layout.r2(i), layout.r3(i, 0)) {
            g.delete_edge(layout.r2(i), layout.r3(i, 0))?;
            ops += 1;
        }
    }
    for i in u.iter_ones() {
        g.insert_edge(layout.l2(i), layout.l3(i, 0))?;
        ops += 1;
    }
    for j in v.iter_ones() {
        g.insert_edge(layout.r2(j), layout.r3(j, 0))?;
        ops += 1;
    }
    Ok(ops)
}

/// Fast decision: the base matching has size N/2 - 1, so the maximum matching
/// is N/2 exactly when an augmenting path joins L2[0] to R2[0].
pub fn decide_matching(g: &DynamicGraph, layout: &MatchingLayout) -> Result<bool> {
    augmenting_path_exists(g, &layout.base, layout.s, layout.t)
}

/// Slow cross-check: full maximum matching recomputation.
pub fn decide_matching_slow(g: &DynamicGraph, layout: &MatchingLayout) -> bool {
    2 * max_matching_size(g) == layout.expected_nodes
}

fn derived_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x100000001B3).wrapping_add(salt).wrapping_mul(0xD1B54A32D192ED03)
}

/// Expander matching reduction. The input is augmented to dimension 2n so
/// that at least 3n^2 matrix edges always cross the cut; degree-4 expanders
/// are overlaid on L2, L4, R2, R4; every L2[i]/R2[i] keeps one input edge at
/// all times (to X3[i,0] on bit 1, to X4[i,0] on bit 0).
/// N = 16n^2 + 16n + 2.
pub fn build_matching_expander(
    n: usize,
    m: &BitMatrix,
    seed: u64,
) -> Result<(DynamicGraph, MatchingLayout, ExpansionCertificate)> {
    if n < 1 || m.n() != n {
        return Err(Error::DimensionMismatch(format!("n={n} with {}x{0} matrix", m.n())));
    }
    let dd = 2 * n;
    let geom = Geometry { odd: dd, rows: dd, cols: dd };
    let (mut g, mut layout) = build_skeleton(n, geom, MatchingVariant::Expander, 0)?;
    debug_assert_eq!(layout.expected_nodes, 16 * n * n + 16 * n + 2);
    let (_, mh, _) = augment_instance(&BitVector::zeros(n), m, &BitVector::zeros(n))?;
    for (i, j) in mh.iter_ones() {
        g.insert_edge(layout.l4(i, j), layout.r4(j, i))?;
    }
    // Zero-state input edges keep the graph connected from the start.
    let zero = BitVector::zeros(dd);
    for i in 1..=dd {
        g.insert_edge(layout.l2(i), layout.l4(i, 0))?;
        g.insert_edge(layout.r2(i), layout.r4(i, 0))?;
    }
    layout.current_u = Some(zero.clone());
    layout.current_v = Some(zero);
    // Expander overlays, one per reinforced gadget.
    let mut overlay = Vec::new();
    {
        let l2_targets: Vec<NodeId> = (0..=dd).map(|i| layout.l2(i)).collect();
        let r2_targets: Vec<NodeId> = (0..=dd).map(|i| layout.r2(i)).collect();
        let mut l4_targets = Vec::with_capacity(dd * (dd + 1));
        let mut r4_targets = Vec::with_capacity(dd * (dd + 1));
        for i in 1..=dd {
            for j in 0..=dd {
                l4_targets.push(layout.l4(i, j));
                r4_targets.push(layout.r4(i, j));
            }
        }
        for (salt, targets) in
            [(1, &l2_targets), (2, &l4_targets), (3, &r2_targets), (4, &r4_targets)]
        {
            let spec = ExpanderSpec::new(targets.len(), derived_seed(seed, salt));
            let (ex, _) = build_expander(&spec)?;
            let ops = overlay_expander(&mut g, targets, &ex, OverlayMode::Direct)?;
            overlay.extend(ops.iter().map(|op| op.endpoints()));
        }
    }
    layout.overlay_edges = overlay;
    let cert = crate::graph::expansion_lower_bound_spectral(&g);
    g.clear_log();
    Ok((g, layout, cert))
}

/// Input swap for the expander variant: all new edges are inserted before any
/// stale edge is deleted, so the graph never loses connectivity mid-pair.
pub fn apply_pair_matching_expander(
    g: &mut DynamicGraph,
    layout: &mut MatchingLayout,
    u: &BitVector,
    v: &BitVector,
) -> Result<usize> {
    if !matches!(layout.variant, MatchingVariant::Expander) {
        return Err(Error::InvalidParam("expander variant required".into()));
    }
    let n = layout.n;
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!("pair dimension != {n}")));
    }
    let dd = 2 * n;
    let uh = u.zero_padded(n);
    let vh = v.zero_padded(n);
    let cur_u = layout.current_u.take().expect("expander layout carries state");
    let cur_v = layout.current_v.take().expect("expander layout carries state");
    let mut ops = 0;
    let target = |layout: &MatchingLayout, left: bool, i: usize, bit: bool| {
        match (left, bit) {
            (true, true) => layout.l3(i, 0),
            (true, false) => layout.l4(i, 0),
            (false, true) => layout.r3(i, 0),
            (false, false) => layout.r4(i, 0),
        }
    };
    // Insert phase.
    for i in 1..=dd {
        if uh.get(i) != cur_u.get(i) {
            g.insert_edge(layout.l2(i), target(layout, true, i, uh.get(i)))?;
            ops += 1;
        }
        if vh.get(i) != cur_v.get(i) {
            g.insert_edge(layout.r2(i), target(layout, false, i, vh.get(i)))?;
            ops += 1;
        }
    }
    // Delete phase.
    for i in 1..=dd {
        if uh.get(i) != cur_u.get(i) {
            g.delete_edge(layout.l2(i), target(layout, true, i, cur_u.get(i)))?;
            ops += 1;
        }
        if vh.get(i) != cur_v.get(i) {
            g.delete_edge(layout.r2(i), target(layout, false, i, cur_v.get(i)))?;
            ops += 1;
        }
    }
    layout.current_u = Some(uh);
    layout.current_v = Some(vh);
    Ok(ops)
}

/// Power-law matching reduction state: the reduction embedded as one
/// component of a power-law host, the precomputed rewire pairs that
/// compensate input-edge degree changes, and the filler matching sizes
/// m_0..m_2n.
pub struct PowerLawMatchingState {
    pub graph: DynamicGraph,
    pub layout: MatchingLayout,
    pub host_alpha: f64,
    pub beta: f64,
    /// (a_i, b_i, c_i, d_i): deg-2 node, deg-3 node, and their neighbors.
    pub rewires: Vec<(NodeId, NodeId, NodeId, NodeId)>,
    /// m_j = maximum matching of the filler after j rewires.
    pub filler_matching: Vec<usize>,
    /// Nodes of the embedded reduction (ids 0..reduction_nodes).
    pub reduction_nodes: usize,
    /// Filler nodes whose degree deviates from the exact power-law target.
    pub filler_deviations: usize,
    pending: Vec<UpdateOp>,
    pending_k: usize,
}

impl PowerLawMatchingState {
    /// Expected total matching size when the current pair multiplies to 1.
    pub fn perfect_size(&self) -> usize {
        self.filler_matching[self.pending_k] + self.reduction_nodes / 2
    }

    pub fn decide_from(&self, matching_size: usize) -> bool {
        matching_size == self.perfect_size()
    }

    /// Applies input edges and the k compensating rewires. Returns the ops.
    pub fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        if !self.pending.is_empty() {
            return Err(Error::InvalidParam("previous pair not rolled back".into()));
        }
        let n = self.layout.n;
        if u.len() != n || v.len() != n {
            return Err(Error::DimensionMismatch(format!("pair dimension != {n}")));
        }
        let mut ops = Vec::new();
        for i in u.iter_ones() {
            ops.push(UpdateOp::Insert(self.layout.l2(i), self.layout.l3(i, 0)));
        }
        for j in v.iter_ones() {
            ops.push(UpdateOp::Insert(self.layout.r2(j), self.layout.r3(j, 0)));
        }
        let k = u.support() + v.support();
        for &(a, b, c, d) in self.rewires.iter().take(k) {
            ops.push(UpdateOp::Delete(a, c));
            ops.push(UpdateOp::Delete(b, d));
            ops.push(UpdateOp::Insert(c, d));
        }
        for &op in &ops {
            self.graph.apply(op)?;
        }
        self.pending = ops.clone();
        self.pending_k = k;
        Ok(ops)
    }

    /// Rolls the graph back to its pre-pair state. Returns the ops.
    pub fn rollback(&mut self) -> Result<Vec<UpdateOp>> {
        let ops: Vec<UpdateOp> = self.pending.iter().rev().map(|op| op.inverse()).collect();
        for &op in &ops {
            self.graph.apply(op)?;
        }
        self.pending.clear();
        self.pending_k = 0;
        Ok(ops)
    }
}

/// Builds the host, embeds the reduction, selects the rewire pairs and
/// precomputes the filler matching sizes.
///
/// The degree table of the embedded left side matches the construction's
/// documented inventory exactly: L1 all degree 2; L2 one degree-1 node and n
/// degree-2 nodes; L3 2n degree-1 and 2n^2 degree-2; L4 2n degree-2 and 2n^2
/// degree-3. Two devices make this realisable: the leaf-column-`n` ends of
/// the even subgadgets are paired up within each side, and a two-node tail
/// hangs off L2[n]. Both only ever produce alternating-path dead ends, so the
/// matching dichotomy is untouched.
pub fn build_matching_powerlaw(
    n: usize,
    beta: f64,
    seed: u64,
    m: &BitMatrix,
) -> Result<PowerLawMatchingState> {
    if n < 1 || m.n() != n {
        return Err(Error::DimensionMismatch(format!("n={n} with {}x{0} matrix", m.n())));
    }
    if beta <= 2.0 {
        return Err(Error::InvalidParam(format!("beta must exceed 2, got {beta}")));
    }
    let geom = Geometry { odd: n, rows: 2 * n, cols: n };
    let (mut g, mut layout) =
        build_skeleton(n, geom, MatchingVariant::PowerLaw { beta }, 4)?;
    let reduction_nodes = layout.expected_nodes;
    let per_side2 = 2 * layout.per_side as NodeId;
    let tail = [per_side2, per_side2 + 1, per_side2 + 2, per_side2 + 3];
    layout.tail = Some(tail);
    // Matrix edges: bit (i,j) wires subgadget pairs (i, j) and (n+i, n+j) when
    // set, and the crossed pairs otherwise, so every leaf column 1..n carries
    // exactly one matrix edge for every input.
    for i in 1..=n {
        for j in 1..=n {
            if m.get(i, j) {
                g.insert_edge(layout.l4(i, j), layout.r4(j, i))?;
                g.insert_edge(layout.l4(n + i, j), layout.r4(n + j, i))?;
            } else {
                g.insert_edge(layout.l4(i, j), layout.r4(n + j, i))?;
                g.insert_edge(layout.l4(n + i, j), layout.r4(j, i))?;
            }
        }
    }
    // Pair up the leaf-column-n path ends within each side.
    for k in 1..=n {
        g.insert_edge(layout.l4(2 * k - 1, n), layout.l4(2 * k, n))?;
        g.insert_edge(layout.r4(2 * k - 1, n), layout.r4(2 * k, n))?;
    }
    // Tails raise L2[n]/R2[n] to degree 2.
    g.insert_edge(layout.l2(n), tail[0])?;
    g.insert_edge(tail[0], tail[1])?;
    g.insert_edge(layout.r2(n), tail[2])?;
    g.insert_edge(tail[2], tail[3])?;
    layout.base.pair(tail[0], tail[1]);
    layout.base.pair(tail[2], tail[3]);

    // Host sizing: reserve room for the 2n rewire pairs on top of the
    // reduction's own degree classes.
    let hist = g.degree_histogram();
    let mut reserve = std::collections::BTreeMap::new();
    reserve.insert(2, 6 * n + 6);
    reserve.insert(3, 8 * n + 8);
    let plan: HostPlan = plan_host(beta, &hist, &reserve)?;
    let filler_count = plan.total_nodes - reduction_nodes;
    // Re-create the graph at full host size; reduction ids are unchanged.
    let mut host = DynamicGraph::new(plan.total_nodes);
    for (a, b) in g.edges() {
        host.insert_edge(a, b)?;
    }
    let facts = build_filler(
        &mut host,
        &plan,
        &hist,
        reduction_nodes as NodeId,
        FillerStyle::Compact,
    )?;
    // Rewire tuples: a_i/c_i adjacent on the filler degree-2 cycle, spaced so
    // tuples stay disjoint; b_i/d_i adjacent in the cubic circulant.
    if facts.deg2_cycle.len() < 6 * n + 2 || facts.deg3_nodes.len() < 8 * n + 2 {
        return Err(Error::GenerationFailed(format!(
            "host too small to free rewire classes; need at least {} more nodes",
            plan.total_nodes + 14 * n
        )));
    }
    let mut rewires = Vec::with_capacity(2 * n);
    for i in 0..2 * n {
        let a = facts.deg2_cycle[3 * i];
        let c = facts.deg2_cycle[3 * i + 1];
        let b = facts.deg3_nodes[4 * i];
        let d = facts.deg3_nodes[4 * i + 1];
        debug_assert!(host.has_edge(a, c) && host.has_edge(b, d) && !host.has_edge(c, d));
        rewires.push((a, b, c, d));
    }
    // Filler matching sizes m_0..m_2n, by the exact solver on the filler only.
    let mut filler = DynamicGraph::new(filler_count);
    let base = reduction_nodes as NodeId;
    for (a, b) in host.edges() {
        if a >= base && b >= base {
            filler.insert_edge(a - base, b - base)?;
        }
    }
    let mut filler_matching = Vec::with_capacity(2 * n + 1);
    filler_matching.push(max_matching_size(&filler));
    for &(a, b, c, d) in &rewires {
        filler.delete_edge(a - base, c - base)?;
        filler.delete_edge(b - base, d - base)?;
        filler.insert_edge(c - base, d - base)?;
        filler_matching.push(max_matching_size(&filler));
    }
    let _ = seed; // generation is fully deterministic; kept for interface stability
    host.clear_log();
    Ok(PowerLawMatchingState {
        graph: host,
        layout,
        host_alpha: plan.alpha,
        beta,
        rewires,
        filler_matching,
        reduction_nodes,
        filler_deviations: facts.deviations,
        pending: Vec::new(),
        pending_k: 0,
    })
}

/// One full round: apply the pair, query the exact solver, decode, roll back.
pub fn apply_and_decide_powerlaw_matching(
    state: &mut PowerLawMatchingState,
    u: &BitVector,
    v: &BitVector,
) -> Result<(bool, usize)> {
    let ops = state.apply_pair(u, v)?;
    let size = max_matching_size(&state.graph);
    let bit = state.decide_from(size);
    let rollback = state.rollback()?;
    Ok((bit, ops.len() + rollback.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_bipartite, is_connected};
    use crate::oumv::{generate_instance, vmv, GenMode};

    fn all_matrices(n: usize) -> Vec<BitMatrix> {
        let cells = n * n;
        (0..1u32 << cells)
            .map(|bits| {
                let mut m = BitMatrix::zeros(n);
                for k in 0..cells {
                    if bits >> k & 1 == 1 {
                        m.set(k / n + 1, k % n + 1, true);
                    }
                }
                m
            })
            .collect()
    }

    fn all_vectors(n: usize) -> Vec<BitVector> {
        (0..1u32 << n)
            .map(|bits| {
                let mut v = BitVector::zeros(n);
                for k in 0..n {
                    if bits >> k & 1 == 1 {
                        v.set(k + 1, true);
                    }
                }
                v
            })
            .collect()
    }

    #[test]
    fn const_node_count_formula() {
        for n in [1usize, 2, 3, 5] {
            let (g, layout) = build_matching_const(n, &BitMatrix::zeros(n)).unwrap();
            assert_eq!(g.node_count(), 4 * n * n + 8 * n + 2);
            assert_eq!(layout.expected_nodes, g.node_count());
        }
    }

    #[test]
    fn const_base_matching_is_maximum_without_cross_edges() {
        let n = 3;
        let inst = generate_instance(n, GenMode::Uniform, 5).unwrap();
        let (g, layout) = build_matching_const(n, &inst.matrix).unwrap();
        layout.base.validate(&g).unwrap();
        assert_eq!(layout.base.size(), g.node_count() / 2 - 1);
        assert_eq!(max_matching_size(&g), g.node_count() / 2 - 1);
    }

    #[test]
    fn const_bipartite_and_degree_three() {
        let n = 8;
        let inst = generate_instance(n, GenMode::Uniform, 9).unwrap();
        let (mut g, layout) = build_matching_const(n, &inst.matrix).unwrap();
        for (u, v) in &inst.pairs {
            apply_pair_matching(&mut g, &layout, u, v).unwrap();
            assert!(is_bipartite(&g).is_some());
            let (max_deg, _) = g.degree_stats();
            assert!(max_deg <= 3, "degree {max_deg} exceeds 3");
        }
    }

    #[test]
    fn const_exhaustive_n2_decode_equals_oracle() {
        for m in all_matrices(2) {
            let (mut g, layout) = build_matching_const(2, &m).unwrap();
            for u in all_vectors(2) {
                for v in all_vectors(2) {
                    apply_pair_matching(&mut g, &layout, &u, &v).unwrap();
                    let fast = decide_matching(&g, &layout).unwrap();
                    let slow = decide_matching_slow(&g, &layout);
                    let oracle = vmv(&u, &m, &v).unwrap();
                    assert_eq!(fast, oracle);
                    assert_eq!(slow, oracle);
                }
            }
        }
    }

    #[test]
    fn const_update_counts() {
        let n = 4;
        let (mut g, layout) = build_matching_const(n, &BitMatrix::zeros(n)).unwrap();
        let zero = BitVector::zeros(n);
        let ones = BitVector::ones(n);
        assert_eq!(apply_pair_matching(&mut g, &layout, &zero, &zero).unwrap(), 0);
        assert_eq!(apply_pair_matching(&mut g, &layout, &ones, &ones).unwrap(), 2 * n);
        assert_eq!(apply_pair_matching(&mut g, &layout, &zero, &zero).unwrap(), 2 * n);
    }

    #[test]
    fn const_u_edge_set_matches_support() {
        let n = 4;
        let inst = generate_instance(n, GenMode::Uniform, 77).unwrap();
        let (mut g, layout) = build_matching_const(n, &inst.matrix).unwrap();
        for (u, v) in &inst.pairs {
            apply_pair_matching(&mut g, &layout, u, v).unwrap();
            for i in 1..=n {
                assert_eq!(g.has_edge(layout.l2(i), layout.l3(i, 0)), u.get(i));
                assert_eq!(g.has_edge(layout.r2(i), layout.r3(i, 0)), v.get(i));
            }
        }
    }

    #[test]
    fn varying_t0_isomorphic_to_const() {
        let n = 4;
        let inst = generate_instance(n, GenMode::Uniform, 3).unwrap();
        let (gc, _) = build_matching_const(n, &inst.matrix).unwrap();
        let (gv, layout) = build_matching_varying(n, 0.0, &inst.matrix).unwrap();
        assert_eq!(layout.cols(), n);
        assert!(gc.same_adjacency(&gv));
    }

    #[test]
    fn varying_decode_matches_oracle() {
        for (n, t) in [(4usize, 0.5f64), (4, 1.0), (8, 0.5)] {
            let inst = generate_instance(n, GenMode::Uniform, 21).unwrap();
            let (mut g, layout) = build_matching_varying(n, t, &inst.matrix).unwrap();
            for (k, (u, v)) in inst.pairs.iter().enumerate() {
                apply_pair_matching(&mut g, &layout, u, v).unwrap();
                assert_eq!(
                    decide_matching(&g, &layout).unwrap(),
                    inst.truth[k],
                    "n={n} t={t} pair {k}"
                );
            }
        }
    }

    #[test]
    fn varying_degree_bound() {
        // Max degree <= c * n^(2t/(1+t)) with a small constant.
        for (n, t) in [(4usize, 0.5f64), (16, 0.5), (16, 1.0)] {
            let inst = generate_instance(n, GenMode::Uniform, 2).unwrap();
            let (g, _) = build_matching_varying(n, t, &inst.matrix).unwrap();
            let (max_deg, _) = g.degree_stats();
            let bound = (n as f64).powf(2.0 * t / (1.0 + t));
            assert!(
                (max_deg as f64) <= 3.0 * bound + 3.0,
                "n={n} t={t}: degree {max_deg} vs bound {bound}"
            );
        }
    }

    #[test]
    fn expander_node_count_and_cert() {
        let (g, layout, cert) = build_matching_expander(2, &BitMatrix::zeros(2), 1).unwrap();
        assert_eq!(g.node_count(), 16 * 4 + 16 * 2 + 2);
        assert_eq!(layout.expected_nodes, 98);
        assert!(cert.value_f64() > 0.0);
        assert!(is_connected(&g));
    }

    #[test]
    fn expander_exhaustive_n2_decode_equals_oracle() {
        for m in all_matrices(2) {
            let (mut g, mut layout, _) = build_matching_expander(2, &m, 7).unwrap();
            for u in all_vectors(2) {
                for v in all_vectors(2) {
                    apply_pair_matching_expander(&mut g, &mut layout, &u, &v).unwrap();
                    let got = decide_matching(&g, &layout).unwrap();
                    let oracle = vmv(&u, &m, &v).unwrap();
                    assert_eq!(got, oracle);
                }
            }
        }
    }

    #[test]
    fn expander_apply_is_idempotent_and_insert_first() {
        let n = 2;
        let inst = generate_instance(n, GenMode::Uniform, 4).unwrap();
        let (mut g, mut layout, _) = build_matching_expander(n, &inst.matrix, 2).unwrap();
        let (u, v) = &inst.pairs[0];
        apply_pair_matching_expander(&mut g, &mut layout, u, v).unwrap();
        let second = apply_pair_matching_expander(&mut g, &mut layout, u, v).unwrap();
        assert_eq!(second, 0);
        // Full flip: all-ones to all-zeros touches every augmented column
        // with one insert and one delete (2 * 2n per side pair).
        let ones = BitVector::ones(n);
        let zero = BitVector::zeros(n);
        apply_pair_matching_expander(&mut g, &mut layout, &ones, &ones).unwrap();
        let flip = apply_pair_matching_expander(&mut g, &mut layout, &zero, &zero).unwrap();
        assert_eq!(flip, 4 * n);
    }

    #[test]
    fn expander_connected_after_every_op() {
        let n = 2;
        let inst = generate_instance(n, GenMode::Uniform, 13).unwrap();
        let (mut g, mut layout, _) = build_matching_expander(n, &inst.matrix, 3).unwrap();
        for (u, v) in inst.pairs.iter().take(3) {
            // Replay the pair op by op on a scratch graph, probing connectivity.
            let mut scratch = g.clone();
            scratch.clear_log();
            apply_pair_matching_expander(&mut g, &mut layout, u, v).unwrap();
            let ops: Vec<_> = g.update_log().to_vec();
            g.clear_log();
            for op in ops {
                scratch.apply(op).unwrap();
                assert!(is_connected(&scratch), "connectivity lost mid-pair");
            }
        }
    }

    #[test]
    fn expander_decode_invariant_under_overlay_strip() {
        let n = 2;
        let inst = generate_instance(n, GenMode::Uniform, 31).unwrap();
        let (mut g, mut layout, _) = build_matching_expander(n, &inst.matrix, 5).unwrap();
        for (k, (u, v)) in inst.pairs.iter().enumerate() {
            apply_pair_matching_expander(&mut g, &mut layout, u, v).unwrap();
            let with_overlay = decide_matching(&g, &layout).unwrap();
            let mut stripped = g.clone();
            for &(a, b) in &layout.overlay_edges {
                stripped.delete_edge(a, b).unwrap();
            }
            let without = decide_matching(&stripped, &layout).unwrap();
            assert_eq!(with_overlay, without);
            assert_eq!(with_overlay, inst.truth[k]);
        }
    }

    #[test]
    fn matching_dichotomy_across_variants() {
        let n = 3;
        let inst = generate_instance(n, GenMode::Uniform, 8).unwrap();
        let (mut g, layout) = build_matching_const(n, &inst.matrix).unwrap();
        for (u, v) in &inst.pairs {
            apply_pair_matching(&mut g, &layout, u, v).unwrap();
            let size = max_matching_size(&g);
            let half = g.node_count() / 2;
            assert!(size == half || size == half - 1);
        }
    }

    #[test]
    fn powerlaw_degree_table_and_decode() {
        let n = 2;
        let inst = generate_instance(n, GenMode::Uniform, 17).unwrap();
        let mut state = build_matching_powerlaw(n, 3.0, 11, &inst.matrix).unwrap();
        let layout = state.layout.clone();
        // Left-side degree table, row for row.
        let row = |nodes: Vec<NodeId>| {
            let mut hist = std::collections::BTreeMap::new();
            for v in nodes {
                *hist.entry(state.graph.degree(v) as u32).or_insert(0usize) += 1;
            }
            hist
        };
        let l1_row = row((1..=n).map(|i| layout.l1(i)).collect());
        assert_eq!(l1_row, [(2u32, n)].into_iter().collect());
        let l2_row = row((0..=n).map(|i| layout.l2(i)).collect());
        assert_eq!(l2_row, [(1u32, 1usize), (2, n)].into_iter().collect());
        let l3_row = row(
            (1..=2 * n).flat_map(|i| (0..=n).map(move |j| (i, j))).map(|(i, j)| layout.l3(i, j)).collect(),
        );
        assert_eq!(l3_row, [(1u32, 2 * n), (2, 2 * n * n)].into_iter().collect());
        let l4_row = row(
            (1..=2 * n).flat_map(|i| (0..=n).map(move |j| (i, j))).map(|(i, j)| layout.l4(i, j)).collect(),
        );
        assert_eq!(l4_row, [(2u32, 2 * n), (3, 2 * n * n)].into_iter().collect());
        // Decode equals the oracle with rollback exactness.
        let before = state.graph.degree_histogram();
        for (k, (u, v)) in inst.pairs.iter().enumerate() {
            let (bit, _) = apply_and_decide_powerlaw_matching(&mut state, u, v).unwrap();
            assert_eq!(bit, inst.truth[k], "pair {k}");
            assert_eq!(state.graph.degree_histogram(), before, "rollback must be exact");
        }
    }

    #[test]
    fn powerlaw_decode_random_pairs() {
        let n = 2;
        for seed in [1u64, 2, 3] {
            let inst = generate_instance(n, GenMode::Uniform, seed).unwrap();
            let mut state = build_matching_powerlaw(n, 3.0, seed, &inst.matrix).unwrap();
            for (k, (u, v)) in inst.pairs.iter().enumerate() {
                let (bit, _) = apply_and_decide_powerlaw_matching(&mut state, u, v).unwrap();
                assert_eq!(bit, inst.truth[k], "seed {seed} pair {k}");
            }
        }
    }

    #[test]
    fn label_map_is_bijective() {
        let (_, layout) = build_matching_const(3, &BitMatrix::zeros(3)).unwrap();
        assert!(layout.label_map().is_bijective());
    }
}
