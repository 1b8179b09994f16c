//! (s,t)-distance reductions: binary forests replace high-degree nodes, and
//! the layering forces every s-t walk to have length at least layer(t), with
//! equality exactly when the current pair multiplies to 1.

use super::host::{build_filler, plan_host, FillerStyle};
use super::LabelMap;
use crate::error::{Error, Result};
use crate::expander::{build_expander, overlay_expander, ExpanderSpec, OverlayMode};
use crate::graph::{bfs_distance, DynamicGraph, ExpansionCertificate, NodeId};
use crate::oumv::{BitMatrix, BitVector};

#[derive(Debug, Clone)]
pub enum StVariant {
    Const,
    /// alpha = ceil(12/delta - 4); matrix edges become alpha*log(n)-node paths.
    Approx { delta: f64, alpha: usize },
    Varying { t: f64, depth: u32, rounded: bool },
    Expander,
    PowerLaw { beta: f64 },
}

/// Forest geometry and the layer function. `s` is the root of the left
/// single tree, `t` the root of the right one.
#[derive(Debug, Clone)]
pub struct ForestLayout {
    pub n: usize,
    pub log_n: u32,
    pub variant: StVariant,
    /// Trees in the L3/L4 forest per side (n, or 3n for the triple forests).
    trees: usize,
    /// Depth of the L3/L4 forest trees; leaves per tree = 2^depth.
    depth: u32,
    per_side: usize,
    pub expected_nodes: usize,
    pub s: NodeId,
    pub t: NodeId,
    /// Layer index per node; every edge connects consecutive layers.
    pub layer: Vec<u32>,
    /// Distance decoding 1 for exact variants; T1 for the approx variant.
    pub one_distance: Option<usize>,
    /// Minimum measured distance over planted-zero probes (approx only).
    pub zero_distance: Option<usize>,
    /// dist(s,t) <= cutoff decodes as 1.
    pub cutoff: Option<usize>,
    current_u: Option<BitVector>,
    current_v: Option<BitVector>,
    pub overlay_edges: Vec<(NodeId, NodeId)>,
    /// Approx variant: interior path nodes per matrix cell.
    path_len: usize,
}

fn log2_exact(n: usize) -> Result<u32> {
    if n >= 2 && n.is_power_of_two() {
        Ok(n.trailing_zeros())
    } else {
        Err(Error::InvalidParam(format!("n must be a power of two >= 2, got {n}")))
    }
}

impl ForestLayout {
    fn leaves(&self) -> usize {
        1usize << self.depth
    }
    fn tree_block(&self) -> usize {
        2 * self.leaves() - 1
    }
    /// Left single-tree node by heap index (1-based; root is heap 1).
    fn l_tree(&self, heap: usize) -> NodeId {
        (heap - 1) as NodeId
    }
    /// Public view of the left single tree by heap index.
    pub fn l_tree_node(&self, heap: usize) -> NodeId {
        self.l_tree(heap)
    }
    /// Internal node `heap` (1..leaves) of forest tree `tree`.
    pub fn forest_internal(&self, tree: usize, heap: usize) -> NodeId {
        debug_assert!(heap >= 1 && heap < self.leaves());
        self.forest_node(tree, heap)
    }
    pub fn l2(&self, i: usize) -> NodeId {
        debug_assert!(i >= 1 && i <= self.n);
        self.l_tree(self.n - 1 + i)
    }
    fn forest_node(&self, tree: usize, heap: usize) -> NodeId {
        debug_assert!(tree >= 1 && tree <= self.trees);
        ((2 * self.n - 1) + (tree - 1) * self.tree_block() + heap - 1) as NodeId
    }
    pub fn l3_root(&self, tree: usize) -> NodeId {
        self.forest_node(tree, 1)
    }
    pub fn l4(&self, tree: usize, j: usize) -> NodeId {
        debug_assert!(j >= 1 && j <= self.leaves());
        self.forest_node(tree, self.leaves() + j - 1)
    }
    pub fn r_tree(&self, heap: usize) -> NodeId {
        self.l_tree(heap) + self.per_side as NodeId
    }
    pub fn r2(&self, i: usize) -> NodeId {
        self.l2(i) + self.per_side as NodeId
    }
    pub fn r3_root(&self, tree: usize) -> NodeId {
        self.l3_root(tree) + self.per_side as NodeId
    }
    pub fn r4(&self, tree: usize, j: usize) -> NodeId {
        self.l4(tree, j) + self.per_side as NodeId
    }
    // Triple-forest views (expander and power-law variants).
    pub fn lu_root(&self, i: usize) -> NodeId {
        self.l3_root(i)
    }
    pub fn lm_root(&self, i: usize) -> NodeId {
        self.l3_root(self.n + i)
    }
    pub fn ll_root(&self, i: usize) -> NodeId {
        self.l3_root(2 * self.n + i)
    }
    pub fn lm(&self, i: usize, j: usize) -> NodeId {
        self.l4(self.n + i, j)
    }
    pub fn ll(&self, i: usize, j: usize) -> NodeId {
        self.l4(2 * self.n + i, j)
    }
    pub fn ru_root(&self, i: usize) -> NodeId {
        self.r3_root(i)
    }
    pub fn rm_root(&self, i: usize) -> NodeId {
        self.r3_root(self.n + i)
    }
    pub fn rm(&self, i: usize, j: usize) -> NodeId {
        self.r4(self.n + i, j)
    }
    pub fn rl(&self, i: usize, j: usize) -> NodeId {
        self.r4(2 * self.n + i, j)
    }
    /// Approx variant: k-th interior node (1-based) of the (i,j) matrix path.
    pub fn path_node(&self, i: usize, j: usize, k: usize) -> NodeId {
        debug_assert!(self.path_len > 0 && k >= 1 && k <= self.path_len);
        (2 * self.per_side + ((i - 1) * self.n + (j - 1)) * self.path_len + k - 1) as NodeId
    }

    pub fn label_map(&self) -> LabelMap {
        let mut map = LabelMap::with_capacity(self.expected_nodes);
        let triple = self.trees == 3 * self.n;
        let forest_name = |tree: usize| -> (String, usize) {
            if !triple {
                return ("3".into(), tree);
            }
            if tree <= self.n {
                ("U".into(), tree)
            } else if tree <= 2 * self.n {
                ("M".into(), tree - self.n)
            } else {
                ("L".into(), tree - 2 * self.n)
            }
        };
        for side in 0..2 {
            let (sn, off) = if side == 0 { ("L", 0) } else { ("R", self.per_side as NodeId) };
            for h in 1..self.n {
                map.set(self.l_tree(h) + off, format!("{sn}1[{h}]"));
            }
            for i in 1..=self.n {
                map.set(self.l2(i) + off, format!("{sn}2[{i}]"));
            }
            for tree in 1..=self.trees {
                let (block, idx) = forest_name(tree);
                let leaves = self.leaves();
                for h in 1..leaves {
                    map.set(self.forest_node(tree, h) + off, format!("{sn}{block}i[{idx},{h}]"));
                }
                for j in 1..=leaves {
                    map.set(
                        self.forest_node(tree, leaves + j - 1) + off,
                        format!("{sn}{block}[{idx},{j}]"),
                    );
                }
            }
        }
        let mut next = 2 * self.per_side as NodeId;
        if self.path_len > 0 {
            for i in 1..=self.n {
                for j in 1..=self.n {
                    for k in 1..=self.path_len {
                        map.set(next, format!("P[{i},{j},{k}]"));
                        next += 1;
                    }
                }
            }
        }
        for id in next..self.expected_nodes as NodeId {
            map.set(id, format!("D[{id}]"));
        }
        map
    }
}

/// Builds both sides' trees and forests, setting layers. Extra nodes (paths,
/// dummies) are appended after both sides and layered by the caller.
fn build_forests(
    n: usize,
    trees: usize,
    depth: u32,
    variant: StVariant,
    extra_nodes: usize,
    total_span: u32,
) -> Result<(DynamicGraph, ForestLayout)> {
    let log_n = log2_exact(n)?;
    let leaves = 1usize << depth;
    let per_side = (2 * n - 1) + trees * (2 * leaves - 1);
    let total = 2 * per_side + extra_nodes;
    let mut layout = ForestLayout {
        n,
        log_n,
        variant,
        trees,
        depth,
        per_side,
        expected_nodes: total,
        s: 0,
        t: per_side as NodeId,
        layer: vec![0; total],
        one_distance: None,
        zero_distance: None,
        cutoff: None,
        current_u: None,
        current_v: None,
        overlay_edges: Vec::new(),
        path_len: 0,
    };
    let mut g = DynamicGraph::new(total);
    let heap_depth = |h: usize| -> u32 { (h as u32).ilog2() };
    for side in 0..2 {
        let off = if side == 0 { 0 } else { per_side as NodeId };
        let layer_of = |raw: u32| -> u32 { if side == 0 { raw } else { total_span - raw } };
        // Single tree on 2n-1 heap slots.
        for h in 1..2 * n {
            let id = layout.l_tree(h) + off;
            layout.layer[id as usize] = layer_of(heap_depth(h));
            if h > 1 {
                g.insert_edge(layout.l_tree(h / 2) + off, id)?;
            }
        }
        // Forest trees.
        for tree in 1..=trees {
            for h in 1..2 * leaves {
                let id = layout.forest_node(tree, h) + off;
                layout.layer[id as usize] = layer_of(log_n + 1 + heap_depth(h));
                if h > 1 {
                    g.insert_edge(layout.forest_node(tree, h / 2) + off, id)?;
                }
            }
        }
    }
    Ok((g, layout))
}

/// Constant-degree (s,t)-distance reduction: N = 4n^2 + 2n - 2, bipartite,
/// max degree 3. uMv = 1 iff dist(s,t) = 4 log n + 3.
pub fn build_st_const(n: usize, m: &BitMatrix) -> Result<(DynamicGraph, ForestLayout)> {
    let log_n = log2_exact(n)?;
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    let span = 4 * log_n + 3;
    let (mut g, mut layout) = build_forests(n, n, log_n, StVariant::Const, 0, span)?;
    debug_assert_eq!(layout.expected_nodes, 4 * n * n + 2 * n - 2);
    for (i, j) in m.iter_ones() {
        g.insert_edge(layout.l4(i, j), layout.r4(j, i))?;
    }
    layout.one_distance = Some(span as usize);
    layout.cutoff = Some(span as usize);
    g.clear_log();
    Ok((g, layout))
}

/// Replaces the u/v root edges for the const, approx and varying variants.
pub fn apply_pair_st(
    g: &mut DynamicGraph,
    layout: &ForestLayout,
    u: &BitVector,
    v: &BitVector,
) -> Result<usize> {
    match layout.variant {
        StVariant::Const | StVariant::Approx { .. } | StVariant::Varying { .. } => {}
        _ => return Err(Error::InvalidParam("apply_pair_st needs const/approx/varying".into())),
    }
    let n = layout.n;
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!("pair dimension != {n}")));
    }
    let mut ops = 0;
    for i in 1..=n {
        if g.has_edge(layout.l2(i), layout.l3_root(i)) {
            g.delete_edge(layout.l2(i), layout.l3_root(i))?;
            ops += 1;
        }
        if g.has_edge(layout.r2(i), layout.r3_root(i)) {
            g.delete_edge(layout.r2(i), layout.r3_root(i))?;
            ops += 1;
        }
    }
    for i in u.iter_ones() {
        g.insert_edge(layout.l2(i), layout.l3_root(i))?;
        ops += 1;
    }
    for j in v.iter_ones() {
        g.insert_edge(layout.r2(j), layout.r3_root(j))?;
        ops += 1;
    }
    Ok(ops)
}

/// Decision rule from a measured distance. Exact variants demand equality
/// with the layer of t (the layering forces dist >= layer(t), so equality and
/// <= coincide for honest answers, and equality also rejects faulty answers
/// below the floor). The approx variant compares against the measured
/// midpoint cutoff.
pub fn decide_st_from(layout: &ForestLayout, dist: Option<usize>) -> bool {
    match layout.variant {
        StVariant::Approx { .. } => match (dist, layout.cutoff) {
            (Some(d), Some(c)) => d <= c,
            _ => false,
        },
        _ => dist.is_some() && dist == layout.one_distance,
    }
}

/// 1 iff the current (s,t)-distance decodes to 1.
pub fn decide_st(g: &DynamicGraph, layout: &ForestLayout) -> bool {
    decide_st_from(layout, bfs_distance(g, layout.s, layout.t))
}

/// (3-delta)-approximation gap construction: each set matrix bit becomes a
/// path of alpha*log(n) interior nodes, so zero instances need three path
/// traversals. T1 and T0 are measured from planted probes at build time.
pub fn build_st_approx(
    n: usize,
    delta: f64,
    m: &BitMatrix,
) -> Result<(DynamicGraph, ForestLayout)> {
    let log_n = log2_exact(n)?;
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    if !(delta > 0.0 && delta < 3.0) {
        return Err(Error::InvalidParam(format!("delta must lie in (0,3), got {delta}")));
    }
    let alpha = (12.0 / delta - 4.0).ceil().max(1.0) as usize;
    let path_len = alpha * log_n as usize;
    let span = (4 + alpha as u32) * log_n + 3;
    let (mut g, mut layout) = build_forests(
        n,
        n,
        log_n,
        StVariant::Approx { delta, alpha },
        n * n * path_len,
        span,
    )?;
    layout.path_len = path_len;
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=path_len {
                let id = layout.path_node(i, j, k);
                layout.layer[id as usize] = 2 * log_n + 1 + k as u32;
            }
            if m.get(i, j) {
                g.insert_edge(layout.l4(i, j), layout.path_node(i, j, 1))?;
                for k in 1..path_len {
                    g.insert_edge(layout.path_node(i, j, k), layout.path_node(i, j, k + 1))?;
                }
                g.insert_edge(layout.path_node(i, j, path_len), layout.r4(j, i))?;
            }
        }
    }
    measure_approx_thresholds(&mut g, &mut layout, m)?;
    g.clear_log();
    Ok((g, layout))
}

/// T1 from a planted-one probe; T0 as the minimum over planted-zero probes,
/// including maximal-support zero pairs per row and column.
fn measure_approx_thresholds(
    g: &mut DynamicGraph,
    layout: &mut ForestLayout,
    m: &BitMatrix,
) -> Result<()> {
    let n = layout.n;
    let probe = |g: &mut DynamicGraph, u: &BitVector, v: &BitVector| -> Result<Option<usize>> {
        apply_pair_st(g, layout, u, v)?;
        let d = bfs_distance(g, layout.s, layout.t);
        apply_pair_st(g, layout, &BitVector::zeros(n), &BitVector::zeros(n))?;
        Ok(d)
    };
    let mut one = None;
    'outer: for i in 1..=n {
        for j in 1..=n {
            if m.get(i, j) {
                one = probe(g, &BitVector::unit(n, i), &BitVector::unit(n, j))?;
                break 'outer;
            }
        }
    }
    let mut zero: Option<usize> = None;
    let mut consider = |d: Option<usize>| {
        if let Some(d) = d {
            zero = Some(zero.map_or(d, |z| z.min(d)));
        }
    };
    for i in 1..=n {
        // Maximal v keeping the product 0 for u = e_i.
        let mut v = BitVector::zeros(n);
        for j in 1..=n {
            if !m.get(i, j) {
                v.set(j, true);
            }
        }
        if v.support() > 0 {
            consider(probe(g, &BitVector::unit(n, i), &v)?);
        }
        let mut u = BitVector::zeros(n);
        for j in 1..=n {
            if !m.get(j, i) {
                u.set(j, true);
            }
        }
        if u.support() > 0 {
            consider(probe(g, &u, &BitVector::unit(n, i))?);
        }
    }
    layout.one_distance = one;
    layout.zero_distance = zero;
    layout.cutoff = match (one, zero) {
        (Some(t1), Some(t0)) => Some((t1 + t0) / 2),
        (Some(t1), None) => Some(t1),
        _ => None,
    };
    Ok(())
}

/// Varying-degree reduction: forest depth shrinks to
/// ceil(log(n) * (1-t)/(1+t)) and matrix edges share leaves.
pub fn build_st_varying(n: usize, t: f64, m: &BitMatrix) -> Result<(DynamicGraph, ForestLayout)> {
    let log_n = log2_exact(n)?;
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParam(format!("t must lie in [0,1], got {t}")));
    }
    let raw = log_n as f64 * (1.0 - t) / (1.0 + t);
    let depth = (raw - 1e-9).ceil().max(0.0) as u32;
    let rounded = (depth as f64 - raw).abs() > 1e-9;
    let span = 2 * log_n + 2 * depth + 3;
    let (mut g, mut layout) =
        build_forests(n, n, depth, StVariant::Varying { t, depth, rounded }, 0, span)?;
    let q = 1usize << depth;
    for (i, j) in m.iter_ones() {
        let a = layout.l4(i, (j * q).div_ceil(n));
        let b = layout.r4(j, (i * q).div_ceil(n));
        if !g.has_edge(a, b) {
            g.insert_edge(a, b)?;
        }
    }
    layout.one_distance = Some(span as usize);
    layout.cutoff = Some(span as usize);
    g.clear_log();
    Ok((g, layout))
}

fn derived_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x100000001B3).wrapping_add(salt).wrapping_mul(0xD1B54A32D192ED03)
}

/// Expander reduction: triple forests (LU, LM, LL per side), complement
/// matrix edges so the cut never thins out, and reinforced-forest expanders
/// on the leaves with one dummy node per expander edge (keeping the graph
/// bipartite). Every L2[i]/R2[i] holds exactly one root edge at all times.
pub fn build_st_expander(
    n: usize,
    m: &BitMatrix,
    seed: u64,
) -> Result<(DynamicGraph, ForestLayout, ExpansionCertificate)> {
    let log_n = log2_exact(n)?;
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    // Expanders are built first so the dummy pools can be allocated.
    let ex_l2 = build_expander(&ExpanderSpec::new(n, derived_seed(seed, 1)))?.0;
    let ex_l4 = build_expander(&ExpanderSpec::new(3 * n * n, derived_seed(seed, 2)))?.0;
    let ex_r2 = build_expander(&ExpanderSpec::new(n, derived_seed(seed, 3)))?.0;
    let ex_r4 = build_expander(&ExpanderSpec::new(3 * n * n, derived_seed(seed, 4)))?.0;
    let extra = ex_l2.edge_count() + ex_l4.edge_count() + ex_r2.edge_count() + ex_r4.edge_count();
    let span = 4 * log_n + 3;
    let (mut g, mut layout) =
        build_forests(n, 3 * n, log_n, StVariant::Expander, extra, span)?;
    for i in 1..=n {
        for j in 1..=n {
            if m.get(i, j) {
                g.insert_edge(layout.lm(i, j), layout.rm(j, i))?;
            } else {
                g.insert_edge(layout.lm(i, j), layout.rl(j, i))?;
                g.insert_edge(layout.ll(i, j), layout.rm(j, i))?;
            }
        }
    }
    // Zero-state root edges.
    for i in 1..=n {
        g.insert_edge(layout.l2(i), layout.lu_root(i))?;
        g.insert_edge(layout.r2(i), layout.ru_root(i))?;
    }
    layout.current_u = Some(BitVector::zeros(n));
    layout.current_v = Some(BitVector::zeros(n));
    // Overlay with dummies: left dummies sit one layer before their
    // neighbors, right dummies one layer after.
    let mut next = (2 * layout.per_side) as NodeId;
    let mut overlay = Vec::new();
    {
        let lay = |ids: std::ops::Range<NodeId>, layer: u32, layout: &mut ForestLayout| {
            for id in ids {
                layout.layer[id as usize] = layer;
            }
        };
        let l2_targets: Vec<NodeId> = (1..=n).map(|i| layout.l2(i)).collect();
        let r2_targets: Vec<NodeId> = (1..=n).map(|i| layout.r2(i)).collect();
        let mut l4_targets = Vec::new();
        let mut r4_targets = Vec::new();
        for tree in 1..=3 * n {
            for j in 1..=n {
                l4_targets.push(layout.l4(tree, j));
                r4_targets.push(layout.r4(tree, j));
            }
        }
        let jobs: [(&DynamicGraph, &[NodeId], u32); 4] = [
            (&ex_l2, &l2_targets, log_n - 1),
            (&ex_l4, &l4_targets, 2 * log_n),
            (&ex_r2, &r2_targets, 3 * log_n + 4),
            (&ex_r4, &r4_targets, 2 * log_n + 3),
        ];
        for (ex, targets, layer) in jobs {
            let pool: Vec<NodeId> = (next..next + ex.edge_count() as NodeId).collect();
            lay(next..next + ex.edge_count() as NodeId, layer, &mut layout);
            next += ex.edge_count() as NodeId;
            let ops = overlay_expander(&mut g, targets, ex, OverlayMode::Dummy(&pool))?;
            overlay.extend(ops.iter().map(|op| op.endpoints()));
        }
    }
    debug_assert_eq!(next as usize, layout.expected_nodes);
    layout.overlay_edges = overlay;
    layout.one_distance = Some(span as usize);
    layout.cutoff = Some(span as usize);
    let cert = crate::graph::expansion_lower_bound_spectral(&g);
    g.clear_log();
    Ok((g, layout, cert))
}

/// Root-edge swap for variants where every L2[i]/R2[i] keeps one edge:
/// inserts all new edges, then deletes the stale ones.
pub fn apply_pair_st_swap(
    g: &mut DynamicGraph,
    layout: &mut ForestLayout,
    u: &BitVector,
    v: &BitVector,
) -> Result<usize> {
    match layout.variant {
        StVariant::Expander | StVariant::PowerLaw { .. } => {}
        _ => return Err(Error::InvalidParam("swap applies to expander/power-law".into())),
    }
    let n = layout.n;
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!("pair dimension != {n}")));
    }
    let cur_u = layout.current_u.take().expect("layout carries input state");
    let cur_v = layout.current_v.take().expect("layout carries input state");
    let mut ops = 0;
    let u_target =
        |layout: &ForestLayout, i: usize, bit: bool| if bit { layout.lm_root(i) } else { layout.lu_root(i) };
    let v_target =
        |layout: &ForestLayout, i: usize, bit: bool| if bit { layout.rm_root(i) } else { layout.ru_root(i) };
    for i in 1..=n {
        if u.get(i) != cur_u.get(i) {
            g.insert_edge(layout.l2(i), u_target(layout, i, u.get(i)))?;
            ops += 1;
        }
        if v.get(i) != cur_v.get(i) {
            g.insert_edge(layout.r2(i), v_target(layout, i, v.get(i)))?;
            ops += 1;
        }
    }
    for i in 1..=n {
        if u.get(i) != cur_u.get(i) {
            g.delete_edge(layout.l2(i), u_target(layout, i, cur_u.get(i)))?;
            ops += 1;
        }
        if v.get(i) != cur_v.get(i) {
            g.delete_edge(layout.r2(i), v_target(layout, i, cur_v.get(i)))?;
            ops += 1;
        }
    }
    layout.current_u = Some(u.clone());
    layout.current_v = Some(v.clone());
    Ok(ops)
}

/// Power-law (s,t)-distance state: the triple-forest reduction (which has an
/// input-independent degree distribution) embedded in a power-law host.
pub struct PowerLawStState {
    pub graph: DynamicGraph,
    pub layout: ForestLayout,
    pub host_alpha: f64,
    pub beta: f64,
    pub reduction_nodes: usize,
    pub filler_deviations: usize,
}

/// Triple-forest power-law reduction. Matrix rule: set bits wire LM-RM and
/// LL-RL, unset bits wire LM-RL and LL-RM, so every middle/lower leaf has
/// exactly one matrix edge for any input, and the degree histogram never
/// moves. No per-pair compensation is needed.
pub fn build_st_powerlaw(n: usize, beta: f64, seed: u64, m: &BitMatrix) -> Result<PowerLawStState> {
    let log_n = log2_exact(n)?;
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    if beta <= 2.0 {
        return Err(Error::InvalidParam(format!("beta must exceed 2, got {beta}")));
    }
    let span = 4 * log_n + 3;
    let (mut g, mut layout) =
        build_forests(n, 3 * n, log_n, StVariant::PowerLaw { beta }, 0, span)?;
    let reduction_nodes = layout.expected_nodes;
    for i in 1..=n {
        for j in 1..=n {
            if m.get(i, j) {
                g.insert_edge(layout.lm(i, j), layout.rm(j, i))?;
                g.insert_edge(layout.ll(i, j), layout.rl(j, i))?;
            } else {
                g.insert_edge(layout.lm(i, j), layout.rl(j, i))?;
                g.insert_edge(layout.ll(i, j), layout.rm(j, i))?;
            }
        }
    }
    for i in 1..=n {
        g.insert_edge(layout.l2(i), layout.lu_root(i))?;
        g.insert_edge(layout.r2(i), layout.ru_root(i))?;
    }
    layout.current_u = Some(BitVector::zeros(n));
    layout.current_v = Some(BitVector::zeros(n));
    layout.one_distance = Some(span as usize);
    layout.cutoff = Some(span as usize);

    let hist = g.degree_histogram();
    let reserve = std::collections::BTreeMap::new();
    let plan = plan_host(beta, &hist, &reserve)?;
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
    let _ = seed;
    host.clear_log();
    // Layers only cover the reduction prefix; pad for the filler.
    layout.layer.resize(plan.total_nodes, u32::MAX);
    layout.expected_nodes = reduction_nodes;
    Ok(PowerLawStState {
        graph: host,
        layout,
        host_alpha: plan.alpha,
        beta,
        reduction_nodes,
        filler_deviations: facts.deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{is_bipartite, max_matching_size};
    use crate::oumv::{generate_instance, vmv, GenMode};

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

    #[test]
    fn const_node_count() {
        for n in [2usize, 4, 8] {
            let (g, _) = build_st_const(n, &BitMatrix::zeros(n)).unwrap();
            assert_eq!(g.node_count(), 4 * n * n + 2 * n - 2);
        }
    }

    #[test]
    fn const_rejects_non_power_of_two() {
        assert!(build_st_const(3, &BitMatrix::zeros(3)).is_err());
        assert!(build_st_const(1, &BitMatrix::zeros(1)).is_err());
    }

    #[test]
    fn const_no_cross_edges_means_unreachable() {
        let n = 4;
        let (mut g, layout) = build_st_const(n, &BitMatrix::zeros(n)).unwrap();
        apply_pair_st(&mut g, &layout, &BitVector::ones(n), &BitVector::ones(n)).unwrap();
        assert_eq!(bfs_distance(&g, layout.s, layout.t), None);
        assert!(!decide_st(&g, &layout));
    }

    #[test]
    fn const_planted_one_hits_threshold() {
        let n = 2;
        let m = BitMatrix::ones(n);
        let (mut g, layout) = build_st_const(n, &m).unwrap();
        apply_pair_st(&mut g, &layout, &BitVector::ones(n), &BitVector::ones(n)).unwrap();
        // 4 log 2 + 3 = 7.
        assert_eq!(bfs_distance(&g, layout.s, layout.t), Some(7));
        assert!(decide_st(&g, &layout));
    }

    #[test]
    fn const_exhaustive_n2() {
        for m in all_matrices(2) {
            let (mut g, layout) = build_st_const(2, &m).unwrap();
            for u in all_vectors(2) {
                for v in all_vectors(2) {
                    apply_pair_st(&mut g, &layout, &u, &v).unwrap();
                    assert_eq!(decide_st(&g, &layout), vmv(&u, &m, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn const_bipartite_degree_and_layers() {
        let n = 4;
        let inst = generate_instance(n, GenMode::Uniform, 6).unwrap();
        let (mut g, layout) = build_st_const(n, &inst.matrix).unwrap();
        for (u, v) in &inst.pairs {
            apply_pair_st(&mut g, &layout, u, v).unwrap();
            assert!(is_bipartite(&g).is_some());
            let (max_deg, _) = g.degree_stats();
            assert!(max_deg <= 3);
            for (a, b) in g.edges() {
                let (la, lb) = (layout.layer[a as usize], layout.layer[b as usize]);
                assert_eq!(la.abs_diff(lb), 1, "edge ({a},{b}) skips layers");
            }
        }
    }

    #[test]
    fn const_distance_floor() {
        let n = 4;
        let inst = generate_instance(n, GenMode::Uniform, 40).unwrap();
        let (mut g, layout) = build_st_const(n, &inst.matrix).unwrap();
        for (k, (u, v)) in inst.pairs.iter().enumerate() {
            apply_pair_st(&mut g, &layout, u, v).unwrap();
            let d = bfs_distance(&g, layout.s, layout.t);
            if let Some(d) = d {
                assert!(d >= 4 * layout.log_n as usize + 3);
            }
            assert_eq!(decide_st(&g, &layout), inst.truth[k]);
        }
    }

    #[test]
    fn approx_alpha_formula_and_gap() {
        let n = 2;
        // delta = 0.5 -> alpha = 20.
        let m = BitMatrix::identity(n);
        let (_, layout) = build_st_approx(n, 0.5, &m).unwrap();
        match layout.variant {
            StVariant::Approx { alpha, .. } => assert_eq!(alpha, 20),
            _ => unreachable!(),
        }
        // delta = 1 at n = 2: measured ratio at least 2.
        let (_, layout) = build_st_approx(n, 1.0, &m).unwrap();
        let t1 = layout.one_distance.unwrap();
        if let Some(t0) = layout.zero_distance {
            assert!(t0 as f64 / t1 as f64 >= 2.0, "T0={t0} T1={t1}");
        }
    }

    #[test]
    fn approx_exhaustive_n2_delta1() {
        for m in all_matrices(2) {
            let (mut g, layout) = build_st_approx(2, 1.0, &m).unwrap();
            for u in all_vectors(2) {
                for v in all_vectors(2) {
                    apply_pair_st(&mut g, &layout, &u, &v).unwrap();
                    let oracle = vmv(&u, &m, &v).unwrap();
                    assert_eq!(decide_st(&g, &layout), oracle);
                    // All one-instances measure exactly T1.
                    if oracle {
                        assert_eq!(
                            bfs_distance(&g, layout.s, layout.t),
                            layout.one_distance
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn varying_t0_equals_const() {
        let n = 4;
        let inst = generate_instance(n, GenMode::Uniform, 12).unwrap();
        let (gc, _) = build_st_const(n, &inst.matrix).unwrap();
        let (gv, _) = build_st_varying(n, 0.0, &inst.matrix).unwrap();
        assert!(gc.same_adjacency(&gv));
    }

    #[test]
    fn varying_decode_and_degree() {
        for (n, t) in [(4usize, 1.0f64), (4, 0.5), (8, 0.5), (16, 0.5)] {
            let inst = generate_instance(n, GenMode::Uniform, 33).unwrap();
            let (mut g, layout) = build_st_varying(n, t, &inst.matrix).unwrap();
            for (k, (u, v)) in inst.pairs.iter().enumerate() {
                apply_pair_st(&mut g, &layout, u, v).unwrap();
                assert_eq!(decide_st(&g, &layout), inst.truth[k], "n={n} t={t} pair {k}");
            }
            let (max_deg, _) = g.degree_stats();
            let bound = (n as f64).powf(2.0 * t / (1.0 + t));
            assert!((max_deg as f64) <= 3.0 * bound + 3.0, "n={n} t={t} deg {max_deg}");
        }
    }

    #[test]
    fn expander_exhaustive_n2() {
        for m in all_matrices(2) {
            let (mut g, mut layout, cert) = build_st_expander(2, &m, 9).unwrap();
            assert!(cert.value_f64() > 0.0);
            for u in all_vectors(2) {
                for v in all_vectors(2) {
                    apply_pair_st_swap(&mut g, &mut layout, &u, &v).unwrap();
                    assert_eq!(decide_st(&g, &layout), vmv(&u, &m, &v).unwrap());
                }
            }
        }
    }

    #[test]
    fn expander_bipartite_with_dummies_and_size() {
        let n = 2;
        let inst = generate_instance(n, GenMode::Uniform, 3).unwrap();
        let (g, layout, _) = build_st_expander(n, &inst.matrix, 1).unwrap();
        assert!(is_bipartite(&g).is_some());
        // Dominated by the triple forests: |L4| = |R4| = 3n^2.
        assert!(g.node_count() >= 6 * n * n);
        for (a, b) in g.edges() {
            let (la, lb) = (layout.layer[a as usize], layout.layer[b as usize]);
            assert_eq!(la.abs_diff(lb), 1);
        }
    }

    #[test]
    fn expander_swap_counts() {
        let n = 4;
        let m = BitMatrix::identity(n);
        let (mut g, mut layout, _) = build_st_expander(n, &m, 4).unwrap();
        let ones = BitVector::ones(n);
        let zero = BitVector::zeros(n);
        let first = apply_pair_st_swap(&mut g, &mut layout, &ones, &ones).unwrap();
        assert_eq!(first, 4 * n);
        assert_eq!(apply_pair_st_swap(&mut g, &mut layout, &ones, &ones).unwrap(), 0);
        assert_eq!(apply_pair_st_swap(&mut g, &mut layout, &zero, &zero).unwrap(), 4 * n);
    }

    #[test]
    fn powerlaw_table_decode_and_histogram() {
        let n = 2;
        let inst = generate_instance(n, GenMode::Uniform, 5).unwrap();
        let mut state = build_st_powerlaw(n, 3.0, 2, &inst.matrix).unwrap();
        // Left-side degree table: L1: 1 deg-2 + (n-2) deg-3; L2: n deg-2;
        // L3: 2n deg-2 + (3n^2-5n) deg-3; L4: n^2 deg-1 + 2n^2 deg-2.
        let layout = state.layout.clone();
        let deg = |v: NodeId| state.graph.degree(v) as u32;
        let mut l1 = std::collections::BTreeMap::new();
        for h in 1..n {
            *l1.entry(deg(layout.l_tree(h))).or_insert(0usize) += 1;
        }
        let mut expect1 = std::collections::BTreeMap::new();
        expect1.insert(2u32, 1usize);
        if n > 2 {
            expect1.insert(3u32, n - 2);
        }
        assert_eq!(l1, expect1);
        for i in 1..=n {
            assert_eq!(deg(layout.l2(i)), 2);
        }
        let mut l3 = std::collections::BTreeMap::new();
        for tree in 1..=3 * n {
            for h in 1..n {
                *l3.entry(deg(layout.forest_node(tree, h))).or_insert(0usize) += 1;
            }
        }
        let mut expect3 = std::collections::BTreeMap::new();
        expect3.insert(2u32, 2 * n);
        if 3 * n * n > 5 * n {
            expect3.insert(3u32, 3 * n * n - 5 * n);
        }
        assert_eq!(l3, expect3);
        let mut l4 = std::collections::BTreeMap::new();
        for tree in 1..=3 * n {
            for j in 1..=n {
                *l4.entry(deg(layout.l4(tree, j))).or_insert(0usize) += 1;
            }
        }
        assert_eq!(
            l4,
            [(1u32, n * n), (2, 2 * n * n)].into_iter().collect::<std::collections::BTreeMap<_, _>>()
        );
        // Decode across the stream; histogram fixed regardless of input.
        let before = state.graph.degree_histogram();
        for (k, (u, v)) in inst.pairs.iter().enumerate() {
            apply_pair_st_swap(&mut state.graph, &mut state.layout, u, v).unwrap();
            assert_eq!(decide_st(&state.graph, &state.layout), inst.truth[k], "pair {k}");
            assert_eq!(state.graph.degree_histogram(), before);
        }
    }

    #[test]
    fn powerlaw_random_pairs() {
        let n = 2;
        for seed in [4u64, 5, 6] {
            let inst = generate_instance(n, GenMode::Uniform, seed).unwrap();
            let mut state = build_st_powerlaw(n, 3.0, seed, &inst.matrix).unwrap();
            for (k, (u, v)) in inst.pairs.iter().enumerate() {
                apply_pair_st_swap(&mut state.graph, &mut state.layout, u, v).unwrap();
                assert_eq!(decide_st(&state.graph, &state.layout), inst.truth[k], "seed {seed} pair {k}");
            }
        }
    }

    #[test]
    fn st_layout_bijective_and_matching_unrelated() {
        let (_, layout) = build_st_const(4, &BitMatrix::zeros(4)).unwrap();
        assert!(layout.label_map().is_bijective());
        // Sanity: the st gadget is not accidentally a matching gadget.
        let (g, _) = build_st_const(2, &BitMatrix::ones(2)).unwrap();
        assert!(max_matching_size(&g) > 0);
    }
}
