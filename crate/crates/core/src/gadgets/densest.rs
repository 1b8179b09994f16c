//! Densest-subgraph reductions: 2d-regular vector/matrix gadgets whose exact
//! densities encode input bits, decided by exact rational comparison against
//! d + 1/(n^2 + 2n).

use super::host::{build_filler, plan_host_styled, FillerStyle};
use super::LabelMap;
use crate::error::{Error, Result};
use crate::graph::{
    density_at_least, global_min_cut, zeta, DynamicGraph, ExpansionCertificate, NodeId, UpdateOp,
};
use crate::oumv::{BitMatrix, BitVector};
use crate::Rational;

/// A circulant gadget template on `size` nodes: d strides including stride 1,
/// verified to have the required edge connectivity.
#[derive(Debug, Clone)]
pub struct GadgetTemplate {
    pub size: usize,
    pub d: usize,
    pub strides: Vec<usize>,
    /// Local edges (a, b) with a < b, sorted.
    pub edges: Vec<(u32, u32)>,
    pub min_cut: usize,
}

fn circulant_edges(size: usize, strides: &[usize]) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for &s in strides {
        for v in 0..size {
            let w = (v + s) % size;
            let (a, b) = (v.min(w) as u32, v.max(w) as u32);
            edges.push((a, b));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// 2d-regular gadget on `size` nodes with min cut >= min(6, 2d), built as d
/// stride cycles. Coprime strides (edge-disjoint Hamiltonian cycles) are
/// preferred; any stride set passing the cut verification is accepted.
pub fn build_vector_gadget(size: usize, d: usize, seed: u64) -> Result<GadgetTemplate> {
    if d < 1 {
        return Err(Error::InvalidParam("gadget degree parameter must be >= 1".into()));
    }
    if size < 2 * d + 1 {
        return Err(Error::InvalidParam(format!(
            "a 2d-regular simple gadget needs at least {} nodes, got {size}",
            2 * d + 1
        )));
    }
    let limit = (size - 1) / 2;
    let candidates: Vec<usize> = (1..=limit).collect();
    let target_cut = (2 * d).min(6);
    // Stride sets in preference order: coprime first, then everything else.
    let mut pools: Vec<Vec<usize>> = Vec::new();
    let coprime: Vec<usize> =
        candidates.iter().copied().filter(|&s| gcd(s, size) == 1).collect();
    if coprime.len() >= d && coprime[0] == 1 {
        pools.push(coprime);
    }
    pools.push(candidates);
    for pool in pools {
        if pool.len() < d {
            continue;
        }
        // Rotate the non-unit strides by the seed for resampling.
        let tail = &pool[1..];
        for shift in 0..tail.len().max(1) {
            let rot = (seed as usize + shift) % tail.len().max(1);
            let mut strides = vec![pool[0]];
            strides.extend(tail.iter().cycle().skip(rot).take(d - 1).copied());
            strides.sort_unstable();
            strides.dedup();
            if strides.len() != d || strides[0] != 1 {
                continue;
            }
            let edges = circulant_edges(size, &strides);
            if edges.len() != d * size {
                continue; // collided strides (s and size-s give the same edges)
            }
            let mut g = DynamicGraph::new(size);
            for &(a, b) in &edges {
                g.insert_edge(a, b)?;
            }
            let cut = global_min_cut(&g);
            if cut >= target_cut {
                return Ok(GadgetTemplate { size, d, strides, edges, min_cut: cut });
            }
        }
    }
    Err(Error::GenerationFailed(format!(
        "no {d}-stride circulant on {size} nodes reaches edge connectivity {target_cut}"
    )))
}

/// Matrix gadget: the vector gadget on `size` nodes with the designated
/// stride-1 edge (0, 1) removed; its endpoints carry the cross edges.
pub fn build_matrix_gadget(size: usize, d: usize, seed: u64) -> Result<GadgetTemplate> {
    let mut t = build_vector_gadget(size, d, seed)?;
    let pos = t
        .edges
        .binary_search(&(0, 1))
        .map_err(|_| Error::GenerationFailed("stride-1 edge (0,1) missing".into()))?;
    t.edges.remove(pos);
    let mut g = DynamicGraph::new(size);
    for &(a, b) in &t.edges {
        g.insert_edge(a, b)?;
    }
    t.min_cut = global_min_cut(&g);
    Ok(t)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone)]
pub enum DenseVariant {
    Const,
    /// G1 is a dprime-regular graph matched 1:1 onto the reduction.
    Expander { dprime: usize },
    PowerLaw { beta: f64 },
}

/// Label -> id bijection for the densest constructions, plus the removable
/// edge registries that track input-dependent deletions.
#[derive(Debug, Clone)]
pub struct DenseLayout {
    pub n: usize,
    pub d: usize,
    pub variant: DenseVariant,
    pub expected_nodes: usize,
    /// Exact decision threshold d + 1/(n^2+2n).
    pub threshold: Rational,
    vec_template: GadgetTemplate,
    mat_template: GadgetTemplate,
    /// Registered removals per vector gadget (0..n are U, n..2n are V).
    vector_removed: Vec<Vec<(NodeId, NodeId)>>,
    /// Power-law only: per vector gadget, the cycle rewiring ops to undo.
    cycle_rewires: Vec<Vec<UpdateOp>>,
    /// Power-law only: first id of the padding (filler) region.
    pub padding_start: Option<NodeId>,
}

impl DenseLayout {
    /// Default d: 3 where a 6-regular gadget fits, else the largest feasible.
    pub fn default_d(n: usize) -> usize {
        if n >= 7 {
            3
        } else {
            ((n - 1) / 2).max(1)
        }
    }

    pub fn vec_size(&self) -> usize {
        self.n
    }
    pub fn vec_template(&self) -> &GadgetTemplate {
        &self.vec_template
    }
    pub fn mat_template(&self) -> &GadgetTemplate {
        &self.mat_template
    }
    pub fn mat_size(&self) -> usize {
        self.n * self.n
    }
    /// U_i[j], 1-based i in [n], j in [n].
    pub fn u_node(&self, i: usize, j: usize) -> NodeId {
        ((i - 1) * self.n + (j - 1)) as NodeId
    }
    /// V_j[i].
    pub fn v_node(&self, j: usize, i: usize) -> NodeId {
        (self.n * self.n + (j - 1) * self.n + (i - 1)) as NodeId
    }
    /// Local node `k` of matrix gadget M_ij; M_ij[0] is k=0, M_ij[1] is k=1.
    pub fn m_node(&self, i: usize, j: usize, k: usize) -> NodeId {
        (2 * self.n * self.n + ((i - 1) * self.n + (j - 1)) * self.mat_size() + k) as NodeId
    }
    fn vector_gadget_base(&self, idx: usize) -> NodeId {
        (idx * self.n) as NodeId
    }
    /// Power-law 4-cycles: C^u_i, C^v_j then C_ij, each 4 nodes, after the core gadgets.
    fn cycle_base(&self, idx: usize) -> NodeId {
        (2 * self.n * self.n + self.n * self.n * self.mat_size() + 4 * idx) as NodeId
    }

    pub fn label_map(&self) -> LabelMap {
        let mut map = LabelMap::with_capacity(self.expected_nodes);
        for i in 1..=self.n {
            for j in 1..=self.n {
                map.set(self.u_node(i, j), format!("U{i}[{j}]"));
                map.set(self.v_node(i, j), format!("V{i}[{j}]"));
            }
        }
        for i in 1..=self.n {
            for j in 1..=self.n {
                for k in 0..self.mat_size() {
                    map.set(self.m_node(i, j, k), format!("M{i}{j}[{k}]"));
                }
            }
        }
        let mut next = (2 * self.n * self.n + self.n * self.n * self.mat_size()) as NodeId;
        while (next as usize) < self.expected_nodes {
            map.set(next, format!("X[{next}]"));
            next += 1;
        }
        map
    }
}

fn stamp_gadget(g: &mut DynamicGraph, base: NodeId, template: &GadgetTemplate) -> Result<()> {
    for &(a, b) in &template.edges {
        g.insert_edge(base + a, base + b)?;
    }
    Ok(())
}

/// First `count` template edges in lexicographic order, preferring pairwise
/// disjoint ones. Matrix gadgets additionally avoid the designated nodes 0
/// and 1 (the cross-edge endpoints); vector gadgets have no such nodes.
fn removable_edges(template: &GadgetTemplate, count: usize, avoid_designated: bool) -> Vec<(u32, u32)> {
    let eligible =
        |a: u32, b: u32| -> bool { !avoid_designated || (a > 1 && b > 1) };
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(count);
    for &(a, b) in &template.edges {
        if !eligible(a, b) {
            continue;
        }
        if out.iter().any(|&(x, y)| x == a || x == b || y == a || y == b) {
            continue;
        }
        out.push((a, b));
        if out.len() == count {
            break;
        }
    }
    // Small gadgets may not have enough disjoint edges; top up with shared
    // endpoints, which the density bounds tolerate.
    if out.len() < count {
        for &(a, b) in &template.edges {
            if eligible(a, b) && !out.contains(&(a, b)) {
                out.push((a, b));
                if out.len() == count {
                    break;
                }
            }
        }
    }
    assert_eq!(out.len(), count, "gadget too small for removable edges");
    out
}

fn validate_dense_params(n: usize, d: usize, m: &BitMatrix) -> Result<()> {
    if m.n() != n {
        return Err(Error::DimensionMismatch(format!("matrix is {}x{0}, n={n}", m.n())));
    }
    if n < 2 * d + 1 {
        return Err(Error::InvalidParam(format!(
            "vector gadgets need n >= 2d+1 = {}, got n = {n}",
            2 * d + 1
        )));
    }
    Ok(())
}

/// Constant-degree densest reduction: N = n^4 + 2n^2, max degree 2d+1.
/// Matrix-zero gadgets lose one extra registered edge at build; vector
/// gadgets start intact ("all-ones" state).
pub fn build_dense_const(
    n: usize,
    d: Option<usize>,
    m: &BitMatrix,
    seed: u64,
) -> Result<(DynamicGraph, DenseLayout)> {
    let d = d.unwrap_or_else(|| DenseLayout::default_d(n));
    validate_dense_params(n, d, m)?;
    let vec_template = build_vector_gadget(n, d, seed)?;
    let mat_template = build_matrix_gadget(n * n, d, seed)?;
    let total = n.pow(4) + 2 * n * n;
    let mut layout = DenseLayout {
        n,
        d,
        variant: DenseVariant::Const,
        expected_nodes: total,
        threshold: Rational::new(d as i64, 1)
            + Rational::new(1, (n * n + 2 * n) as i64),
        vec_template,
        mat_template,
        vector_removed: vec![Vec::new(); 2 * n],
        cycle_rewires: Vec::new(),
        padding_start: None,
    };
    let mut g = DynamicGraph::new(total);
    build_dense_core(&mut g, &mut layout, m, false)?;
    g.clear_log();
    Ok((g, layout))
}

/// Gadgets, cross edges and static matrix-zero removals shared by all three
/// variants. `with_cycles` adds the power-law compensation 4-cycles.
fn build_dense_core(
    g: &mut DynamicGraph,
    layout: &mut DenseLayout,
    m: &BitMatrix,
    with_cycles: bool,
) -> Result<()> {
    let n = layout.n;
    for idx in 0..2 * n {
        stamp_gadget(g, layout.vector_gadget_base(idx), &layout.vec_template.clone())?;
    }
    for i in 1..=n {
        for j in 1..=n {
            stamp_gadget(g, layout.m_node(i, j, 0), &layout.mat_template.clone())?;
            g.insert_edge(layout.u_node(i, j), layout.m_node(i, j, 0))?;
            g.insert_edge(layout.v_node(j, i), layout.m_node(i, j, 1))?;
        }
    }
    if with_cycles {
        for idx in 0..2 * n + n * n {
            let base = layout.cycle_base(idx);
            for k in 0..4u32 {
                g.insert_edge(base + k, base + (k + 1) % 4)?;
            }
        }
    }
    // Static removals for unset matrix bits.
    for i in 1..=n {
        for j in 1..=n {
            if !m.get(i, j) {
                if with_cycles {
                    // Remove two gadget edges and two cycle edges, then link
                    // the four endpoints to the cycle so degrees are fixed.
                    let removed = removable_edges(&layout.mat_template, 2, true);
                    let base = layout.m_node(i, j, 0);
                    let cbase = layout.cycle_base(2 * n + (i - 1) * n + (j - 1));
                    let (a, b) = removed[0];
                    let (c, dd) = removed[1];
                    g.delete_edge(base + a, base + b)?;
                    g.delete_edge(base + c, base + dd)?;
                    g.delete_edge(cbase, cbase + 1)?;
                    g.delete_edge(cbase + 2, cbase + 3)?;
                    for (k, &x) in [a, b, c, dd].iter().enumerate() {
                        g.insert_edge(base + x, cbase + k as u32)?;
                    }
                } else {
                    let removed = removable_edges(&layout.mat_template, 1, true);
                    let base = layout.m_node(i, j, 0);
                    g.delete_edge(base + removed[0].0, base + removed[0].1)?;
                }
            }
        }
    }
    Ok(())
}

/// Reinserts every registered vector removal, then removes two edges per
/// unset bit of the new pair. At most 8n updates.
pub fn apply_pair_dense(
    g: &mut DynamicGraph,
    layout: &mut DenseLayout,
    u: &BitVector,
    v: &BitVector,
) -> Result<usize> {
    let n = layout.n;
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!("pair dimension != {n}")));
    }
    let mut ops = 0;
    match layout.variant {
        DenseVariant::Const | DenseVariant::Expander { .. } => {
            for idx in 0..2 * n {
                for (a, b) in std::mem::take(&mut layout.vector_removed[idx]) {
                    g.insert_edge(a, b)?;
                    ops += 1;
                }
            }
            for idx in 0..2 * n {
                let bit = if idx < n { u.get(idx + 1) } else { v.get(idx - n + 1) };
                if !bit {
                    let base = layout.vector_gadget_base(idx);
                    for (a, b) in removable_edges(&layout.vec_template, 2, false) {
                        g.delete_edge(base + a, base + b)?;
                        layout.vector_removed[idx].push((base + a, base + b));
                        ops += 1;
                    }
                }
            }
        }
        DenseVariant::PowerLaw { .. } => {
            for idx in 0..2 * n {
                let bit = if idx < n { u.get(idx + 1) } else { v.get(idx - n + 1) };
                let currently_zeroed = !layout.cycle_rewires[idx].is_empty();
                if bit == !currently_zeroed {
                    continue; // state already matches
                }
                if bit {
                    // Undo the rewiring.
                    for op in std::mem::take(&mut layout.cycle_rewires[idx]).iter().rev() {
                        g.apply(op.inverse())?;
                        ops += 1;
                    }
                } else {
                    let base = layout.vector_gadget_base(idx);
                    let cbase = layout.cycle_base(idx);
                    let removed = removable_edges(&layout.vec_template, 2, false);
                    let (a, b) = removed[0];
                    let (c, dd) = removed[1];
                    let mut batch = vec![
                        UpdateOp::Delete(base + a, base + b),
                        UpdateOp::Delete(base + c, base + dd),
                        UpdateOp::Delete(cbase, cbase + 1),
                        UpdateOp::Delete(cbase + 2, cbase + 3),
                    ];
                    for (k, &x) in [a, b, c, dd].iter().enumerate() {
                        batch.push(UpdateOp::Insert(base + x, cbase + k as u32));
                    }
                    for &op in &batch {
                        g.apply(op)?;
                        ops += 1;
                    }
                    layout.cycle_rewires[idx] = batch;
                }
            }
        }
    }
    Ok(ops)
}

/// 1 iff the exact densest density reaches d + 1/(n^2+2n); the comparison is
/// an exact rational feasibility test, never floating point.
pub fn decide_dense(g: &DynamicGraph, layout: &DenseLayout) -> (bool, Option<Vec<NodeId>>) {
    density_at_least(g, layout.threshold)
}

/// Expander densest reduction: the const graph G0 plus a dprime-regular graph
/// G1 on as many nodes, joined by the identity perfect matching.
/// N = 2n^4 + 4n^2. Requires d >= 3 (so G1 nodes have degree at most d - 1)
/// and an even reduction size for dprime = 1.
pub fn build_dense_expander(
    n: usize,
    d: Option<usize>,
    m: &BitMatrix,
    seed: u64,
) -> Result<(DynamicGraph, DenseLayout, ExpansionCertificate)> {
    let d = d.unwrap_or_else(|| DenseLayout::default_d(n));
    validate_dense_params(n, d, m)?;
    if d < 3 {
        return Err(Error::InvalidParam(format!(
            "the expander variant needs d >= 3 so G1 degrees stay below d; n={n} gives d={d}"
        )));
    }
    let dprime = d - 2;
    let half = n.pow(4) + 2 * n * n;
    if dprime == 1 && half % 2 == 1 {
        return Err(Error::InvalidParam(format!(
            "G1 with dprime=1 is a perfect matching and needs an even size; n={n} gives {half}"
        )));
    }
    let vec_template = build_vector_gadget(n, d, seed)?;
    let mat_template = build_matrix_gadget(n * n, d, seed)?;
    let mut layout = DenseLayout {
        n,
        d,
        variant: DenseVariant::Expander { dprime },
        expected_nodes: 2 * half,
        threshold: Rational::new(d as i64, 1) + Rational::new(1, (n * n + 2 * n) as i64),
        vec_template,
        mat_template,
        vector_removed: vec![Vec::new(); 2 * n],
        cycle_rewires: Vec::new(),
        padding_start: None,
    };
    let mut g = DynamicGraph::new(2 * half);
    build_dense_core(&mut g, &mut layout, m, false)?;
    // G1 on ids half..2*half.
    let base = half as NodeId;
    match dprime {
        1 => {
            let h = (half / 2) as NodeId;
            for k in 0..h {
                g.insert_edge(base + k, base + k + h)?;
            }
        }
        2 => {
            for k in 0..half as NodeId {
                g.insert_edge(base + k, base + (k + 1) % half as NodeId)?;
            }
        }
        _ => {
            let spec = ExpanderSpec { nodes: half, degree: dprime, min_h0: 0.05, seed };
            let (ex, _) = crate::expander::build_expander(&spec)?;
            for (a, b) in ex.edges() {
                g.insert_edge(base + a, base + b)?;
            }
        }
    }
    // Identity bijection matching between G0 and G1.
    for k in 0..half as NodeId {
        g.insert_edge(k, base + k)?;
    }
    let cert = crate::graph::expansion_lower_bound_spectral(&g);
    g.clear_log();
    Ok((g, layout, cert))
}

use crate::expander::ExpanderSpec;

/// Power-law densest reduction state.
pub struct PowerLawDenseState {
    pub graph: DynamicGraph,
    pub layout: DenseLayout,
    pub host_alpha: f64,
    pub beta: f64,
    pub reduction_nodes: usize,
    pub filler_deviations: usize,
}

/// Power-law densest reduction: compensation 4-cycles pin every degree
/// (vector nodes 2d+1, matrix nodes 2d, cycle nodes 2), and star/matching
/// padding completes the power law. Requires zeta(beta - 1) < 2, i.e.
/// beta > 2.74, so the degree-1 budget can absorb the stars.
pub fn build_dense_powerlaw(
    n: usize,
    beta: f64,
    seed: u64,
    m: &BitMatrix,
) -> Result<PowerLawDenseState> {
    let d = DenseLayout::default_d(n);
    validate_dense_params(n, d, m)?;
    if d < 2 {
        // Stripping a compensation-cycle node from a subgraph of density rho
        // keeps the density only when rho >= 2, so the decision rule needs
        // d >= 2. With d = 1 the cycles themselves push past the threshold.
        return Err(Error::InvalidParam(format!(
            "the power-law densest variant needs d >= 2, i.e. n >= 5; n={n} gives d={d}"
        )));
    }
    if beta <= 2.0 {
        return Err(Error::InvalidParam(format!("beta must exceed 2, got {beta}")));
    }
    let z = zeta(beta - 1.0);
    if z >= 2.0 {
        return Err(Error::InvalidParam(format!(
            "zeta(beta-1) = {z:.3} >= 2: degree-1 nodes cannot dominate; need beta > 2.74"
        )));
    }
    let vec_template = build_vector_gadget(n, d, seed)?;
    let mat_template = build_matrix_gadget(n * n, d, seed)?;
    let core_nodes = n.pow(4) + 6 * n * n + 8 * n;
    let mut layout = DenseLayout {
        n,
        d,
        variant: DenseVariant::PowerLaw { beta },
        expected_nodes: core_nodes,
        threshold: Rational::new(d as i64, 1) + Rational::new(1, (n * n + 2 * n) as i64),
        vec_template,
        mat_template,
        vector_removed: vec![Vec::new(); 2 * n],
        cycle_rewires: vec![Vec::new(); 2 * n],
        padding_start: None,
    };
    let mut core = DynamicGraph::new(core_nodes);
    build_dense_core(&mut core, &mut layout, m, true)?;
    let hist = core.degree_histogram();
    // The core histogram is (2, 4n^2+8n), (2d, n^4), (2d+1, 2n^2); classes
    // merge when d = 1.
    let plan = plan_host_styled(beta, &hist, &std::collections::BTreeMap::new(), FillerStyle::LowDensity)?;
    let mut host = DynamicGraph::new(plan.total_nodes);
    for (a, b) in core.edges() {
        host.insert_edge(a, b)?;
    }
    let facts = build_filler(&mut host, &plan, &hist, core_nodes as NodeId, FillerStyle::LowDensity)?;
    host.clear_log();
    layout.padding_start = Some(core_nodes as NodeId);
    layout.expected_nodes = plan.total_nodes;
    Ok(PowerLawDenseState {
        graph: host,
        layout,
        host_alpha: plan.alpha,
        beta,
        reduction_nodes: core_nodes,
        filler_deviations: facts.deviations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::densest_subgraph;
    use crate::oumv::{generate_instance, vmv, GenMode};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn vector_gadget_seven_nodes_six_regular() {
        let t = build_vector_gadget(7, 3, 0).unwrap();
        assert_eq!(t.strides, vec![1, 2, 3]);
        assert_eq!(t.edges.len(), 21);
        assert!(t.min_cut >= 6);
        // Density of the gadget alone is d.
        let mut g = DynamicGraph::new(7);
        for &(a, b) in &t.edges {
            g.insert_edge(a, b).unwrap();
        }
        let (rho, _) = densest_subgraph(&g);
        assert_eq!(rho, Rational::new(3, 1));
    }

    #[test]
    fn vector_gadget_survives_five_edge_removals() {
        let t = build_vector_gadget(7, 3, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let mut g = DynamicGraph::new(7);
            for &(a, b) in &t.edges {
                g.insert_edge(a, b).unwrap();
            }
            let mut edges: Vec<_> = g.edges().collect();
            for _ in 0..5 {
                let k = rng.gen_range(0..edges.len());
                let (a, b) = edges.swap_remove(k);
                g.delete_edge(a, b).unwrap();
            }
            assert!(crate::graph::is_connected(&g));
        }
    }

    #[test]
    fn matrix_gadget_density_and_cut() {
        // Needs n^2 >= 2d+1; at n=2, d=3 the build must fail.
        assert!(build_matrix_gadget(4, 3, 0).is_err());
        let t = build_matrix_gadget(9, 3, 0).unwrap();
        assert_eq!(t.edges.len(), 27 - 1);
        assert!(t.min_cut >= 4);
        let mut g = DynamicGraph::new(9);
        for &(a, b) in &t.edges {
            g.insert_edge(a, b).unwrap();
        }
        let (rho, _) = densest_subgraph(&g);
        // d - 1/n^2 with n^2 = 9.
        assert_eq!(rho, Rational::new(3, 1) - Rational::new(1, 9));
    }

    #[test]
    fn const_node_count_and_degree() {
        let n = 3;
        let inst = generate_instance(n, GenMode::Uniform, 1).unwrap();
        let (g, layout) = build_dense_const(n, None, &inst.matrix, 0).unwrap();
        assert_eq!(g.node_count(), n.pow(4) + 2 * n * n);
        assert_eq!(g.node_count(), 99);
        let (max_deg, _) = g.degree_stats();
        assert!(max_deg <= 2 * layout.d + 1);
        // Every node of a set matrix gadget has degree 2d.
        for (i, j) in inst.matrix.iter_ones() {
            for k in 0..layout.mat_size() {
                assert_eq!(g.degree(layout.m_node(i, j, k)), 2 * layout.d);
            }
        }
    }

    #[test]
    fn const_d3_max_degree_seven() {
        let n = 7;
        let inst = generate_instance(n, GenMode::Uniform, 2).unwrap();
        let (g, layout) = build_dense_const(n, None, &inst.matrix, 0).unwrap();
        assert_eq!(layout.d, 3);
        let (max_deg, _) = g.degree_stats();
        assert!(max_deg <= 7);
    }

    #[test]
    fn planted_one_reaches_threshold_with_witness() {
        let n = 3;
        let mut m = BitMatrix::zeros(n);
        m.set(1, 1, true);
        let (mut g, mut layout) = build_dense_const(n, None, &m, 0).unwrap();
        let u = BitVector::unit(n, 1);
        let v = BitVector::unit(n, 1);
        apply_pair_dense(&mut g, &mut layout, &u, &v).unwrap();
        let (bit, witness) = decide_dense(&g, &layout);
        assert!(bit);
        let witness: std::collections::BTreeSet<NodeId> = witness.unwrap().into_iter().collect();
        // The witness contains the full planted triple U_1 + M_11 + V_1.
        for j in 1..=n {
            assert!(witness.contains(&layout.u_node(1, j)));
            assert!(witness.contains(&layout.v_node(1, j)));
        }
        for k in 0..layout.mat_size() {
            assert!(witness.contains(&layout.m_node(1, 1, k)));
        }
    }

    #[test]
    fn all_zero_u_decides_zero() {
        let n = 3;
        let m = BitMatrix::ones(n);
        let (mut g, mut layout) = build_dense_const(n, None, &m, 0).unwrap();
        apply_pair_dense(&mut g, &mut layout, &BitVector::zeros(n), &BitVector::ones(n)).unwrap();
        assert!(!decide_dense(&g, &layout).0);
    }

    #[test]
    fn const_decode_matches_oracle_sampled() {
        let n = 3;
        for seed in 0..12u64 {
            let inst = generate_instance(n, GenMode::Uniform, seed).unwrap();
            let (mut g, mut layout) = build_dense_const(n, None, &inst.matrix, 0).unwrap();
            for (k, (u, v)) in inst.pairs.iter().enumerate() {
                apply_pair_dense(&mut g, &mut layout, u, v).unwrap();
                assert_eq!(decide_dense(&g, &layout).0, inst.truth[k], "seed {seed} pair {k}");
            }
        }
    }

    #[test]
    fn apply_counts_and_registry() {
        let n = 3;
        let m = BitMatrix::ones(n);
        let (mut g, mut layout) = build_dense_const(n, None, &m, 0).unwrap();
        let ones = BitVector::ones(n);
        let zeros = BitVector::zeros(n);
        assert_eq!(apply_pair_dense(&mut g, &mut layout, &ones, &ones).unwrap(), 0);
        assert_eq!(apply_pair_dense(&mut g, &mut layout, &zeros, &zeros).unwrap(), 4 * n);
        let registered: usize = layout.vector_removed.iter().map(|r| r.len()).sum();
        assert_eq!(registered, 4 * n);
        assert_eq!(apply_pair_dense(&mut g, &mut layout, &ones, &ones).unwrap(), 4 * n);
    }

    #[test]
    fn dual_oracle_on_single_gadget_probe() {
        // An 18-node probe: one vector gadget + one 9-node matrix gadget,
        // cross-connected; flow decision equals subset enumeration.
        let vec_t = build_vector_gadget(7, 2, 0).unwrap();
        let mat_t = build_matrix_gadget(9, 2, 0).unwrap();
        let mut g = DynamicGraph::new(16);
        for &(a, b) in &vec_t.edges {
            g.insert_edge(a, b).unwrap();
        }
        for &(a, b) in &mat_t.edges {
            g.insert_edge(7 + a, 7 + b).unwrap();
        }
        g.insert_edge(0, 7).unwrap();
        g.insert_edge(1, 8).unwrap();
        let (rho, _) = densest_subgraph(&g);
        let oracle = crate::oracles::brute_force_densest(&g);
        assert_eq!(rho, oracle);
    }

    #[test]
    fn expander_variant_needs_d3_and_counts() {
        let n = 3;
        let m = BitMatrix::ones(n);
        assert!(build_dense_expander(n, None, &m, 0).is_err());
        let n = 8;
        let inst = generate_instance(n, GenMode::Uniform, 4).unwrap();
        let (g, layout, cert) = build_dense_expander(n, None, &inst.matrix, 0).unwrap();
        assert_eq!(g.node_count(), 2 * n.pow(4) + 4 * n * n);
        assert!(cert.value_f64() > 0.0);
        // Every G1 node has degree dprime + 1 <= d - 1.
        let half = n.pow(4) + 2 * n * n;
        for k in half..half + 50 {
            assert!(g.degree(k as NodeId) <= layout.d - 1);
        }
    }

    #[test]
    fn expander_decode_matches_oracle() {
        let n = 8;
        let inst = generate_instance(n, GenMode::Sparse, 6).unwrap();
        let (mut g, mut layout, _) = build_dense_expander(n, None, &inst.matrix, 1).unwrap();
        for (k, (u, v)) in inst.pairs.iter().take(3).enumerate() {
            apply_pair_dense(&mut g, &mut layout, u, v).unwrap();
            assert_eq!(decide_dense(&g, &layout).0, inst.truth[k], "pair {k}");
        }
    }

    #[test]
    fn powerlaw_beta_and_size_gates() {
        let m = BitMatrix::ones(5);
        assert!(build_dense_powerlaw(5, 2.5, 0, &m).is_err());
        assert!(build_dense_powerlaw(5, 3.0, 0, &m).is_ok());
        // d = 1 sizes are rejected: compensation cycles break the threshold.
        let m3 = BitMatrix::ones(3);
        assert!(build_dense_powerlaw(3, 3.0, 0, &m3).is_err());
    }

    #[test]
    fn powerlaw_core_histogram_and_cycle_degrees() {
        let n = 5;
        let inst = generate_instance(n, GenMode::Uniform, 9).unwrap();
        let state = build_dense_powerlaw(n, 3.0, 0, &inst.matrix).unwrap();
        let layout = &state.layout;
        let d = layout.d;
        // Reduction-core histogram: (2, 4n^2+8n), (2d, n^4), (2d+1, 2n^2).
        let mut expected = std::collections::BTreeMap::new();
        *expected.entry(2u32).or_insert(0usize) += 4 * n * n + 8 * n;
        *expected.entry(2 * d as u32).or_insert(0) += n.pow(4);
        *expected.entry(2 * d as u32 + 1).or_insert(0) += 2 * n * n;
        let mut measured = std::collections::BTreeMap::new();
        for v in 0..state.reduction_nodes {
            *measured.entry(state.graph.degree(v as NodeId) as u32).or_insert(0usize) += 1;
        }
        assert_eq!(measured, expected);
        // Cycle nodes keep degree exactly 2 under both bit values.
        let mut g = state.graph.clone();
        let mut lay = state.layout.clone();
        apply_pair_dense(&mut g, &mut lay, &BitVector::zeros(n), &BitVector::zeros(n)).unwrap();
        for idx in 0..2 * n + n * n {
            let base = lay.cycle_base(idx);
            for k in 0..4u32 {
                assert_eq!(g.degree(base + k), 2);
            }
        }
    }

    #[test]
    fn powerlaw_decode_and_witness_excludes_padding() {
        let n = 5;
        for seed in [0u64, 1] {
            let inst = generate_instance(n, GenMode::Uniform, seed).unwrap();
            let mut state = build_dense_powerlaw(n, 3.0, seed, &inst.matrix).unwrap();
            for (k, (u, v)) in inst.pairs.iter().enumerate() {
                let mut layout = state.layout.clone();
                apply_pair_dense(&mut state.graph, &mut layout, u, v).unwrap();
                state.layout = layout;
                let (bit, witness) = decide_dense(&state.graph, &state.layout);
                assert_eq!(bit, inst.truth[k], "seed {seed} pair {k}");
                if let Some(w) = witness {
                    let pad = state.layout.padding_start.unwrap();
                    assert!(w.iter().all(|&v| v < pad), "witness leaked into padding");
                }
            }
        }
    }
}
