//! Power-law host graphs. The embedded reduction occupies part of each
//! per-degree budget N_d = floor(e^alpha / d^beta); the filler realizes the
//! remaining budgets exactly with structured components, disjoint from the
//! reduction, so the host histogram matches the power law with at most a
//! couple of parity fix-up nodes one degree away.

use crate::error::{Error, Result};
use crate::graph::{target_count, DynamicGraph, NodeId};
use std::collections::BTreeMap;

/// How filler degree classes are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillerStyle {
    /// Regular circulants for large classes. Fine when only matching sizes or
    /// distances matter.
    Compact,
    /// Every class of degree >= 3 becomes stars (density < 1), so the filler
    /// can never contain a subgraph of density >= 1 + epsilon. Required by
    /// the densest-subgraph host.
    LowDensity,
}

#[derive(Debug, Clone)]
enum FillerComponent {
    /// d-regular circulant on `count` nodes (stride 1 included, so connected).
    Circulant { degree: u32, count: usize },
    /// One center of the given degree plus that many fresh degree-1 leaves.
    Star { degree: u32 },
    /// Single cycle through `count` degree-2 nodes.
    Cycle { count: usize },
    /// `count` degree-2 nodes in a path capped by two degree-1 leaves.
    CappedPath { count: usize },
    /// Perfect matching on 2*pairs degree-1 nodes.
    MatchingPairs { pairs: usize },
    /// Three leftover degree-1 nodes as a path (one becomes degree 2).
    PathTriple,
    /// One leftover degree-1 node attached to the big cycle.
    AttachToCycle,
}

#[derive(Debug, Clone)]
pub struct HostPlan {
    pub alpha: f64,
    pub beta: f64,
    /// N_d for every realisable degree.
    pub targets: BTreeMap<u32, usize>,
    pub total_nodes: usize,
    pub style: FillerStyle,
    components: Vec<FillerComponent>,
    pub planned_deviations: usize,
}

fn targets_for(alpha: f64, beta: f64) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    let mut d = 1u32;
    loop {
        let t = target_count(alpha, beta, d);
        if t == 0 {
            break;
        }
        out.insert(d, t);
        d += 1;
    }
    out
}

fn plan_components(
    targets: &BTreeMap<u32, usize>,
    used: &BTreeMap<u32, usize>,
    reserve: &BTreeMap<u32, usize>,
    style: FillerStyle,
) -> Result<(Vec<FillerComponent>, usize)> {
    let dmax = *targets.keys().last().unwrap_or(&0);
    for (&d, &count) in used {
        let have = targets.get(&d).copied().unwrap_or(0);
        let need = count + reserve.get(&d).copied().unwrap_or(0);
        if have < need {
            return Err(Error::GenerationFailed(format!(
                "degree class {d}: budget {have} < required {need}"
            )));
        }
    }
    for (&d, &extra) in reserve {
        let have = targets.get(&d).copied().unwrap_or(0);
        let need = used.get(&d).copied().unwrap_or(0) + extra;
        if have < need {
            return Err(Error::GenerationFailed(format!(
                "degree class {d}: budget {have} < reserve {need}"
            )));
        }
    }
    let free = |d: u32| -> usize {
        targets.get(&d).copied().unwrap_or(0) - used.get(&d).copied().unwrap_or(0)
    };
    let mut comps = Vec::new();
    let mut deviations = 0usize;
    let mut leaves = free(1) as i64;
    for d in (3..=dmax).rev() {
        let mut c = free(d);
        if c == 0 {
            continue;
        }
        let mut stars = 0usize;
        match style {
            FillerStyle::LowDensity => {
                stars = c;
                c = 0;
            }
            FillerStyle::Compact => {
                if c * d as usize % 2 == 1 {
                    stars += 1;
                    c -= 1;
                }
                if c > 0 && c < d as usize + 1 {
                    stars += c;
                    c = 0;
                }
            }
        }
        for _ in 0..stars {
            comps.push(FillerComponent::Star { degree: d });
            leaves -= d as i64;
        }
        if c > 0 {
            comps.push(FillerComponent::Circulant { degree: d, count: c });
        }
    }
    let c2 = free(2);
    if c2 >= 3 {
        comps.push(FillerComponent::Cycle { count: c2 });
    } else if c2 > 0 {
        comps.push(FillerComponent::CappedPath { count: c2 });
        leaves -= 2;
    }
    if leaves < 0 {
        return Err(Error::GenerationFailed(format!(
            "degree-1 budget exhausted by star padding (short {} leaves)",
            -leaves
        )));
    }
    let mut leaves = leaves as usize;
    if leaves % 2 == 1 {
        if leaves >= 3 {
            comps.push(FillerComponent::PathTriple);
            leaves -= 3;
        } else if c2 >= 3 {
            comps.push(FillerComponent::AttachToCycle);
            leaves -= 1;
        } else {
            return Err(Error::GenerationFailed("odd leftover degree-1 node".into()));
        }
        deviations += 2;
    }
    if leaves > 0 {
        comps.push(FillerComponent::MatchingPairs { pairs: leaves / 2 });
    }
    Ok((comps, deviations))
}

/// Finds the smallest alpha whose budgets fit the reduction plus reserves and
/// admit a feasible filler plan.
pub fn plan_host(
    beta: f64,
    reduction_hist: &BTreeMap<u32, usize>,
    reserve: &BTreeMap<u32, usize>,
) -> Result<HostPlan> {
    plan_host_styled(beta, reduction_hist, reserve, FillerStyle::Compact)
}

pub fn plan_host_styled(
    beta: f64,
    reduction_hist: &BTreeMap<u32, usize>,
    reserve: &BTreeMap<u32, usize>,
    style: FillerStyle,
) -> Result<HostPlan> {
    if beta <= 2.0 {
        return Err(Error::InvalidParam(format!("beta must exceed 2, got {beta}")));
    }
    if reduction_hist.contains_key(&0) {
        return Err(Error::InvalidParam("reduction has isolated nodes".into()));
    }
    // Initial guess: every class holds its requirement plus one spare.
    let mut alpha = 1.0f64;
    for (&d, &count) in reduction_hist.iter().chain(reserve.iter()) {
        let need = (count
            + reduction_hist.get(&d).copied().unwrap_or(0).min(reserve.get(&d).copied().unwrap_or(0))
            + 2) as f64;
        alpha = alpha.max((need * (d as f64).powf(beta)).ln());
    }
    for _ in 0..4000 {
        let targets = targets_for(alpha, beta);
        match plan_components(&targets, reduction_hist, reserve, style) {
            Ok((components, planned_deviations)) => {
                let total_nodes = targets.values().sum();
                return Ok(HostPlan {
                    alpha,
                    beta,
                    targets,
                    total_nodes,
                    style,
                    components,
                    planned_deviations,
                });
            }
            Err(_) => alpha += 0.02,
        }
    }
    Err(Error::GenerationFailed(
        "no feasible power-law host size found; reduction histogram too skewed".into(),
    ))
}

/// Facts about the materialized filler needed by callers.
#[derive(Debug, Clone)]
pub struct FillerFacts {
    /// Nodes of the large degree-2 cycle, in cycle order (empty if none).
    pub deg2_cycle: Vec<NodeId>,
    /// Nodes of the cubic circulant, consecutive ids stride-1 adjacent
    /// (empty under LowDensity or when the class is small).
    pub deg3_nodes: Vec<NodeId>,
    /// Filler nodes one degree away from their power-law class.
    pub deviations: usize,
}

/// Materializes the filler plan into `g`, using ids from `start` upward.
/// The graph must have been allocated with `plan.total_nodes` nodes.
pub fn build_filler(
    g: &mut DynamicGraph,
    plan: &HostPlan,
    used: &BTreeMap<u32, usize>,
    start: NodeId,
    style: FillerStyle,
) -> Result<FillerFacts> {
    assert_eq!(style, plan.style, "filler style must match the plan");
    if g.node_count() != plan.total_nodes {
        return Err(Error::DimensionMismatch(format!(
            "host graph has {} nodes, plan wants {}",
            g.node_count(),
            plan.total_nodes
        )));
    }
    let used_total: usize = used.values().sum();
    assert_eq!(used_total, start as usize, "reduction must occupy ids below `start`");
    let mut next = start;
    let mut alloc = |count: usize| -> Vec<NodeId> {
        let ids: Vec<NodeId> = (next..next + count as NodeId).collect();
        next += count as NodeId;
        ids
    };
    let mut facts =
        FillerFacts { deg2_cycle: Vec::new(), deg3_nodes: Vec::new(), deviations: plan.planned_deviations };
    for comp in &plan.components {
        match *comp {
            FillerComponent::Circulant { degree, count } => {
                let ids = alloc(count);
                let d = degree as usize;
                for s in 1..=d / 2 {
                    for v in 0..count {
                        let w = (v + s) % count;
                        g.insert_edge(ids[v], ids[w])?;
                    }
                }
                if d % 2 == 1 {
                    debug_assert!(count % 2 == 0);
                    for v in 0..count / 2 {
                        g.insert_edge(ids[v], ids[v + count / 2])?;
                    }
                }
                if degree == 3 && facts.deg3_nodes.is_empty() {
                    facts.deg3_nodes = ids;
                }
            }
            FillerComponent::Star { degree } => {
                let ids = alloc(1 + degree as usize);
                for &leaf in &ids[1..] {
                    g.insert_edge(ids[0], leaf)?;
                }
            }
            FillerComponent::Cycle { count } => {
                let ids = alloc(count);
                for v in 0..count {
                    g.insert_edge(ids[v], ids[(v + 1) % count])?;
                }
                facts.deg2_cycle = ids;
            }
            FillerComponent::CappedPath { count } => {
                let ids = alloc(count + 2);
                for w in ids.windows(2) {
                    g.insert_edge(w[0], w[1])?;
                }
            }
            FillerComponent::MatchingPairs { pairs } => {
                let ids = alloc(2 * pairs);
                for p in ids.chunks_exact(2) {
                    g.insert_edge(p[0], p[1])?;
                }
            }
            FillerComponent::PathTriple => {
                let ids = alloc(3);
                g.insert_edge(ids[0], ids[1])?;
                g.insert_edge(ids[1], ids[2])?;
            }
            FillerComponent::AttachToCycle => {
                let ids = alloc(1);
                let anchor = facts.deg2_cycle.first().copied().ok_or_else(|| {
                    Error::GenerationFailed("leftover leaf needs a cycle to attach to".into())
                })?;
                g.insert_edge(ids[0], anchor)?;
            }
        }
    }
    if (next as usize) != plan.total_nodes {
        return Err(Error::GenerationFailed(format!(
            "filler materialized {} nodes, plan had {}",
            next - start,
            plan.total_nodes - start as usize
        )));
    }
    Ok(facts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{check_power_law, PowerLawParams, PowerLawVariant};

    #[test]
    fn filler_alone_realizes_exact_power_law() {
        // No reduction at all: the filler must hit every target on the nose,
        // modulo at most one parity fix-up.
        for beta in [2.5f64, 3.0] {
            let plan =
                plan_host_styled(beta, &BTreeMap::new(), &BTreeMap::new(), FillerStyle::Compact)
                    .unwrap();
            let mut g = DynamicGraph::new(plan.total_nodes);
            let facts = build_filler(&mut g, &plan, &BTreeMap::new(), 0, FillerStyle::Compact).unwrap();
            let params =
                PowerLawParams::new(plan.alpha, beta, PowerLawVariant::Additive(1)).unwrap();
            let report = check_power_law(&g.degree_histogram(), &params);
            assert!(report.pass, "beta={beta}: {:?}", report.rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());
            assert!(report.deviation_from_exact <= 4);
            assert_eq!(report.deviation_from_exact, facts.deviations);
        }
    }

    #[test]
    fn reduction_histogram_absorbed_exactly() {
        let mut reduction = BTreeMap::new();
        reduction.insert(1u32, 14usize);
        reduction.insert(2, 33);
        reduction.insert(3, 16);
        let mut reserve = BTreeMap::new();
        reserve.insert(2u32, 18usize);
        reserve.insert(3, 24);
        let plan = plan_host(2.8, &reduction, &reserve).unwrap();
        for (&d, &count) in &reduction {
            assert!(plan.targets[&d] >= count + reserve.get(&d).copied().unwrap_or(0));
        }
        // Materialize with a fake reduction that has the declared histogram.
        let total_used: usize = reduction.values().sum();
        let mut g = DynamicGraph::new(plan.total_nodes);
        let mut id = 0u32;
        // 16 deg-3 nodes: four K_4s.
        for _ in 0..4 {
            for a in 0..4u32 {
                for b in a + 1..4 {
                    g.insert_edge(id + a, id + b).unwrap();
                }
            }
            id += 4;
        }
        // 33 deg-2: one 33-cycle.
        let cycle_start = id;
        for v in 0..33u32 {
            g.insert_edge(cycle_start + v, cycle_start + (v + 1) % 33).unwrap();
        }
        id += 33;
        // 14 deg-1: 7 pairs.
        for _ in 0..7 {
            g.insert_edge(id, id + 1).unwrap();
            id += 2;
        }
        assert_eq!(id as usize, total_used);
        build_filler(&mut g, &plan, &reduction, id, FillerStyle::Compact).unwrap();
        let params = PowerLawParams::new(plan.alpha, 2.8, PowerLawVariant::Additive(1)).unwrap();
        let report = check_power_law(&g.degree_histogram(), &params);
        assert!(report.pass);
        assert!(report.deviation_from_exact <= 4);
    }

    #[test]
    fn low_density_filler_has_no_dense_component() {
        let plan = plan_host_styled(3.0, &BTreeMap::new(), &BTreeMap::new(), FillerStyle::LowDensity)
            .unwrap();
        let mut g = DynamicGraph::new(plan.total_nodes);
        build_filler(&mut g, &plan, &BTreeMap::new(), 0, FillerStyle::LowDensity).unwrap();
        let (rho, _) = crate::graph::densest_subgraph(&g);
        assert!(rho <= crate::Rational::new(1, 1), "filler density {rho} too high");
    }
}
