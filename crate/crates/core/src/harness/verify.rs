//! Structural and lemma verification per construction, plus bench and export.

use super::driver::{make_driver, BuildParams, Family, VariantName};
use super::{run_reduction, RecomputeAdapter};
use crate::error::{Error, Result};
use crate::gadgets::matching as mg;
use crate::gadgets::partial as pg;
use crate::gadgets::stpath as sg;
use crate::gadgets::{densest as dg, LabelMap};
use crate::graph::{
    bfs_distance, check_power_law, expansion_lower_bound_spectral, is_bipartite, is_connected,
    max_matching_size, DynamicGraph, PowerLawParams, PowerLawVariant,
};
use crate::oumv::{generate_instance, BitMatrix, GenMode};
use std::fmt::Write as _;

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: String,
    pub pass: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct VerificationReport {
    pub family: String,
    pub variant: String,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,measured,pass\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{},{}", c.name, c.measured.replace(',', ";"), c.pass as u8);
        }
        out
    }
}

struct Checks(Vec<CheckResult>);

impl Checks {
    fn push(&mut self, name: &str, measured: impl Into<String>, pass: bool) {
        self.0.push(CheckResult { name: name.into(), measured: measured.into(), pass });
    }
}

fn derive(seed: u64, k: u64) -> u64 {
    seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(k | 1)
}

fn node_count_formula(params: &BuildParams) -> Option<usize> {
    let n = params.effective_n();
    match (params.family, params.variant) {
        (Family::Matching, VariantName::Const) => Some(4 * n * n + 8 * n + 2),
        (Family::Matching, VariantName::Expander) => Some(16 * n * n + 16 * n + 2),
        (Family::St, VariantName::Const) => Some(4 * n * n + 2 * n - 2),
        (Family::Densest, VariantName::Const) => Some(n.pow(4) + 2 * n * n),
        (Family::Densest, VariantName::Expander) => Some(2 * n.pow(4) + 4 * n * n),
        _ => None,
    }
}

/// Updates-per-pair budget (the expander swap includes the power-of-two
/// dimension doubling; power-law rounds include the rollback).
fn update_budget(params: &BuildParams) -> usize {
    let n = params.effective_n();
    match (params.family, params.variant) {
        (Family::Matching | Family::St, VariantName::Expander) => 10 * n,
        (Family::Densest, _) => 16 * n,
        (_, VariantName::PowerLaw) => 16 * n,
        _ => 6 * n,
    }
}

/// Runs all structural and lemma checks for one construction, over `trials`
/// random instances. Deterministic given the seed.
pub fn verify_construction(params: &BuildParams, trials: usize) -> Result<VerificationReport> {
    let mut checks = Checks(Vec::new());
    let n = params.effective_n();

    // Oracle equivalence and budgets over random instances.
    let mut mismatches = 0usize;
    let mut max_updates_per_pair = 0usize;
    let mut queries_ok = true;
    for trial in 0..trials {
        let inst = generate_instance(n, GenMode::Uniform, derive(params.seed, trial as u64))?;
        let mut driver = make_driver(params, &inst.matrix)?;
        let mut adapter = RecomputeAdapter::new();
        let run = run_reduction(driver.as_mut(), &inst, &mut adapter, false)?;
        mismatches += run.mismatches;
        queries_ok &= run.pairs.iter().all(|p| p.queries == 1);
        max_updates_per_pair =
            max_updates_per_pair.max(run.pairs.iter().map(|p| p.updates).max().unwrap_or(0));
    }
    checks.push(
        "decode_matches_oracle",
        format!("{mismatches} mismatches over {trials} instances"),
        mismatches == 0,
    );
    checks.push("one_query_per_pair", format!("{queries_ok}"), queries_ok);
    let budget = update_budget(params);
    checks.push(
        "update_budget",
        format!("max {max_updates_per_pair} per pair, budget {budget}"),
        max_updates_per_pair <= budget,
    );

    // Structural checks on one representative instance.
    let inst = generate_instance(n, GenMode::Uniform, derive(params.seed, 0))?;
    let driver = make_driver(params, &inst.matrix)?;
    if let Some(expected) = node_count_formula(params) {
        let actual = driver.graph().node_count();
        checks.push(
            "node_count_formula",
            format!("{actual} (expected {expected})"),
            actual == expected,
        );
    }
    match (params.family, params.variant) {
        (Family::Matching, VariantName::Const | VariantName::Varying) => {
            verify_matching_flat(params, &inst, &mut checks)?;
        }
        (Family::Matching, VariantName::Expander) => {
            verify_matching_expander(params, &inst, &mut checks)?;
        }
        (Family::Matching, VariantName::PowerLaw) => {
            verify_matching_powerlaw(params, &inst, &mut checks)?;
        }
        (Family::St, VariantName::Const | VariantName::Approx | VariantName::Varying) => {
            verify_st_flat(params, &inst, &mut checks)?;
        }
        (Family::St, VariantName::Expander) => {
            verify_st_expander(params, &inst, &mut checks)?;
        }
        (Family::St, VariantName::PowerLaw) => {
            verify_st_powerlaw(params, &inst, &mut checks)?;
        }
        (Family::Densest, _) => {
            verify_densest(params, &inst, &mut checks)?;
        }
        (Family::DecrementalSt | Family::DecrementalMatching, _) => {
            verify_decremental(params, &inst, &mut checks)?;
        }
        (family, variant) => {
            return Err(Error::InvalidParam(format!(
                "family {} has no `{}` variant",
                family.name(),
                variant.name()
            )))
        }
    }
    let pass = checks.0.iter().all(|c| c.pass);
    Ok(VerificationReport {
        family: params.family.name().into(),
        variant: params.variant.name().into(),
        n: params.n,
        seed: params.seed,
        trials,
        checks: checks.0,
        pass,
    })
}

fn verify_matching_flat(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let (mut g, layout) = match params.variant {
        VariantName::Const => mg::build_matching_const(n, &inst.matrix)?,
        _ => mg::build_matching_varying(n, params.t, &inst.matrix)?,
    };
    layout.base.validate(&g)?;
    let mut per_op_ok = true;
    let mut max_degree = 0usize;
    let mut dichotomy = true;
    for (u, v) in &inst.pairs {
        let mut scratch = g.clone();
        scratch.clear_log();
        mg::apply_pair_matching(&mut g, &layout, u, v)?;
        for &op in g.update_log() {
            scratch.apply(op)?;
            let (deg, _) = scratch.degree_stats();
            max_degree = max_degree.max(deg);
            if params.variant == VariantName::Const {
                per_op_ok &= is_bipartite(&scratch).is_some() && deg <= 3;
            }
        }
        g.clear_log();
        let size = max_matching_size(&g);
        let half = layout.expected_nodes / 2;
        dichotomy &= size == half || size == half - 1;
        // Fast decode agrees with full recomputation.
        let fast = mg::decide_matching(&g, &layout)?;
        dichotomy &= fast == (size == half);
    }
    match params.variant {
        VariantName::Const => {
            checks.push("bipartite_and_deg3_after_every_op", format!("max degree {max_degree}"), per_op_ok);
        }
        _ => {
            let bound = (n as f64).powf(2.0 * params.t / (1.0 + params.t));
            let c = max_degree as f64 / bound;
            checks.push(
                "varying_degree_bound",
                format!("max degree {max_degree}, c = {c:.2} vs n^(2t/(1+t)) = {bound:.2}"),
                max_degree as f64 <= 3.0 * bound + 3.0,
            );
        }
    }
    checks.push("matching_dichotomy_half_or_half_minus_one", format!("{dichotomy}"), dichotomy);
    Ok(())
}

fn verify_matching_expander(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let (mut g, mut layout, cert) = mg::build_matching_expander(n, &inst.matrix, params.seed)?;
    checks.push("build_expansion_certificate", format!("{:.4}", cert.value_f64()), cert.value_f64() > 0.0);
    let mut min_cert = f64::INFINITY;
    let mut connected_ok = true;
    let mut dichotomy = true;
    let mut base_valid = true;
    let spectral_per_op = g.node_count() <= 1000;
    for (u, v) in &inst.pairs {
        let mut scratch = g.clone();
        scratch.clear_log();
        mg::apply_pair_matching_expander(&mut g, &mut layout, u, v)?;
        for &op in g.update_log() {
            scratch.apply(op)?;
            connected_ok &= is_connected(&scratch);
            if spectral_per_op {
                let c = expansion_lower_bound_spectral(&scratch);
                min_cert = min_cert.min(c.value_f64());
            }
        }
        g.clear_log();
        if !spectral_per_op {
            min_cert = min_cert.min(expansion_lower_bound_spectral(&g).value_f64());
        }
        base_valid &= layout.base.validate(&g).is_ok();
        let size = max_matching_size(&g);
        let half = layout.expected_nodes / 2;
        dichotomy &= size == half || size == half - 1;
    }
    checks.push("connected_after_every_op", format!("{connected_ok}"), connected_ok);
    checks.push("spectral_certificate_positive", format!("min {min_cert:.4}"), min_cert > 0.0);
    checks.push("base_matching_valid_at_all_times", format!("{base_valid}"), base_valid);
    checks.push("matching_dichotomy_half_or_half_minus_one", format!("{dichotomy}"), dichotomy);
    Ok(())
}

fn verify_matching_powerlaw(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let mut state = mg::build_matching_powerlaw(n, params.beta, params.seed, &inst.matrix)?;
    // Left-side degree table, row for row.
    let layout = state.layout.clone();
    let row = |g: &DynamicGraph, nodes: Vec<crate::NodeId>| {
        let mut hist = std::collections::BTreeMap::new();
        for v in nodes {
            *hist.entry(g.degree(v) as u32).or_insert(0usize) += 1;
        }
        hist
    };
    let l1 = row(&state.graph, (1..=n).map(|i| layout.l1(i)).collect());
    let l2 = row(&state.graph, (0..=n).map(|i| layout.l2(i)).collect());
    let l3 = row(
        &state.graph,
        (1..=2 * n).flat_map(|i| (0..=n).map(move |j| (i, j))).map(|(i, j)| layout.l3(i, j)).collect(),
    );
    let l4 = row(
        &state.graph,
        (1..=2 * n).flat_map(|i| (0..=n).map(move |j| (i, j))).map(|(i, j)| layout.l4(i, j)).collect(),
    );
    let expect = |pairs: &[(u32, usize)]| -> std::collections::BTreeMap<u32, usize> {
        pairs.iter().copied().filter(|&(_, c)| c > 0).collect()
    };
    let table_ok = l1 == expect(&[(2, n)])
        && l2 == expect(&[(1, 1), (2, n)])
        && l3 == expect(&[(1, 2 * n), (2, 2 * n * n)])
        && l4 == expect(&[(2, 2 * n), (3, 2 * n * n)]);
    checks.push(
        "left_degree_table",
        format!("L1 {l1:?} L2 {l2:?} L3 {l3:?} L4 {l4:?}"),
        table_ok,
    );
    let params_pl =
        PowerLawParams::new(state.host_alpha, params.beta, PowerLawVariant::Additive(1))?;
    let report = check_power_law(&state.graph.degree_histogram(), &params_pl);
    checks.push(
        "host_power_law_additive1",
        format!("{} violating, {} off exact", report.violating_nodes, report.deviation_from_exact),
        report.pass && report.deviation_from_exact <= 4,
    );
    // Rollback exactness and the dichotomy across the stream.
    let before = state.graph.degree_histogram();
    let mut rollback_ok = true;
    let mut dichotomy = true;
    for (u, v) in &inst.pairs {
        state.apply_pair(u, v)?;
        let size = max_matching_size(&state.graph);
        let expected_half = state.perfect_size();
        dichotomy &= size == expected_half || size == expected_half - 1;
        state.rollback()?;
        rollback_ok &= state.graph.degree_histogram() == before;
    }
    checks.push("rollback_exact", format!("{rollback_ok}"), rollback_ok);
    checks.push("matching_dichotomy_half_or_half_minus_one", format!("{dichotomy}"), dichotomy);
    checks.push(
        "rewire_pairs_disjoint",
        format!("{} pairs", state.rewires.len()),
        state.rewires.len() == 2 * n,
    );
    Ok(())
}

fn verify_st_flat(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let (mut g, layout) = match params.variant {
        VariantName::Const => sg::build_st_const(n, &inst.matrix)?,
        VariantName::Approx => sg::build_st_approx(n, params.delta, &inst.matrix)?,
        _ => sg::build_st_varying(n, params.t, &inst.matrix)?,
    };
    let layer_ok = g
        .edges()
        .all(|(a, b)| layout.layer[a as usize].abs_diff(layout.layer[b as usize]) == 1);
    checks.push("edges_connect_consecutive_layers", format!("{layer_ok}"), layer_ok);
    let mut per_op_ok = true;
    let mut max_degree = 0usize;
    let mut floor_ok = true;
    let floor = layout.layer[layout.t as usize] as usize;
    let mut one_distances = std::collections::BTreeSet::new();
    for (k, (u, v)) in inst.pairs.iter().enumerate() {
        let mut scratch = g.clone();
        scratch.clear_log();
        sg::apply_pair_st(&mut g, &layout, u, v)?;
        for &op in g.update_log() {
            scratch.apply(op)?;
            let (deg, _) = scratch.degree_stats();
            max_degree = max_degree.max(deg);
            if params.variant != VariantName::Varying {
                per_op_ok &= is_bipartite(&scratch).is_some() && deg <= 3;
            }
        }
        g.clear_log();
        let dist = bfs_distance(&g, layout.s, layout.t);
        if let Some(d) = dist {
            floor_ok &= d >= floor;
            if inst.truth[k] {
                one_distances.insert(d);
            }
        }
        floor_ok &= (dist == Some(floor)) == (inst.truth[k] && params.variant != VariantName::Approx)
            || params.variant == VariantName::Approx;
    }
    match params.variant {
        VariantName::Varying => {
            let bound = (n as f64).powf(2.0 * params.t / (1.0 + params.t));
            checks.push(
                "varying_degree_bound",
                format!("max degree {max_degree} vs n^(2t/(1+t)) = {bound:.2}"),
                max_degree as f64 <= 3.0 * bound + 3.0,
            );
        }
        _ => {
            checks.push("bipartite_and_deg3_after_every_op", format!("max degree {max_degree}"), per_op_ok);
        }
    }
    checks.push(
        "distance_floor",
        format!("floor {floor}, one-distances {one_distances:?}"),
        floor_ok && one_distances.len() <= 1,
    );
    if params.variant == VariantName::Approx {
        let (t1, t0) = (layout.one_distance, layout.zero_distance);
        let ratio = match (t1, t0) {
            (Some(t1), Some(t0)) => t0 as f64 / t1 as f64,
            _ => f64::INFINITY,
        };
        checks.push(
            "approx_gap_ratio",
            format!("T1 {t1:?} T0 {t0:?} ratio {ratio:.3} vs 3-delta {}", 3.0 - params.delta),
            ratio >= 3.0 - params.delta,
        );
    }
    Ok(())
}

fn verify_st_expander(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let (mut g, mut layout, cert) = sg::build_st_expander(n, &inst.matrix, params.seed)?;
    checks.push("build_expansion_certificate", format!("{:.4}", cert.value_f64()), cert.value_f64() > 0.0);
    let bip = is_bipartite(&g).is_some();
    checks.push("bipartite_with_dummies", format!("{bip}"), bip);
    let layer_ok = g
        .edges()
        .all(|(a, b)| layout.layer[a as usize].abs_diff(layout.layer[b as usize]) == 1);
    checks.push("edges_connect_consecutive_layers", format!("{layer_ok}"), layer_ok);
    let mut min_cert = f64::INFINITY;
    let mut floor_ok = true;
    let floor = layout.layer[layout.t as usize] as usize;
    let spectral_per_op = g.node_count() <= 1000;
    for (k, (u, v)) in inst.pairs.iter().enumerate() {
        let mut scratch = g.clone();
        scratch.clear_log();
        sg::apply_pair_st_swap(&mut g, &mut layout, u, v)?;
        for &op in g.update_log() {
            scratch.apply(op)?;
            if spectral_per_op {
                min_cert = min_cert.min(expansion_lower_bound_spectral(&scratch).value_f64());
            }
        }
        g.clear_log();
        if !spectral_per_op {
            min_cert = min_cert.min(expansion_lower_bound_spectral(&g).value_f64());
        }
        let dist = bfs_distance(&g, layout.s, layout.t);
        if let Some(d) = dist {
            floor_ok &= d >= floor;
        }
        floor_ok &= (dist == Some(floor)) == inst.truth[k];
    }
    checks.push("spectral_certificate_positive", format!("min {min_cert:.4}"), min_cert > 0.0);
    checks.push("distance_floor", format!("floor {floor}"), floor_ok);
    Ok(())
}

fn verify_st_powerlaw(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let mut state = sg::build_st_powerlaw(n, params.beta, params.seed, &inst.matrix)?;
    // Left-side degree table: L1 1x2+(n-2)x3; L2 nx2; L3 2nx2+(3n^2-5n)x3;
    // L4 n^2 x1 + 2n^2 x2.
    let layout = state.layout.clone();
    let deg = |g: &DynamicGraph, v: crate::NodeId| g.degree(v) as u32;
    let mut rows_ok = true;
    {
        let g = &state.graph;
        let mut l1 = std::collections::BTreeMap::new();
        for h in 1..n {
            *l1.entry(deg(g, layout.l_tree_node(h))).or_insert(0usize) += 1;
        }
        let mut expect1 = std::collections::BTreeMap::new();
        expect1.insert(2u32, 1usize);
        if n > 2 {
            expect1.insert(3, n - 2);
        }
        rows_ok &= l1 == expect1;
        rows_ok &= (1..=n).all(|i| deg(g, layout.l2(i)) == 2);
        let mut l3 = std::collections::BTreeMap::new();
        let mut l4 = std::collections::BTreeMap::new();
        for tree in 1..=3 * n {
            for h in 1..n {
                *l3.entry(deg(g, layout.forest_internal(tree, h))).or_insert(0usize) += 1;
            }
            for j in 1..=n {
                *l4.entry(deg(g, layout.l4(tree, j))).or_insert(0usize) += 1;
            }
        }
        let mut expect3 = std::collections::BTreeMap::new();
        expect3.insert(2u32, 2 * n);
        if 3 * n * n > 5 * n {
            expect3.insert(3, 3 * n * n - 5 * n);
        }
        rows_ok &= l3 == expect3;
        let mut expect4 = std::collections::BTreeMap::new();
        expect4.insert(1u32, n * n);
        expect4.insert(2, 2 * n * n);
        rows_ok &= l4 == expect4;
    }
    checks.push("left_degree_table", format!("{rows_ok}"), rows_ok);
    let params_pl =
        PowerLawParams::new(state.host_alpha, params.beta, PowerLawVariant::Additive(1))?;
    let report = check_power_law(&state.graph.degree_histogram(), &params_pl);
    checks.push(
        "host_power_law_additive1",
        format!("{} violating, {} off exact", report.violating_nodes, report.deviation_from_exact),
        report.pass && report.deviation_from_exact <= 4,
    );
    let before = state.graph.degree_histogram();
    let mut fixed = true;
    let mut floor_ok = true;
    let floor = 4 * state.layout.log_n as usize + 3;
    for (k, (u, v)) in inst.pairs.iter().enumerate() {
        sg::apply_pair_st_swap(&mut state.graph, &mut state.layout, u, v)?;
        state.graph.clear_log();
        fixed &= state.graph.degree_histogram() == before;
        let dist = bfs_distance(&state.graph, state.layout.s, state.layout.t);
        floor_ok &= (dist == Some(floor)) == inst.truth[k];
        if let Some(d) = dist {
            floor_ok &= d >= floor;
        }
    }
    checks.push("degree_distribution_fixed_under_input", format!("{fixed}"), fixed);
    checks.push("distance_floor", format!("floor {floor}"), floor_ok);
    Ok(())
}

fn verify_densest(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let (mut g, mut layout, powerlaw_bits) = match params.variant {
        VariantName::Const => {
            let (g, l) = dg::build_dense_const(n, params.d, &inst.matrix, params.seed)?;
            (g, l, None)
        }
        VariantName::Expander => {
            let (g, l, cert) = dg::build_dense_expander(n, params.d, &inst.matrix, params.seed)?;
            checks.push(
                "build_expansion_certificate",
                format!("{:.4}", cert.value_f64()),
                cert.value_f64() > 0.0,
            );
            (g, l, None)
        }
        VariantName::PowerLaw => {
            let st = dg::build_dense_powerlaw(n, params.beta, params.seed, &inst.matrix)?;
            let bits = (st.host_alpha, st.reduction_nodes);
            (st.graph, st.layout, Some(bits))
        }
        other => {
            return Err(Error::InvalidParam(format!(
                "densest has no `{}` variant",
                other.name()
            )))
        }
    };
    let d = layout.d;
    checks.push(
        "gadget_templates",
        format!(
            "vector: {} edges cut {}; matrix: {} edges cut {}",
            layout.vec_template().edges.len(),
            layout.vec_template().min_cut,
            layout.mat_template().edges.len(),
            layout.mat_template().min_cut
        ),
        layout.vec_template().edges.len() == d * n
            && layout.vec_template().min_cut >= (2 * d).min(6)
            && layout.mat_template().edges.len() == d * n * n - 1,
    );
    let (max_deg, _) = g.degree_stats();
    checks.push(
        "max_degree",
        format!("{max_deg} vs 2d+1 = {}", 2 * d + 1),
        match params.variant {
            VariantName::PowerLaw => true, // host includes high-degree padding by design
            _ => max_deg <= 2 * d + 1,
        },
    );
    if params.variant == VariantName::PowerLaw {
        let (alpha, core_nodes) = powerlaw_bits.unwrap();
        let mut core_hist = std::collections::BTreeMap::new();
        for v in 0..core_nodes {
            *core_hist.entry(g.degree(v as crate::NodeId) as u32).or_insert(0usize) += 1;
        }
        let mut expected = std::collections::BTreeMap::new();
        *expected.entry(2u32).or_insert(0usize) += 4 * n * n + 8 * n;
        *expected.entry(2 * d as u32).or_insert(0) += n.pow(4);
        *expected.entry(2 * d as u32 + 1).or_insert(0) += 2 * n * n;
        checks.push(
            "core_degree_histogram",
            format!("{core_hist:?}"),
            core_hist == expected,
        );
        let params_pl = PowerLawParams::new(alpha, params.beta, PowerLawVariant::Additive(1))?;
        let report = check_power_law(&g.degree_histogram(), &params_pl);
        checks.push(
            "host_power_law_additive1",
            format!("{} violating, {} off exact", report.violating_nodes, report.deviation_from_exact),
            report.pass && report.deviation_from_exact <= 4,
        );
    }
    let mut decisions_ok = true;
    let mut witness_ok = true;
    for (k, (u, v)) in inst.pairs.iter().enumerate() {
        dg::apply_pair_dense(&mut g, &mut layout, u, v)?;
        g.clear_log();
        let (bit, witness) = dg::decide_dense(&g, &layout);
        decisions_ok &= bit == inst.truth[k];
        if bit {
            // The witness always contains at least one full matrix gadget of
            // a set bit with both cross edges present.
            let w: std::collections::BTreeSet<crate::NodeId> =
                witness.clone().unwrap_or_default().into_iter().collect();
            let mut found = false;
            'scan: for (i, j) in inst.matrix.iter_ones() {
                let full = (0..layout.mat_size()).all(|k| w.contains(&layout.m_node(i, j, k)));
                if full
                    && w.contains(&layout.u_node(i, j))
                    && w.contains(&layout.v_node(j, i))
                {
                    found = true;
                    break 'scan;
                }
            }
            witness_ok &= found;
            if let Some(pad) = layout.padding_start {
                witness_ok &= w.iter().all(|&v| v < pad);
            }
        }
    }
    checks.push("decisions_exact_rational", format!("{decisions_ok}"), decisions_ok);
    checks.push("witness_contains_full_set_gadget", format!("{witness_ok}"), witness_ok);
    Ok(())
}

fn verify_decremental(
    params: &BuildParams,
    inst: &crate::oumv::OuMvInstance,
    checks: &mut Checks,
) -> Result<()> {
    let n = params.effective_n();
    let mut state = match params.family {
        Family::DecrementalSt => pg::build_decremental_st(n, &inst.matrix)?,
        _ => pg::build_decremental_matching(n, &inst.matrix)?,
    };
    let mut decode_ok = true;
    let mut per_round_budget = 0usize;
    for (k, (u, v)) in inst.pairs.iter().enumerate() {
        let (bit, count) = pg::advance_round(&mut state, u, v)?;
        decode_ok &= bit == inst.truth[k];
        per_round_budget = per_round_budget.max(count);
    }
    let deletions_only = state
        .graph
        .update_log()
        .iter()
        .all(|op| matches!(op, crate::graph::UpdateOp::Delete(_, _)));
    checks.push("stream_deletions_only", format!("{deletions_only}"), deletions_only);
    checks.push(
        "per_round_budget",
        format!("max {per_round_budget} vs 6n = {}", 6 * n),
        per_round_budget <= 6 * n,
    );
    checks.push("decode_matches_oracle_rounds", format!("{decode_ok}"), decode_ok);
    // Reversal: insertions only, decode preserved under measured thresholds.
    let replay = pg::reverse_to_incremental(&state);
    let outcomes = pg::run_reversed(&replay)?;
    let reversed_ok = outcomes
        .iter()
        .all(|o| o.decoded == inst.truth[o.round - 1]);
    checks.push("reversed_decode_matches_oracle", format!("{reversed_ok}"), reversed_ok);
    Ok(())
}

// ---------------------------------------------------------------- bench

#[derive(Debug, Clone, serde::Serialize)]
pub struct BenchRow {
    pub family: String,
    pub variant: String,
    pub n: usize,
    pub nodes: usize,
    pub edges: usize,
    pub total_updates: usize,
    pub total_queries: usize,
    pub build_ms: u128,
    pub run_ms: u128,
}

/// Runs one instance per n and reports sizes, counts and wall time.
/// Counts are deterministic for a fixed seed; timings naturally are not.
pub fn bench(params: &BuildParams, n_list: &[usize], adapter_name: &str) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in n_list {
        let mut p = params.clone();
        p.n = n;
        let inst = generate_instance(p.effective_n(), GenMode::Uniform, derive(p.seed, n as u64))?;
        let t0 = std::time::Instant::now();
        let mut driver = make_driver(&p, &inst.matrix)?;
        let build_ms = t0.elapsed().as_millis();
        let nodes = driver.graph().node_count();
        let edges = driver.graph().edge_count();
        let mut adapter = RecomputeAdapter::new();
        let t1 = std::time::Instant::now();
        let run = run_reduction(driver.as_mut(), &inst, &mut adapter, false)?;
        let run_ms = t1.elapsed().as_millis();
        let _ = adapter_name;
        rows.push(BenchRow {
            family: p.family.name().into(),
            variant: p.variant.name().into(),
            n,
            nodes,
            edges,
            total_updates: run.total_updates,
            total_queries: run.total_queries,
            build_ms,
            run_ms,
        });
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out =
        String::from("family,variant,n,nodes,edges,total_updates,total_queries,build_ms,run_ms\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.family, r.variant, r.n, r.nodes, r.edges, r.total_updates, r.total_queries, r.build_ms, r.run_ms
        );
    }
    out
}

// ---------------------------------------------------------------- export

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Edges,
    Layout,
}

impl ExportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "edges" | "edge-list" => Ok(ExportFormat::Edges),
            "layout" => Ok(ExportFormat::Layout),
            other => Err(Error::UnknownMode(format!("export format `{other}`"))),
        }
    }
}

fn label_map_for(params: &BuildParams, matrix: &BitMatrix) -> Result<Option<LabelMap>> {
    let n = params.effective_n();
    Ok(match (params.family, params.variant) {
        (Family::Matching, VariantName::Const) => {
            Some(mg::build_matching_const(n, matrix)?.1.label_map())
        }
        (Family::Matching, VariantName::Varying) => {
            Some(mg::build_matching_varying(n, params.t, matrix)?.1.label_map())
        }
        (Family::Matching, VariantName::Expander) => {
            Some(mg::build_matching_expander(n, matrix, params.seed)?.1.label_map())
        }
        (Family::St, VariantName::Const) => Some(sg::build_st_const(n, matrix)?.1.label_map()),
        (Family::St, VariantName::Approx) => {
            Some(sg::build_st_approx(n, params.delta, matrix)?.1.label_map())
        }
        (Family::St, VariantName::Varying) => {
            Some(sg::build_st_varying(n, params.t, matrix)?.1.label_map())
        }
        (Family::St, VariantName::Expander) => {
            Some(sg::build_st_expander(n, matrix, params.seed)?.1.label_map())
        }
        (Family::Densest, VariantName::Const) => {
            Some(dg::build_dense_const(n, params.d, matrix, params.seed)?.1.label_map())
        }
        (Family::DecrementalSt, _) => Some(pg::build_decremental_st(n, matrix)?.label_map()),
        (Family::DecrementalMatching, _) => {
            Some(pg::build_decremental_matching(n, matrix)?.label_map())
        }
        _ => None,
    })
}

/// Renders the built construction in the requested format.
pub fn export(params: &BuildParams, matrix: &BitMatrix, format: ExportFormat) -> Result<String> {
    let driver = make_driver(params, matrix)?;
    match format {
        ExportFormat::Edges => Ok(driver.graph().to_edge_list()),
        ExportFormat::Dot => {
            let labels = label_map_for(params, matrix)?;
            let base = driver.base_matching();
            Ok(driver.graph().to_dot(
                &format!("{}_{}", params.family.name().replace('-', "_"), params.variant.name()),
                labels.as_ref().map(|l| l.labels()),
                base.as_ref(),
            ))
        }
        ExportFormat::Layout => {
            let labels = label_map_for(params, matrix)?
                .ok_or_else(|| Error::InvalidParam("no layout map for this variant".into()))?;
            Ok(labels.to_text())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_matching_const_passes() {
        let params = BuildParams::new(Family::Matching, VariantName::Const, 4);
        let report = verify_construction(&params, 3).unwrap();
        assert!(report.pass, "{report:?}");
        // N = 4*16 + 32 + 2 = 98.
        let f = report.checks.iter().find(|c| c.name == "node_count_formula").unwrap();
        assert!(f.measured.contains("98"));
    }

    #[test]
    fn verify_st_expander_passes() {
        let params = BuildParams::new(Family::St, VariantName::Expander, 2);
        let report = verify_construction(&params, 2).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn verify_densest_powerlaw_passes() {
        let mut params = BuildParams::new(Family::Densest, VariantName::PowerLaw, 5);
        params.beta = 3.0;
        let report = verify_construction(&params, 1).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn export_roundtrip_and_layout_bijection() {
        let params = BuildParams::new(Family::Matching, VariantName::Const, 2);
        let m = BitMatrix::identity(2);
        let edges = export(&params, &m, ExportFormat::Edges).unwrap();
        let g = DynamicGraph::from_edge_list(&edges).unwrap();
        assert_eq!(g.node_count(), 34);
        let dot = export(&params, &m, ExportFormat::Dot).unwrap();
        assert_eq!(dot.matches("n0").count() >= 1, true);
        let layout = export(&params, &m, ExportFormat::Layout).unwrap();
        assert_eq!(layout.lines().count(), 34);
    }

    #[test]
    fn bench_rows_deterministic_counts() {
        let params = BuildParams::new(Family::St, VariantName::Const, 2);
        let a = bench(&params, &[2, 4], "recompute").unwrap();
        let b = bench(&params, &[2, 4], "recompute").unwrap();
        assert_eq!(a.len(), 2);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.total_updates, y.total_updates);
            assert_eq!(x.total_queries, y.total_queries);
            assert_eq!(x.nodes, y.nodes);
        }
    }
}
