//! One driver per construction family: owns the reference graph, turns
//! vector pairs into update ops, and decodes query answers.

use super::{QueryAnswer, QueryKind};
use crate::error::{Error, Result};
use crate::gadgets::densest::{
    apply_pair_dense, build_dense_const, build_dense_expander, build_dense_powerlaw, DenseLayout,
    PowerLawDenseState,
};
use crate::gadgets::matching::{
    apply_pair_matching, apply_pair_matching_expander, build_matching_const,
    build_matching_expander, build_matching_powerlaw, build_matching_varying, MatchingLayout,
    PowerLawMatchingState,
};
use crate::gadgets::partial::{
    build_decremental_matching, build_decremental_st, DecrementalState, PartialKind,
};
use crate::gadgets::stpath::{
    apply_pair_st, apply_pair_st_swap, build_st_approx, build_st_const, build_st_expander,
    build_st_powerlaw, build_st_varying, ForestLayout,
};
use crate::graph::{DynamicGraph, Matching, NodeId, UpdateOp};
use crate::oumv::{BitMatrix, BitVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Matching,
    St,
    Densest,
    DecrementalSt,
    DecrementalMatching,
}

impl Family {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "matching" => Ok(Family::Matching),
            "st" | "st-distance" => Ok(Family::St),
            "densest" => Ok(Family::Densest),
            "decremental-st" => Ok(Family::DecrementalSt),
            "decremental-matching" => Ok(Family::DecrementalMatching),
            other => Err(Error::UnknownMode(format!("family `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Matching => "matching",
            Family::St => "st",
            Family::Densest => "densest",
            Family::DecrementalSt => "decremental-st",
            Family::DecrementalMatching => "decremental-matching",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantName {
    Const,
    Varying,
    Approx,
    Expander,
    PowerLaw,
}

impl VariantName {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "const" => Ok(VariantName::Const),
            "varying" => Ok(VariantName::Varying),
            "approx" => Ok(VariantName::Approx),
            "expander" => Ok(VariantName::Expander),
            "powerlaw" | "power-law" => Ok(VariantName::PowerLaw),
            other => Err(Error::UnknownMode(format!("variant `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            VariantName::Const => "const",
            VariantName::Varying => "varying",
            VariantName::Approx => "approx",
            VariantName::Expander => "expander",
            VariantName::PowerLaw => "powerlaw",
        }
    }
}

/// Everything needed to build one construction.
#[derive(Debug, Clone)]
pub struct BuildParams {
    pub family: Family,
    pub variant: VariantName,
    pub n: usize,
    pub t: f64,
    pub delta: f64,
    pub beta: f64,
    pub d: Option<usize>,
    pub seed: u64,
}

impl BuildParams {
    pub fn new(family: Family, variant: VariantName, n: usize) -> Self {
        BuildParams { family, variant, n, t: 0.0, delta: 1.0, beta: 3.0, d: None, seed: 0 }
    }

    /// Power-of-two padding target for the st families.
    pub fn effective_n(&self) -> usize {
        match self.family {
            Family::St | Family::DecrementalSt => self.n.next_power_of_two().max(2),
            _ => self.n,
        }
    }
}

/// A built construction: the reference graph, per-pair update generation,
/// and the decision rule decoding a query answer into a bit.
pub trait ReductionDriver {
    fn family_name(&self) -> String;
    fn variant_name(&self) -> String;
    fn graph(&self) -> &DynamicGraph;
    /// Vector dimension the driver expects (instances are zero-padded to it).
    fn instance_dimension(&self) -> usize;
    fn query_kind(&self) -> QueryKind;
    fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>>;
    fn decode(&self, answer: &QueryAnswer) -> Result<bool>;
    /// Ops applied after the query (rollback or end-of-round sweep).
    fn post_query(&mut self) -> Result<Vec<UpdateOp>> {
        Ok(Vec::new())
    }
    /// Base matching, where the layout provides one.
    fn base_matching(&self) -> Option<Matching> {
        None
    }
    /// Unmatched endpoints (s, t) of the base matching, when meaningful.
    fn free_endpoints(&self) -> Option<(NodeId, NodeId)> {
        None
    }
}

fn take_ops(g: &mut DynamicGraph) -> Vec<UpdateOp> {
    let ops = g.update_log().to_vec();
    g.clear_log();
    ops
}

// ---------------------------------------------------------------- matching

pub struct MatchingDriver {
    graph: DynamicGraph,
    pub layout: MatchingLayout,
    variant: VariantName,
}

impl ReductionDriver for MatchingDriver {
    fn family_name(&self) -> String {
        "matching".into()
    }
    fn variant_name(&self) -> String {
        self.variant.name().into()
    }
    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }
    fn instance_dimension(&self) -> usize {
        self.layout.n
    }
    fn query_kind(&self) -> QueryKind {
        QueryKind::MatchingSize
    }
    fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        match self.variant {
            VariantName::Expander => {
                apply_pair_matching_expander(&mut self.graph, &mut self.layout, u, v)?;
            }
            _ => {
                apply_pair_matching(&mut self.graph, &self.layout, u, v)?;
            }
        }
        Ok(take_ops(&mut self.graph))
    }
    fn decode(&self, answer: &QueryAnswer) -> Result<bool> {
        match answer {
            QueryAnswer::MatchingSize(size) => Ok(2 * size == self.layout.expected_nodes),
            _ => Err(Error::InvalidParam("matching driver expects a size answer".into())),
        }
    }
    fn base_matching(&self) -> Option<Matching> {
        Some(self.layout.base.clone())
    }
    fn free_endpoints(&self) -> Option<(NodeId, NodeId)> {
        Some((self.layout.s, self.layout.t))
    }
}

pub struct MatchingPowerLawDriver {
    pub state: PowerLawMatchingState,
}

impl ReductionDriver for MatchingPowerLawDriver {
    fn family_name(&self) -> String {
        "matching".into()
    }
    fn variant_name(&self) -> String {
        "powerlaw".into()
    }
    fn graph(&self) -> &DynamicGraph {
        &self.state.graph
    }
    fn instance_dimension(&self) -> usize {
        self.state.layout.n
    }
    fn query_kind(&self) -> QueryKind {
        QueryKind::MatchingSize
    }
    fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        let ops = self.state.apply_pair(u, v)?;
        self.state.graph.clear_log();
        Ok(ops)
    }
    fn decode(&self, answer: &QueryAnswer) -> Result<bool> {
        match answer {
            QueryAnswer::MatchingSize(size) => Ok(self.state.decide_from(*size)),
            _ => Err(Error::InvalidParam("matching driver expects a size answer".into())),
        }
    }
    fn post_query(&mut self) -> Result<Vec<UpdateOp>> {
        let ops = self.state.rollback()?;
        self.state.graph.clear_log();
        Ok(ops)
    }
    fn base_matching(&self) -> Option<Matching> {
        Some(self.state.layout.base.clone())
    }
    fn free_endpoints(&self) -> Option<(NodeId, NodeId)> {
        Some((self.state.layout.s, self.state.layout.t))
    }
}

// ---------------------------------------------------------------- st

pub struct StDriver {
    graph: DynamicGraph,
    pub layout: ForestLayout,
    variant: VariantName,
}

impl ReductionDriver for StDriver {
    fn family_name(&self) -> String {
        "st".into()
    }
    fn variant_name(&self) -> String {
        self.variant.name().into()
    }
    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }
    fn instance_dimension(&self) -> usize {
        self.layout.n
    }
    fn query_kind(&self) -> QueryKind {
        QueryKind::Distance { s: self.layout.s, t: self.layout.t }
    }
    fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        match self.variant {
            VariantName::Expander | VariantName::PowerLaw => {
                apply_pair_st_swap(&mut self.graph, &mut self.layout, u, v)?;
            }
            _ => {
                apply_pair_st(&mut self.graph, &self.layout, u, v)?;
            }
        }
        Ok(take_ops(&mut self.graph))
    }
    fn decode(&self, answer: &QueryAnswer) -> Result<bool> {
        match answer {
            QueryAnswer::Distance(d) => {
                Ok(crate::gadgets::stpath::decide_st_from(&self.layout, *d))
            }
            _ => Err(Error::InvalidParam("st driver expects a distance answer".into())),
        }
    }
}

// ---------------------------------------------------------------- densest

pub struct DensestDriver {
    graph: DynamicGraph,
    pub layout: DenseLayout,
    variant: VariantName,
}

impl ReductionDriver for DensestDriver {
    fn family_name(&self) -> String {
        "densest".into()
    }
    fn variant_name(&self) -> String {
        self.variant.name().into()
    }
    fn graph(&self) -> &DynamicGraph {
        &self.graph
    }
    fn instance_dimension(&self) -> usize {
        self.layout.n
    }
    fn query_kind(&self) -> QueryKind {
        QueryKind::Density
    }
    fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        apply_pair_dense(&mut self.graph, &mut self.layout, u, v)?;
        Ok(take_ops(&mut self.graph))
    }
    fn decode(&self, answer: &QueryAnswer) -> Result<bool> {
        match answer {
            QueryAnswer::Density(rho) => Ok(*rho >= self.layout.threshold),
            _ => Err(Error::InvalidParam("densest driver expects a density answer".into())),
        }
    }
}

// ---------------------------------------------------------------- partial

pub struct DecrementalDriver {
    pub state: DecrementalState,
}

impl ReductionDriver for DecrementalDriver {
    fn family_name(&self) -> String {
        match self.state.kind {
            PartialKind::StDistance => "decremental-st".into(),
            PartialKind::Matching => "decremental-matching".into(),
        }
    }
    fn variant_name(&self) -> String {
        "const".into()
    }
    fn graph(&self) -> &DynamicGraph {
        &self.state.graph
    }
    fn instance_dimension(&self) -> usize {
        self.state.n
    }
    fn query_kind(&self) -> QueryKind {
        match self.state.kind {
            PartialKind::StDistance => QueryKind::Distance { s: self.state.s, t: self.state.t },
            PartialKind::Matching => QueryKind::MatchingSize,
        }
    }
    fn apply_pair(&mut self, u: &BitVector, v: &BitVector) -> Result<Vec<UpdateOp>> {
        let ops = self.state.round_pre(u, v)?;
        self.state.graph.clear_log();
        Ok(ops)
    }
    fn decode(&self, answer: &QueryAnswer) -> Result<bool> {
        let measured = match (answer, self.state.kind) {
            (QueryAnswer::Distance(d), PartialKind::StDistance) => *d,
            (QueryAnswer::MatchingSize(size), PartialKind::Matching) => {
                Some(self.state.graph.node_count() - 2 * size)
            }
            _ => return Err(Error::InvalidParam("answer kind mismatch".into())),
        };
        Ok(self.state.decide(measured))
    }
    fn post_query(&mut self) -> Result<Vec<UpdateOp>> {
        let ops = self.state.round_post()?;
        self.state.graph.clear_log();
        Ok(ops)
    }
}

/// Builds the requested construction for one instance matrix.
pub fn make_driver(params: &BuildParams, matrix: &BitMatrix) -> Result<Box<dyn ReductionDriver>> {
    let n = params.effective_n();
    let matrix = if matrix.n() == n {
        matrix.clone()
    } else if matrix.n() < n {
        let mut m = BitMatrix::zeros(n);
        for (i, j) in matrix.iter_ones() {
            m.set(i, j, true);
        }
        m
    } else {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} exceeds n {n}",
            matrix.n()
        )));
    };
    match (params.family, params.variant) {
        (Family::Matching, VariantName::Const) => {
            let (graph, layout) = build_matching_const(n, &matrix)?;
            Ok(Box::new(MatchingDriver { graph, layout, variant: VariantName::Const }))
        }
        (Family::Matching, VariantName::Varying) => {
            let (graph, layout) = build_matching_varying(n, params.t, &matrix)?;
            Ok(Box::new(MatchingDriver { graph, layout, variant: VariantName::Varying }))
        }
        (Family::Matching, VariantName::Expander) => {
            let (graph, layout, _) = build_matching_expander(n, &matrix, params.seed)?;
            Ok(Box::new(MatchingDriver { graph, layout, variant: VariantName::Expander }))
        }
        (Family::Matching, VariantName::PowerLaw) => {
            let state = build_matching_powerlaw(n, params.beta, params.seed, &matrix)?;
            Ok(Box::new(MatchingPowerLawDriver { state }))
        }
        (Family::St, VariantName::Const) => {
            let (graph, layout) = build_st_const(n, &matrix)?;
            Ok(Box::new(StDriver { graph, layout, variant: VariantName::Const }))
        }
        (Family::St, VariantName::Approx) => {
            let (graph, layout) = build_st_approx(n, params.delta, &matrix)?;
            Ok(Box::new(StDriver { graph, layout, variant: VariantName::Approx }))
        }
        (Family::St, VariantName::Varying) => {
            let (graph, layout) = build_st_varying(n, params.t, &matrix)?;
            Ok(Box::new(StDriver { graph, layout, variant: VariantName::Varying }))
        }
        (Family::St, VariantName::Expander) => {
            let (graph, layout, _) = build_st_expander(n, &matrix, params.seed)?;
            Ok(Box::new(StDriver { graph, layout, variant: VariantName::Expander }))
        }
        (Family::St, VariantName::PowerLaw) => {
            let state = build_st_powerlaw(n, params.beta, params.seed, &matrix)?;
            Ok(Box::new(StDriver {
                graph: state.graph,
                layout: state.layout,
                variant: VariantName::PowerLaw,
            }))
        }
        (Family::Densest, VariantName::Const) => {
            let (graph, layout) = build_dense_const(n, params.d, &matrix, params.seed)?;
            Ok(Box::new(DensestDriver { graph, layout, variant: VariantName::Const }))
        }
        (Family::Densest, VariantName::Expander) => {
            let (graph, layout, _) = build_dense_expander(n, params.d, &matrix, params.seed)?;
            Ok(Box::new(DensestDriver { graph, layout, variant: VariantName::Expander }))
        }
        (Family::Densest, VariantName::PowerLaw) => {
            let PowerLawDenseState { graph, layout, .. } =
                build_dense_powerlaw(n, params.beta, params.seed, &matrix)?;
            Ok(Box::new(DensestDriver { graph, layout, variant: VariantName::PowerLaw }))
        }
        (Family::DecrementalSt, VariantName::Const) => {
            let state = build_decremental_st(n, &matrix)?;
            Ok(Box::new(DecrementalDriver { state }))
        }
        (Family::DecrementalMatching, VariantName::Const) => {
            let state = build_decremental_matching(n, &matrix)?;
            Ok(Box::new(DecrementalDriver { state }))
        }
        (family, variant) => Err(Error::InvalidParam(format!(
            "family {} has no `{}` variant",
            family.name(),
            variant.name()
        ))),
    }
}
