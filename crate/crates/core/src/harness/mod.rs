//! Drives any reduction against a dynamic-algorithm adapter, decodes query
//! answers into bits, compares them against the brute-force oracle, and
//! emits verification reports.

mod driver;
mod verify;

pub use driver::{make_driver, BuildParams, Family, ReductionDriver, VariantName};
pub use verify::{bench, bench_csv, export, verify_construction, BenchRow, CheckResult, ExportFormat, VerificationReport};

use crate::error::{Error, Result};
use crate::graph::{bfs_distance, max_matching_size, DynamicGraph, Matching, NodeId, UpdateOp};
use crate::oumv::OuMvInstance;
use crate::Rational;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryKind {
    Distance { s: NodeId, t: NodeId },
    MatchingSize,
    Density,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryAnswer {
    Distance(Option<usize>),
    MatchingSize(usize),
    Density(Rational),
}

impl QueryAnswer {
    fn render(&self) -> String {
        match self {
            QueryAnswer::Distance(Some(d)) => d.to_string(),
            QueryAnswer::Distance(None) => "inf".into(),
            QueryAnswer::MatchingSize(s) => s.to_string(),
            QueryAnswer::Density(r) => format!("{}/{}", r.numer(), r.denom()),
        }
    }
}

/// The dynamic-algorithm contract: initialize from a snapshot, ingest update
/// ops, answer one query at a time. In verify mode every answer is checked
/// against the reference solver on the driver's graph.
pub trait AlgorithmAdapter {
    fn name(&self) -> &'static str;
    fn init(&mut self, graph: &DynamicGraph);
    fn apply(&mut self, op: UpdateOp) -> Result<()>;
    fn query(&mut self, kind: &QueryKind) -> Result<QueryAnswer>;
}

/// Reference adapter: records updates, recomputes the answer from scratch at
/// query time with the exact solvers.
#[derive(Default)]
pub struct RecomputeAdapter {
    graph: Option<DynamicGraph>,
}

impl RecomputeAdapter {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Computes a query answer on a graph with the reference solvers.
pub fn reference_answer(graph: &DynamicGraph, kind: &QueryKind) -> QueryAnswer {
    match *kind {
        QueryKind::Distance { s, t } => QueryAnswer::Distance(bfs_distance(graph, s, t)),
        QueryKind::MatchingSize => QueryAnswer::MatchingSize(max_matching_size(graph)),
        QueryKind::Density => QueryAnswer::Density(crate::graph::densest_subgraph(graph).0),
    }
}

impl AlgorithmAdapter for RecomputeAdapter {
    fn name(&self) -> &'static str {
        "recompute"
    }
    fn init(&mut self, graph: &DynamicGraph) {
        self.graph = Some(graph.clone());
    }
    fn apply(&mut self, op: UpdateOp) -> Result<()> {
        self.graph.as_mut().expect("init first").apply(op)
    }
    fn query(&mut self, kind: &QueryKind) -> Result<QueryAnswer> {
        Ok(reference_answer(self.graph.as_ref().expect("init first"), kind))
    }
}

/// Matching adapter that answers size queries from a cached base matching
/// plus one augmenting-path search, instead of a full recomputation.
pub struct AugmentingAdapter {
    graph: Option<DynamicGraph>,
    base: Matching,
    s: NodeId,
    t: NodeId,
}

impl AugmentingAdapter {
    pub fn new(base: Matching, s: NodeId, t: NodeId) -> Self {
        AugmentingAdapter { graph: None, base, s, t }
    }
}

impl AlgorithmAdapter for AugmentingAdapter {
    fn name(&self) -> &'static str {
        "recompute-augmenting"
    }
    fn init(&mut self, graph: &DynamicGraph) {
        self.graph = Some(graph.clone());
    }
    fn apply(&mut self, op: UpdateOp) -> Result<()> {
        self.graph.as_mut().expect("init first").apply(op)
    }
    fn query(&mut self, kind: &QueryKind) -> Result<QueryAnswer> {
        let g = self.graph.as_ref().expect("init first");
        match kind {
            QueryKind::MatchingSize => {
                let aug = crate::graph::augmenting_path_exists(g, &self.base, self.s, self.t)?;
                Ok(QueryAnswer::MatchingSize(self.base.size() + usize::from(aug)))
            }
            other => Ok(reference_answer(g, other)),
        }
    }
}

/// Fault-injection adapter: distances come back one short. Exists so harness
/// tests can show that a wrong algorithm fails on the first planted-one pair.
pub struct BrokenDistanceAdapter(pub RecomputeAdapter);

impl AlgorithmAdapter for BrokenDistanceAdapter {
    fn name(&self) -> &'static str {
        "broken-distance"
    }
    fn init(&mut self, graph: &DynamicGraph) {
        self.0.init(graph);
    }
    fn apply(&mut self, op: UpdateOp) -> Result<()> {
        self.0.apply(op)
    }
    fn query(&mut self, kind: &QueryKind) -> Result<QueryAnswer> {
        match self.0.query(kind)? {
            QueryAnswer::Distance(d) => Ok(QueryAnswer::Distance(d.map(|x| x.saturating_sub(1)))),
            other => Ok(other),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PairOutcome {
    pub pair: usize,
    pub updates: usize,
    pub queries: usize,
    pub answer: String,
    pub decoded: bool,
    pub oracle: bool,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FailureRepro {
    pub pair: usize,
    pub instance_text: String,
    pub update_log_len: usize,
}

/// One full drive of an instance through a construction and an adapter.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ReductionRun {
    pub family: String,
    pub variant: String,
    pub n: usize,
    pub node_count: usize,
    pub adapter: String,
    pub pairs: Vec<PairOutcome>,
    pub total_updates: usize,
    pub total_queries: usize,
    pub mismatches: usize,
    pub failure: Option<FailureRepro>,
}

impl ReductionRun {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.failure.is_none()
    }

    /// Per-pair CSV: pair, updates, queries, answer, decoded, oracle.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pair,updates,queries,answer,decoded,oracle\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                p.pair, p.updates, p.queries, p.answer, p.decoded as u8, p.oracle as u8
            );
        }
        out
    }
}

/// Runs every pair of `instance` through the driver and adapter: apply the
/// pair's updates, one query, decode, compare against the oracle bit.
/// Fails fast on the first mismatch with a minimal repro.
pub fn run_reduction(
    driver: &mut dyn ReductionDriver,
    instance: &OuMvInstance,
    adapter: &mut dyn AlgorithmAdapter,
    check_answers: bool,
) -> Result<ReductionRun> {
    let padded = instance.zero_padded_to(driver.instance_dimension())?;
    adapter.init(driver.graph());
    let mut run = ReductionRun {
        family: driver.family_name(),
        variant: driver.variant_name(),
        n: instance.n(),
        node_count: driver.graph().node_count(),
        adapter: adapter.name().to_string(),
        pairs: Vec::new(),
        total_updates: 0,
        total_queries: 0,
        mismatches: 0,
        failure: None,
    };
    for (k, (u, v)) in padded.pairs.iter().enumerate() {
        let ops = driver.apply_pair(u, v)?;
        for &op in &ops {
            adapter.apply(op).map_err(|e| {
                Error::GenerationFailed(format!("adapter rejected op {op:?} at pair {k}: {e}"))
            })?;
        }
        let answer = adapter.query(&driver.query_kind())?;
        if check_answers {
            let expected = reference_answer(driver.graph(), &driver.query_kind());
            if answer != expected {
                return Err(Error::GenerationFailed(format!(
                    "adapter answer {} disagrees with reference {} at pair {k}",
                    answer.render(),
                    expected.render()
                )));
            }
        }
        let decoded = driver.decode(&answer)?;
        let oracle = padded.truth[k];
        run.total_updates += ops.len();
        run.total_queries += 1;
        run.pairs.push(PairOutcome {
            pair: k + 1,
            updates: ops.len(),
            queries: 1,
            answer: answer.render(),
            decoded,
            oracle,
        });
        if decoded != oracle {
            run.mismatches += 1;
            run.failure = Some(FailureRepro {
                pair: k + 1,
                instance_text: instance.to_text(),
                update_log_len: driver.graph().update_log().len(),
            });
            return Ok(run);
        }
        let post = driver.post_query()?;
        for &op in &post {
            adapter.apply(op)?;
        }
        run.total_updates += post.len();
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oumv::{generate_instance, GenMode};

    #[test]
    fn run_matching_const_roundtrip() {
        let inst = generate_instance(2, GenMode::Uniform, 1).unwrap();
        let params = BuildParams::new(Family::Matching, VariantName::Const, 2);
        let mut driver = make_driver(&params, &inst.matrix).unwrap();
        let mut adapter = RecomputeAdapter::new();
        let run = run_reduction(driver.as_mut(), &inst, &mut adapter, true).unwrap();
        assert!(run.passed(), "{run:?}");
        assert_eq!(run.total_queries, 2);
    }

    #[test]
    fn broken_adapter_fails_on_first_planted_one_pair() {
        let inst = generate_instance(2, GenMode::PlantedOne, 3).unwrap();
        let params = BuildParams::new(Family::St, VariantName::Const, 2);
        let mut driver = make_driver(&params, &inst.matrix).unwrap();
        let mut adapter = BrokenDistanceAdapter(RecomputeAdapter::new());
        let run = run_reduction(driver.as_mut(), &inst, &mut adapter, false).unwrap();
        assert_eq!(run.mismatches, 1);
        let failure = run.failure.unwrap();
        assert_eq!(failure.pair, 1);
        assert!(!failure.instance_text.is_empty());
    }

    #[test]
    fn augmenting_adapter_agrees_with_recompute() {
        let inst = generate_instance(3, GenMode::Uniform, 5).unwrap();
        let params = BuildParams::new(Family::Matching, VariantName::Const, 3);
        let mut driver = make_driver(&params, &inst.matrix).unwrap();
        let base = driver.base_matching().expect("matching layout has a base");
        let (s, t) = driver.free_endpoints().unwrap();
        let mut adapter = AugmentingAdapter::new(base, s, t);
        let run = run_reduction(driver.as_mut(), &inst, &mut adapter, true).unwrap();
        assert!(run.passed());
    }
}
