//! Constructions that translate online vector-matrix-vector (OuMv) instances
//! into dynamic graph update/query sequences, together with exact reference
//! solvers and structural verifiers.
//!
//! The crate is organized around three layers:
//!
//! * [`oumv`] — boolean OuMv instances, generators and the brute-force oracle;
//! * [`graph`] — a dynamic simple graph plus exact solvers (BFS distance,
//!   maximum matching, exact densest subgraph, edge expansion, global min cut)
//!   and structural checkers (bipartiteness, degree histograms, power-law fit);
//! * [`gadgets`] — the reduction graphs themselves: maximum matching,
//!   (s,t)-distance and densest-subgraph families in constant-degree,
//!   varying-degree, expander and power-law flavours, plus decremental
//!   variants, each decoding one output bit per vector pair from a single
//!   graph query.
//!
//! [`harness`] drives any construction against an [`harness::AlgorithmAdapter`],
//! compares decoded bits against the oracle, and emits verification reports.

pub mod error;
pub mod expander;
pub mod gadgets;
pub mod graph;
pub mod harness;
pub mod oracles;
pub mod oumv;

pub use error::{Error, Result};
pub use graph::{DynamicGraph, NodeId, UpdateOp};
pub use oumv::{BitMatrix, BitVector, OuMvInstance};

/// Exact rational used for all density arithmetic. Density thresholds such as
/// `d + 1/(n^2+2n)` must never be compared in floating point.
pub type Rational = num_rational::Ratio<i64>;
