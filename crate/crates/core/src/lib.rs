//! Approximate graph pattern mining.
//!
//! Estimates the number of subgraph isomorphisms `C(G, P)` of a small pattern
//! `P` inside a large undirected graph `G` to relative error `ε` at
//! confidence `1 − δ`. Each sampler walks the pattern in a greedy matching
//! order and, at every step, draws the next graph vertex either uniformly
//! from the candidate set or from a distribution that approximates the number
//! of successful extensions each candidate admits. The mean of many such
//! sampler outputs is an unbiased estimate of the count; an online
//! normal-approximation check decides when to stop.
//!
//! The [`oracle`] module provides exact enumeration and distribution
//! diagnostics for desk-scale verification.

pub mod convergence;
pub mod engine;
mod error;
pub mod experiments;
pub mod generate;
pub mod graph;
pub mod oracle;
pub mod par;
pub mod pattern;
pub mod preprocess;
pub mod sampler;

pub use convergence::ConvergenceStats;
pub use engine::{MiningResult, Mode, Orientation, RunConfig, Session};
pub use error::{Error, Result};
pub use graph::{Adjacency, Graph, OrientedGraph, VertexId};
pub use pattern::{Pattern, Plan};
pub use preprocess::{ClusteringMode, PreprocessedStats};
pub use sampler::Terms;
