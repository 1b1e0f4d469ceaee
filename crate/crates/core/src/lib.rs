//! Bayesian optimization of expensive black-box functions defined on
//! k-node subsets of a graph.
//!
//! Every k-subset of the underlying graph is a node of a *combo-graph*;
//! two subsets are adjacent when they differ in exactly one element and the
//! two differing elements are adjacent in the underlying graph. The search
//! never materializes the combo-graph. Instead it samples a local
//! combo-subgraph around a focal subset, fits a Gaussian process with a
//! spectral kernel on that subgraph, and moves the focal subset whenever a
//! query improves on it.
//!
//! Module map:
//! - [`graph`]: graphs, generators, edge-list ingestion, spectral operators, node scores.
//! - [`combo`]: combo-nodes, the recursive combo-subgraph sampler and brute-force oracles.
//! - [`gp`]: spectral graph kernels and the Gaussian-process surrogate.
//! - [`search`]: expected improvement and the optimization loop.
//! - [`baselines`]: the comparison methods.
//! - [`objectives`]: synthetic and simulation-based objectives.
//! - [`analysis`]: rank correlation, signal smoothness and kernel validation.
//! - [`harness`]: experiment configuration, orchestration and result files.

pub mod analysis;
pub mod baselines;
pub mod combo;
pub mod error;
pub mod gp;
pub mod graph;
pub mod harness;
pub mod objectives;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
