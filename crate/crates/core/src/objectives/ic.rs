//! Independent cascades with per-edge coin flips keyed by replica.

use super::Objective;
use crate::graph::Graph;
use crate::rng::{mix, unit_from_key};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IcParams {
    pub activation_prob: f64,
    pub n_sims: usize,
}

impl Default for IcParams {
    fn default() -> Self {
        Self {
            activation_prob: 0.05,
            n_sims: 1000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IcOutcome {
    pub activated: usize,
    /// Cumulative activated count after each cascade step, starting with
    /// the seeds.
    pub per_step: Vec<usize>,
}

/// One cascade. The attempt of `u` on `v` succeeds iff a hash of
/// `(seed, u, v)` falls below `p`, so cascades from nested seed sets
/// share their randomness.
pub fn ic_simulate(g: &Graph, seeds: &[usize], p: f64, seed: u64) -> Result<IcOutcome> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameters(format!("activation probability {p}")));
    }
    let n = g.num_nodes();
    let mut active = vec![false; n];
    let mut frontier = Vec::new();
    for &s in seeds {
        if s >= n {
            return Err(Error::IndexOutOfRange { index: s, len: n });
        }
        if !std::mem::replace(&mut active[s], true) {
            frontier.push(s);
        }
    }
    let mut count = frontier.len();
    let mut per_step = vec![count];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &u in &frontier {
            for &v in g.neighbors(u) {
                if !active[v] && unit_from_key(mix(&[seed, u as u64, v as u64])) < p {
                    active[v] = true;
                    next.push(v);
                }
            }
        }
        count += next.len();
        if !next.is_empty() {
            per_step.push(count);
        }
        frontier = next;
    }
    Ok(IcOutcome { activated: count, per_step })
}

/// Mean activated fraction over `n_sims` replicas.
pub struct InfluenceObjective {
    graph: Graph,
    params: IcParams,
    seed: u64,
}

impl InfluenceObjective {
    pub fn new(graph: Graph, params: IcParams, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&params.activation_prob) || params.n_sims == 0 {
            return Err(Error::InvalidParameters(format!("IC parameters {params:?}")));
        }
        Ok(Self { graph, params, seed })
    }

    /// Activated fraction of each replica, in replica order.
    pub fn replicas(&self, subset: &[usize]) -> Result<Vec<f64>> {
        let n = self.graph.num_nodes() as f64;
        (0..self.params.n_sims)
            .map(|r| {
                let out = ic_simulate(&self.graph, subset, self.params.activation_prob, mix(&[self.seed, r as u64]))?;
                Ok(out.activated as f64 / n)
            })
            .collect()
    }
}

impl Objective for InfluenceObjective {
    fn name(&self) -> String {
        "influence".into()
    }

    fn universe(&self) -> usize {
        self.graph.num_nodes()
    }

    fn value(&self, subset: &[usize]) -> Result<f64> {
        let r = self.replicas(subset)?;
        Ok(r.iter().sum::<f64>() / r.len() as f64)
    }

    fn is_stochastic(&self) -> bool {
        true
    }
}
