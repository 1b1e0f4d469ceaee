use serde::{Deserialize, Serialize};

use crate::gp::KernelFamily;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartMethod {
    Random,
    BestQueried,
    Initial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method", content = "n_init")]
pub enum InitMethod {
    None,
    RandomWalk(usize),
    UniformRandom(usize),
}

/// Settings shared by every method for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub k: usize,
    /// Combo-subgraph size cap.
    pub q: usize,
    pub failtol: usize,
    /// Hop cap for subgraph sampling; `None` leaves only `q` binding.
    pub max_hops: Option<usize>,
    /// Objective evaluations after initialization.
    pub budget: usize,
    pub restart_method: RestartMethod,
    pub init_method: InitMethod,
    pub kernel: KernelFamily,
    pub gp_restarts: usize,
    /// Standard deviation of Gaussian noise added to every observation.
    pub noise_sigma: f64,
    /// When set, random restarts draw only from nodes revealed so far.
    pub hidden_graph: bool,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            k: 4,
            q: 4000,
            failtol: 30,
            max_hops: None,
            budget: 300,
            restart_method: RestartMethod::BestQueried,
            init_method: InitMethod::None,
            kernel: KernelFamily::Diffusion,
            gp_restarts: 5,
            noise_sigma: 0.0,
            hidden_graph: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Every violated constraint, in field order.
    pub fn problems(&self, num_nodes: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.k == 0 {
            out.push("k must be at least 1".into());
        }
        if self.k > num_nodes {
            out.push(format!("k = {} exceeds the {num_nodes} graph nodes", self.k));
        }
        if self.q == 0 {
            out.push("q must be at least 1".into());
        }
        if self.failtol == 0 {
            out.push("failtol must be at least 1".into());
        }
        if self.max_hops == Some(0) {
            out.push("max_hops must be at least 1".into());
        }
        if self.budget == 0 {
            out.push("budget must be at least 1".into());
        }
        if let InitMethod::RandomWalk(0) | InitMethod::UniformRandom(0) = self.init_method {
            out.push("n_init must be at least 1".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            out.push(format!("noise_sigma must be finite and nonnegative, got {}", self.noise_sigma));
        }
        out
    }

    pub fn validate(&self, num_nodes: usize) -> Result<()> {
        match self.problems(num_nodes).as_slice() {
            [] => Ok(()),
            p => Err(Error::InvalidParameters(p.join("; "))),
        }
    }
}
