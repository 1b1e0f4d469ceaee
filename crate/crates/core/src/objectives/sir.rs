//! Discrete-time SIR epidemics on contact networks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

use super::{NodeScores, Objective};
use crate::graph::Graph;
use crate::rng::{mix, StreamRng};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Susceptible,
    Infected,
    Recovered,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SirParams {
    /// Fraction of the population infected at time 0.
    pub init_fraction: f64,
    pub infection_rate: f64,
    pub recovery_rate: f64,
    /// Per-step probability of infection from outside the network.
    pub spontaneous_rate: f64,
    pub horizon: usize,
    pub n_sims: usize,
}

impl SirParams {
    pub fn flatten_curve() -> Self {
        Self {
            init_fraction: 0.1,
            infection_rate: 1e-3,
            recovery_rate: 1e-2,
            spontaneous_rate: 0.0,
            horizon: 120,
            n_sims: 100,
        }
    }

    pub fn patient_zero() -> Self {
        Self {
            init_fraction: 0.005,
            infection_rate: 0.01,
            recovery_rate: 0.01,
            spontaneous_rate: 0.005,
            horizon: 100,
            n_sims: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(unit(self.init_fraction) && unit(self.infection_rate) && unit(self.recovery_rate) && unit(self.spontaneous_rate))
            || self.horizon == 0
            || self.n_sims == 0
        {
            return Err(Error::InvalidParameters(format!("SIR parameters {self:?}")));
        }
        Ok(())
    }
}

/// Compartment sizes at steps `0..=horizon` plus each node's infection time.
#[derive(Clone, Debug)]
pub struct SirTrace {
    pub susceptible: Vec<usize>,
    pub infected: Vec<usize>,
    pub recovered: Vec<usize>,
    /// Cumulative count of unprotected nodes ever infected.
    pub ever_infected: Vec<usize>,
    pub infection_time: Vec<Option<usize>>,
}

/// Runs one epidemic. Protected nodes start (and stay) Recovered;
/// `round(p·N)` unprotected nodes, drawn uniformly, start Infected.
pub fn sir_simulate(g: &Graph, protected: &[usize], params: &SirParams, seed: u64) -> Result<SirTrace> {
    params.validate()?;
    let n = g.num_nodes();
    let mut status = vec![Status::Susceptible; n];
    for &v in protected {
        if v >= n {
            return Err(Error::IndexOutOfRange { index: v, len: n });
        }
        status[v] = Status::Recovered;
    }
    let mut rng = StreamRng::seed_from_u64(seed);
    let free: Vec<usize> = (0..n).filter(|&v| status[v] == Status::Susceptible).collect();
    let n_seed = ((params.init_fraction * n as f64).round() as usize).min(free.len());
    let mut infection_time = vec![None; n];
    for slot in sample(&mut rng, free.len(), n_seed) {
        status[free[slot]] = Status::Infected;
        infection_time[free[slot]] = Some(0);
    }

    let count = |status: &[Status], s: Status| status.iter().filter(|&&x| x == s).count();
    let mut trace = SirTrace {
        susceptible: vec![count(&status, Status::Susceptible)],
        infected: vec![n_seed],
        recovered: vec![count(&status, Status::Recovered)],
        ever_infected: vec![n_seed],
        infection_time: Vec::new(),
    };
    let escape = 1.0 - params.infection_rate;
    let mut next = status.clone();
    for t in 1..=params.horizon {
        for v in 0..n {
            next[v] = match status[v] {
                Status::Recovered => Status::Recovered,
                Status::Infected => {
                    if rng.random::<f64>() < params.recovery_rate {
                        Status::Recovered
                    } else {
                        Status::Infected
                    }
                }
                Status::Susceptible => {
                    let pressure = g.neighbors(v).iter().filter(|&&u| status[u] == Status::Infected).count();
                    let stay = (1.0 - params.spontaneous_rate) * escape.powi(pressure as i32);
                    if rng.random::<f64>() < 1.0 - stay {
                        infection_time[v] = Some(t);
                        Status::Infected
                    } else {
                        Status::Susceptible
                    }
                }
            };
        }
        std::mem::swap(&mut status, &mut next);
        trace.susceptible.push(count(&status, Status::Susceptible));
        trace.infected.push(count(&status, Status::Infected));
        trace.recovered.push(count(&status, Status::Recovered));
        trace.ever_infected.push(infection_time.iter().filter(|x| x.is_some()).count());
    }
    trace.infection_time = infection_time;
    Ok(trace)
}

/// First step at which at least half the population has ever been
/// infected, or the horizon when that never happens.
pub fn flatten_curve_threshold_time(trace: &SirTrace, population: usize) -> usize {
    let horizon = trace.ever_infected.len() - 1;
    trace
        .ever_infected
        .iter()
        .position(|&c| 2 * c >= population)
        .unwrap_or(horizon)
}

/// `E[t*] / horizon` with the subset protected, over seeded replicas.
pub struct FlattenCurveObjective {
    graph: Graph,
    params: SirParams,
    seed: u64,
}

impl FlattenCurveObjective {
    pub fn new(graph: Graph, params: SirParams, seed: u64) -> Result<Self> {
        params.validate()?;
        Ok(Self { graph, params, seed })
    }
}

impl Objective for FlattenCurveObjective {
    fn name(&self) -> String {
        "flatten_curve".into()
    }

    fn universe(&self) -> usize {
        self.graph.num_nodes()
    }

    fn value(&self, subset: &[usize]) -> Result<f64> {
        let mut total = 0.0;
        for r in 0..self.params.n_sims {
            let trace = sir_simulate(&self.graph, subset, &self.params, mix(&[self.seed, r as u64]))?;
            total += flatten_curve_threshold_time(&trace, self.graph.num_nodes()) as f64;
        }
        Ok(total / (self.params.n_sims as f64 * self.params.horizon as f64))
    }

    fn is_stochastic(&self) -> bool {
        true
    }
}

/// Node scores `(1 - τ_v/T)²` from one unprotected epidemic, 0 for nodes
/// never infected.
pub fn patient_zero_scores(g: &Graph, params: &SirParams, seed: u64) -> Result<NodeScores> {
    let trace = sir_simulate(g, &[], params, seed)?;
    let horizon = params.horizon as f64;
    let scores = trace
        .infection_time
        .iter()
        .map(|t| t.map_or(0.0, |t| (1.0 - t as f64 / horizon).powi(2)))
        .collect();
    Ok(NodeScores::average("patient_zero", scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_ba, generate_sbm};
    use proptest::prelude::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    fn params(p: f64, beta: f64, gamma: f64, eps: f64, horizon: usize) -> SirParams {
        SirParams {
            init_fraction: p,
            infection_rate: beta,
            recovery_rate: gamma,
            spontaneous_rate: eps,
            horizon,
            n_sims: 1,
        }
    }

    #[test]
    fn no_transmission_no_spread() {
        let g = generate_ba(60, 3, 2).unwrap();
        let tr = sir_simulate(&g, &[], &params(0.1, 0.0, 0.05, 0.0, 50), 1).unwrap();
        assert!(tr.ever_infected.windows(2).all(|w| w[0] == w[1]));
        assert!(tr.infected.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn certain_recovery() {
        let g = generate_ba(60, 3, 2).unwrap();
        let tr = sir_simulate(&g, &[], &params(0.1, 0.0, 1.0, 0.0, 5), 1).unwrap();
        assert_eq!(tr.infected[0], 6);
        assert_eq!(tr.infected[1], 0);
        assert_eq!(tr.recovered[1], 6);
    }

    #[test]
    fn certain_infection_on_k5() {
        let tr = sir_simulate(&complete(5), &[], &params(0.2, 1.0, 0.0, 0.0, 3), 7).unwrap();
        assert_eq!(tr.infected[0], 1);
        assert_eq!(tr.infected[1], 5);
        let tr = sir_simulate(&complete(5), &[3], &params(0.2, 1.0, 0.0, 0.0, 3), 7).unwrap();
        assert_eq!(tr.infected[1], 4);
        assert_eq!(tr.infection_time[3], None);
    }

    #[test]
    fn threshold_time_edges() {
        let g = generate_ba(50, 2, 2).unwrap();
        let obj = FlattenCurveObjective::new(g.clone(), SirParams { n_sims: 3, ..params(0.6, 0.1, 0.1, 0.0, 40) }, 0).unwrap();
        assert_eq!(obj.value(&[0, 1]).unwrap(), 0.0);
        let obj = FlattenCurveObjective::new(g, SirParams { n_sims: 3, ..params(0.2, 0.0, 0.1, 0.0, 40) }, 0).unwrap();
        assert_eq!(obj.value(&[0, 1]).unwrap(), 1.0);
    }

    #[test]
    fn patient_zero_scores_shape() {
        let g = generate_sbm(&[40, 40], 0.2, 0.01, 3).unwrap();
        let s = patient_zero_scores(&g, &SirParams { init_fraction: 0.05, ..SirParams::patient_zero() }, 4).unwrap();
        assert!(s.scores().iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!(s.scores().iter().any(|&v| v == 1.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn conservation(seed in any::<u64>(), beta in 0.0f64..1.0, gamma in 0.0f64..1.0, eps in 0.0f64..0.2,
                        protect in proptest::collection::btree_set(0usize..40, 0..6)) {
            let g = generate_ba(40, 2, seed).unwrap();
            let protected: Vec<usize> = protect.into_iter().collect();
            let tr = sir_simulate(&g, &protected, &params(0.1, beta, gamma, eps, 30), seed).unwrap();
            for t in 0..=30 {
                prop_assert_eq!(tr.susceptible[t] + tr.infected[t] + tr.recovered[t], 40);
            }
            prop_assert!(tr.recovered.windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(tr.ever_infected.windows(2).all(|w| w[0] <= w[1]));
            for &v in &protected {
                prop_assert!(tr.infection_time[v].is_none());
            }
        }
    }
}
