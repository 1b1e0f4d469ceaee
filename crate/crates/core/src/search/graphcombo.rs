//! The combo-subgraph Bayesian optimization loop.

use std::collections::BTreeSet;

use rand::Rng;

use super::acquisition::select_next;
use super::config::{RestartMethod, RunConfig};
use super::init::{initialize_into, random_subset};
use super::record::{Hyperparameters, RunRecord};
use super::tracker::{RowContext, Tracker};
use crate::combo::{sample_combo_subgraph, ComboNode, ComboSubgraph};
use crate::gp::{GpModel, KernelSpec, DEFAULT_NOISE_VARIANCE};
use crate::graph::{Graph, NeighborOracle};
use crate::objectives::{Evaluator, Objective};
use crate::rng::{stream, StreamRng};
use crate::Result;

/// Where to continue after a restart. Random restarts draw from `pool`
/// (all nodes, or the revealed ones for a hidden graph).
pub fn restart_location<R: Rng + ?Sized>(
    method: RestartMethod,
    incumbent: &ComboNode,
    start: &ComboNode,
    pool: &[usize],
    rng: &mut R,
) -> ComboNode {
    match method {
        RestartMethod::BestQueried => incumbent.clone(),
        RestartMethod::Initial => start.clone(),
        RestartMethod::Random => random_subset(pool, incumbent.k(), rng),
    }
}

/// Nodes a random restart may draw from.
pub(crate) fn restart_pool(oracle: &NeighborOracle<'_>, k: usize, hidden: bool) -> Vec<usize> {
    if hidden {
        let revealed = oracle.revealed_nodes();
        if revealed.len() >= k {
            return revealed;
        }
    }
    (0..oracle.num_nodes()).collect()
}

pub fn run_graphcombo(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    Search::new(config, graph, objective, false)?.run()
}

/// Variant that recenters on the subgraph node with the highest posterior
/// mean instead of the best observation.
pub fn run_graphcombo_noisy(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    Search::new(config, graph, objective, true)?.run()
}

struct Search<'a, 'g> {
    config: &'a RunConfig,
    noisy: bool,
    tracker: Tracker<'a, 'g>,
    center: ComboNode,
    subgraph: ComboSubgraph,
    /// Nodes queried since the last restart; the GP trains on those inside
    /// the current subgraph.
    epoch: BTreeSet<ComboNode>,
    fails: usize,
    pending_restart: bool,
    force_center_query: bool,
    warm: Option<(KernelSpec, f64)>,
    sampler_rng: StreamRng,
    restart_rng: StreamRng,
    fit_rng: StreamRng,
}

impl<'a, 'g> Search<'a, 'g> {
    fn new(config: &'a RunConfig, graph: &'g Graph, objective: &'a dyn Objective, noisy: bool) -> Result<Self> {
        config.validate(graph.num_nodes())?;
        let evaluator = Evaluator::new(objective, config.noise_sigma, config.seed)?;
        let mut tracker = Tracker::new(evaluator, NeighborOracle::new(graph), config.budget);
        let start = initialize_into(&mut tracker, config)?;
        let label = if noisy { "graphcombo-noisy" } else { "graphcombo" };
        let mut sampler_rng = stream(config.seed, &format!("{label}/sampler"));
        let subgraph = sample_combo_subgraph(&start, config.q, config.max_hops, &mut tracker.oracle, &mut sampler_rng);
        tracker.mark_explored(subgraph.nodes());
        let epoch = tracker_init_nodes(&tracker);
        Ok(Self {
            config,
            noisy,
            tracker,
            center: start,
            subgraph,
            epoch,
            fails: 0,
            pending_restart: false,
            force_center_query: false,
            warm: None,
            sampler_rng,
            restart_rng: stream(config.seed, &format!("{label}/restart")),
            fit_rng: stream(config.seed, &format!("{label}/gp-fit")),
        })
    }

    fn resample(&mut self) {
        self.subgraph = sample_combo_subgraph(
            &self.center,
            self.config.q,
            self.config.max_hops,
            &mut self.tracker.oracle,
            &mut self.sampler_rng,
        );
        self.tracker.mark_explored(self.subgraph.nodes());
    }

    fn restart(&mut self) {
        let pool = restart_pool(&self.tracker.oracle, self.config.k, self.config.hidden_graph);
        let incumbent = self.tracker.incumbent().cloned().unwrap_or_else(|| self.center.clone());
        let start = self.tracker.start().clone();
        self.center = restart_location(self.config.restart_method, &incumbent, &start, &pool, &mut self.restart_rng);
        self.fails = 0;
        self.pending_restart = true;
        self.epoch = BTreeSet::from([self.center.clone()]);
        self.resample();
        if self.subgraph.len() == 1 && self.tracker.is_observed(&self.center) {
            // Nothing new to learn here; jump somewhere random and spend a
            // query there so the loop keeps making progress.
            let pool = restart_pool(&self.tracker.oracle, self.config.k, self.config.hidden_graph);
            self.center = random_subset(&pool, self.config.k, &mut self.restart_rng);
            self.epoch = BTreeSet::from([self.center.clone()]);
            self.resample();
            self.force_center_query = true;
        }
    }

    fn row_context(&mut self, hyperparameters: Option<Hyperparameters>) -> RowContext {
        RowContext {
            restarted: std::mem::take(&mut self.pending_restart),
            hyperparameters,
        }
    }

    fn kernel_for_subgraph(&self) -> (KernelSpec, f64) {
        let n = self.subgraph.len();
        let order = if self.config.kernel.is_polynomial() {
            self.subgraph.kernel_order()
        } else {
            2
        };
        match &self.warm {
            Some((spec, noise)) if spec.order == order && spec.validate(n).is_ok() => (spec.clone(), *noise),
            _ => (KernelSpec::new(self.config.kernel, n, order), DEFAULT_NOISE_VARIANCE),
        }
    }

    /// Local indices and mean observations of the epoch nodes inside the
    /// subgraph, ordered by local index.
    fn training_set(&self) -> (Vec<usize>, Vec<f64>) {
        let mut pairs: Vec<(usize, f64)> = self
            .epoch
            .iter()
            .filter_map(|v| Some((self.subgraph.index_of(v)?, self.tracker.mean(v)?)))
            .collect();
        pairs.sort_by_key(|p| p.0);
        pairs.into_iter().unzip()
    }

    fn run(mut self) -> Result<RunRecord> {
        while !self.tracker.done() {
            if self.force_center_query || !self.tracker.is_observed(&self.center) {
                self.force_center_query = false;
                let ctx = self.row_context(None);
                let center = self.center.clone();
                self.tracker.query(&center, ctx)?;
                self.epoch.insert(center.clone());
                self.tracker.settle(&center, false);
                continue;
            }
            let candidates: Vec<usize> = (0..self.subgraph.len())
                .filter(|&i| !self.epoch.contains(self.subgraph.node(i)))
                .collect();
            if candidates.is_empty() {
                self.restart();
                continue;
            }
            self.step(&candidates)?;
        }
        let method = if self.noisy { "graphcombo_noisy" } else { "graphcombo" };
        Ok(self.tracker.finish(method, self.config.seed))
    }

    fn step(&mut self, candidates: &[usize]) -> Result<()> {
        let (train, ys) = self.training_set();
        let (spec, noise) = self.kernel_for_subgraph();
        let basis = self.subgraph.basis()?;
        let mut model = GpModel::new(basis, train.clone(), ys.clone(), spec, noise)?;
        let report = model.fit(self.config.gp_restarts, &mut self.fit_rng)?;
        let fitted = (model.kernel().clone(), model.noise_variance());
        let best_train = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pick = select_next(&model, candidates, best_train)?;
        let hyper = Hyperparameters {
            kernel: fitted.0.clone(),
            noise_variance: fitted.1,
            log_marginal_likelihood: report.log_marginal_likelihood,
        };
        let v = self.subgraph.node(pick).clone();
        let ctx = RowContext {
            restarted: std::mem::take(&mut self.pending_restart),
            hyperparameters: Some(hyper),
        };
        let obs = self.tracker.query(&v, ctx)?;
        self.epoch.insert(v.clone());

        let (moved, improved) = if self.noisy {
            let mut train = train;
            let mut ys = ys;
            train.push(pick);
            ys.push(self.tracker.mean(&v).unwrap_or(obs.y));
            let conditioned = GpModel::new(basis, train, ys, fitted.0.clone(), fitted.1)?;
            let all: Vec<usize> = (0..self.subgraph.len()).collect();
            let post = conditioned.posterior(&all)?;
            let mut arg = 0;
            for (i, &m) in post.mean.iter().enumerate() {
                if m > post.mean[arg] {
                    arg = i;
                }
            }
            let target = self.subgraph.node(arg).clone();
            let moved = target != self.center;
            if moved {
                self.center = target;
            }
            (moved, obs.y > best_train)
        } else {
            let center_value = self.tracker.mean(&self.center).unwrap_or(f64::NEG_INFINITY);
            let mut best: Option<(f64, &ComboNode)> = None;
            for u in self.epoch.iter().filter(|u| self.subgraph.index_of(u).is_some()) {
                let m = self.tracker.mean(u).unwrap_or(f64::NEG_INFINITY);
                if best.is_none_or(|(b, _)| m > b) {
                    best = Some((m, u));
                }
            }
            match best {
                Some((m, u)) if m > center_value => {
                    self.center = u.clone();
                    (true, true)
                }
                _ => (false, false),
            }
        };
        self.warm = Some(fitted);
        if moved {
            self.resample();
        }
        if improved {
            self.fails = 0;
        } else {
            self.fails += 1;
        }
        let center = self.center.clone();
        self.tracker.settle(&center, moved);
        if self.fails >= self.config.failtol {
            self.restart();
        }
        Ok(())
    }
}

fn tracker_init_nodes(tracker: &Tracker<'_, '_>) -> BTreeSet<ComboNode> {
    let mut out = BTreeSet::new();
    let start = tracker.start().clone();
    if tracker.is_observed(&start) {
        out.insert(start);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{degree_centrality, generate_ba};
    use crate::objectives::{avg_node_score, ground_truth};
    use crate::search::InitMethod;

    fn p4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn path_reaches_optimum() {
        let g = p4();
        let obj = avg_node_score("deg", degree_centrality(&g).unwrap());
        let (opt, _) = ground_truth(&obj, 2, 100).unwrap().unwrap();
        for seed in 0..5 {
            let cfg = RunConfig { k: 2, budget: 18, seed, gp_restarts: 1, ..RunConfig::default() };
            let rec = run_graphcombo(&cfg, &g, &obj).unwrap();
            assert!(rec.invariant_violations(18).is_empty());
            assert!((rec.final_best_y().unwrap() - opt).abs() < 1e-12);
            assert_eq!(rec.rows.last().unwrap().incumbent, vec![1, 2]);
        }
    }

    #[test]
    fn deterministic_and_budgeted() {
        let g = generate_ba(60, 2, 4).unwrap();
        let obj = avg_node_score("deg", degree_centrality(&g).unwrap());
        let cfg = RunConfig {
            k: 3,
            q: 200,
            budget: 25,
            failtol: 5,
            gp_restarts: 1,
            init_method: InitMethod::RandomWalk(5),
            seed: 11,
            ..RunConfig::default()
        };
        let a = run_graphcombo(&cfg, &g, &obj).unwrap();
        let b = run_graphcombo(&cfg, &g, &obj).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 25);
        assert_eq!(a.evaluations, 30);
        assert!(a.invariant_violations(25).is_empty());
        let noisy = run_graphcombo_noisy(&cfg, &g, &obj).unwrap();
        assert!(noisy.invariant_violations(25).is_empty());
        assert_eq!(noisy, run_graphcombo_noisy(&cfg, &g, &obj).unwrap());
    }

    #[test]
    fn constant_objective_restarts_every_failtol() {
        let g = generate_ba(40, 2, 4).unwrap();
        let obj = avg_node_score("flat", vec![1.0; 40]);
        let cfg = RunConfig {
            k: 2,
            q: 300,
            budget: 40,
            failtol: 7,
            gp_restarts: 0,
            init_method: InitMethod::UniformRandom(1),
            seed: 2,
            ..RunConfig::default()
        };
        let rec = run_graphcombo(&cfg, &g, &obj).unwrap();
        let restarts: Vec<usize> = rec.rows.iter().filter(|r| r.restarted).map(|r| r.t).collect();
        assert_eq!(restarts, vec![8, 15, 22, 29, 36]);
        assert!(rec.rows.iter().all(|r| !r.center_moved));
    }

    #[test]
    fn restart_locations() {
        let inc = ComboNode::new(vec![1, 2]).unwrap();
        let start = ComboNode::new(vec![0, 5]).unwrap();
        let mut rng = stream(0, "r");
        let pool: Vec<usize> = (0..6).collect();
        assert_eq!(restart_location(RestartMethod::Initial, &inc, &start, &pool, &mut rng), start);
        assert_eq!(restart_location(RestartMethod::BestQueried, &inc, &start, &pool, &mut rng), inc);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..10_000 {
            *counts.entry(restart_location(RestartMethod::Random, &inc, &start, &pool, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        assert!(counts.values().all(|&c| (c as f64 / 1e4 - 1.0 / 15.0).abs() < 0.01));
    }
}
