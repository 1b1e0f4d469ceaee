//! Comparison methods. All of them share the initialization, start from the
//! best initial query and spend exactly the configured budget.

use std::collections::{HashSet, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::combo::{combo_neighbors, ComboNode};
use crate::graph::{Graph, NeighborOracle};
use crate::objectives::{Evaluator, Objective};
use crate::rng::{stream, StreamRng};
use crate::search::{initialize_into, random_subset, restart_pool, walk_step, RowContext, RunConfig, RunRecord, Tracker};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    RandomSearch,
    KRandomWalk,
    KLocalSearch,
    BfsCombo,
    DfsCombo,
    LocalSearchCombo,
}

impl BaselineKind {
    pub const ALL: [BaselineKind; 6] = [
        BaselineKind::RandomSearch,
        BaselineKind::KRandomWalk,
        BaselineKind::KLocalSearch,
        BaselineKind::BfsCombo,
        BaselineKind::DfsCombo,
        BaselineKind::LocalSearchCombo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaselineKind::RandomSearch => "random_search",
            BaselineKind::KRandomWalk => "k_random_walk",
            BaselineKind::KLocalSearch => "k_local_search",
            BaselineKind::BfsCombo => "bfs_combo",
            BaselineKind::DfsCombo => "dfs_combo",
            BaselineKind::LocalSearchCombo => "local_search_combo",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }
}

pub fn run_baseline(kind: BaselineKind, config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    config.validate(graph.num_nodes())?;
    let evaluator = Evaluator::new(objective, config.noise_sigma, config.seed)?;
    let mut tracker = Tracker::new(evaluator, NeighborOracle::new(graph), config.budget);
    let start = initialize_into(&mut tracker, config)?;
    let mut rng = stream(config.seed, kind.name());
    let mut run = Run { tracker, config, rng: &mut rng };
    match kind {
        BaselineKind::RandomSearch => run.random_search()?,
        BaselineKind::KRandomWalk => run.k_random_walk(start)?,
        BaselineKind::KLocalSearch => run.k_local_search(start)?,
        BaselineKind::BfsCombo => run.bfs(start)?,
        BaselineKind::DfsCombo => run.dfs(start)?,
        BaselineKind::LocalSearchCombo => run.local_search_combo(start)?,
    }
    Ok(run.tracker.finish(kind.name(), config.seed))
}

pub fn run_random_search(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    run_baseline(BaselineKind::RandomSearch, config, graph, objective)
}

pub fn run_k_random_walk(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    run_baseline(BaselineKind::KRandomWalk, config, graph, objective)
}

pub fn run_k_local_search(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    run_baseline(BaselineKind::KLocalSearch, config, graph, objective)
}

pub fn run_bfs_combo(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    run_baseline(BaselineKind::BfsCombo, config, graph, objective)
}

pub fn run_dfs_combo(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    run_baseline(BaselineKind::DfsCombo, config, graph, objective)
}

pub fn run_local_search_combo(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<RunRecord> {
    run_baseline(BaselineKind::LocalSearchCombo, config, graph, objective)
}

struct Run<'a, 'g, 'r> {
    tracker: Tracker<'a, 'g>,
    config: &'a RunConfig,
    rng: &'r mut StreamRng,
}

impl Run<'_, '_, '_> {
    fn query(&mut self, v: &ComboNode, restarted: bool, moved: bool) -> Result<f64> {
        let obs = self.tracker.query(v, RowContext { restarted, hyperparameters: None })?;
        self.tracker.settle(v, moved);
        Ok(obs.y)
    }

    /// Value of the start, querying it first if initialization did not.
    fn start_value(&mut self, start: &ComboNode) -> Result<f64> {
        match self.tracker.mean(start) {
            Some(y) => Ok(y),
            None => self.query(start, false, false),
        }
    }

    fn random_location(&mut self) -> ComboNode {
        let pool = restart_pool(&self.tracker.oracle, self.config.k, self.config.hidden_graph);
        random_subset(&pool, self.config.k, self.rng)
    }

    fn random_search(&mut self) -> Result<()> {
        let all: Vec<usize> = (0..self.tracker.oracle.num_nodes()).collect();
        while !self.tracker.done() {
            let v = random_subset(&all, self.config.k, self.rng);
            self.query(&v, false, false)?;
        }
        Ok(())
    }

    fn k_random_walk(&mut self, start: ComboNode) -> Result<()> {
        let mut walkers = start.elements().to_vec();
        self.tracker.mark_explored([&start]);
        while !self.tracker.done() {
            walkers = walk_step(&walkers, &mut self.tracker.oracle, self.rng);
            let v = ComboNode::new(walkers.clone())?;
            self.query(&v, false, true)?;
        }
        Ok(())
    }

    fn k_local_search(&mut self, start: ComboNode) -> Result<()> {
        let mut current_y = self.start_value(&start)?;
        let mut current = start;
        while !self.tracker.done() {
            let proposal = ComboNode::new(walk_step(current.elements(), &mut self.tracker.oracle, self.rng))?;
            let obs = self.tracker.query(&proposal, RowContext::default())?;
            let accept = obs.y > current_y;
            if accept {
                current = proposal;
                current_y = obs.y;
            }
            self.tracker.settle(&current, accept);
        }
        Ok(())
    }

    fn shuffled_neighbors(&mut self, v: &ComboNode) -> Vec<ComboNode> {
        let mut nbrs = combo_neighbors(v, &mut self.tracker.oracle);
        nbrs.shuffle(self.rng);
        nbrs
    }

    /// A uniform random combo-node not yet visited; `None` if every
    /// candidate drawn is taken.
    fn jump(&mut self, visited: &HashSet<ComboNode>) -> Option<ComboNode> {
        for _ in 0..10_000 {
            let v = self.random_location();
            if !visited.contains(&v) {
                return Some(v);
            }
        }
        None
    }

    fn bfs(&mut self, start: ComboNode) -> Result<()> {
        self.start_value(&start)?;
        let mut visited = HashSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while !self.tracker.done() {
            let Some(u) = queue.pop_front() else {
                let Some(v) = self.jump(&visited) else { break };
                self.query(&v, true, true)?;
                visited.insert(v.clone());
                queue.push_back(v);
                continue;
            };
            for v in self.shuffled_neighbors(&u) {
                if self.tracker.done() {
                    break;
                }
                if visited.insert(v.clone()) {
                    self.query(&v, false, true)?;
                    queue.push_back(v);
                }
            }
        }
        self.fill_with_random()
    }

    fn dfs(&mut self, start: ComboNode) -> Result<()> {
        self.start_value(&start)?;
        let mut visited = HashSet::from([start.clone()]);
        let first = self.shuffled_neighbors(&start);
        let mut stack: Vec<Vec<ComboNode>> = vec![first];
        while !self.tracker.done() {
            let Some(frame) = stack.last_mut() else {
                let Some(v) = self.jump(&visited) else { break };
                self.query(&v, true, true)?;
                visited.insert(v.clone());
                let nbrs = self.shuffled_neighbors(&v);
                stack.push(nbrs);
                continue;
            };
            match frame.pop() {
                None => {
                    stack.pop();
                }
                Some(v) if visited.contains(&v) => {}
                Some(v) => {
                    visited.insert(v.clone());
                    self.query(&v, false, true)?;
                    let nbrs = self.shuffled_neighbors(&v);
                    stack.push(nbrs);
                }
            }
        }
        self.fill_with_random()
    }

    /// Spends any leftover budget on random queries; only reached when the
    /// whole combo-graph has been visited.
    fn fill_with_random(&mut self) -> Result<()> {
        while !self.tracker.done() {
            let v = self.random_location();
            self.query(&v, true, true)?;
        }
        Ok(())
    }

    fn local_search_combo(&mut self, start: ComboNode) -> Result<()> {
        let mut best_y = self.start_value(&start)?;
        let mut best = start;
        while !self.tracker.done() {
            let fresh: Vec<ComboNode> = combo_neighbors(&best, &mut self.tracker.oracle)
                .into_iter()
                .filter(|v| !self.tracker.is_observed(v))
                .collect();
            if fresh.is_empty() {
                best = self.random_location();
                best_y = self.query(&best, true, true)?;
                continue;
            }
            let v = fresh.choose(self.rng).expect("nonempty").clone();
            let obs = self.tracker.query(&v, RowContext::default())?;
            let moved = obs.y > best_y;
            if moved {
                best = v;
                best_y = obs.y;
            }
            self.tracker.settle(&best, moved);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combo::{brute_force_combo_graph, combo_hop_distance};
    use crate::graph::{degree_centrality, generate_ba, NeighborOracle};
    use crate::objectives::avg_node_score;
    use crate::search::InitMethod;
    use std::collections::HashMap;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    fn cfg(k: usize, budget: usize, seed: u64) -> RunConfig {
        RunConfig {
            k,
            budget,
            seed,
            init_method: InitMethod::UniformRandom(1),
            ..RunConfig::default()
        }
    }

    #[test]
    fn names_round_trip() {
        for b in BaselineKind::ALL {
            assert_eq!(BaselineKind::from_name(b.name()), Some(b));
            assert_eq!(serde_json::to_string(&b).unwrap(), format!("\"{}\"", b.name()));
        }
    }

    #[test]
    fn every_baseline_spends_the_budget_deterministically() {
        let g = generate_ba(50, 2, 1).unwrap();
        let obj = avg_node_score("deg", degree_centrality(&g).unwrap());
        for b in BaselineKind::ALL {
            let c = RunConfig { init_method: InitMethod::RandomWalk(4), ..cfg(3, 40, 9) };
            let r = run_baseline(b, &c, &g, &obj).unwrap();
            assert_eq!(r.rows.len(), 40, "{}", b.name());
            assert_eq!(r.evaluations, 44);
            assert!(r.invariant_violations(40).is_empty(), "{}: {:?}", b.name(), r.invariant_violations(40));
            assert_eq!(r, run_baseline(b, &c, &g, &obj).unwrap());
            let hidden = RunConfig { hidden_graph: true, ..c };
            assert!(run_baseline(b, &hidden, &g, &obj).unwrap().invariant_violations(40).is_empty());
        }
    }

    #[test]
    fn random_search_frequencies() {
        let g = cycle(6);
        let obj = avg_node_score("z", vec![0.0; 6]);
        let r = run_random_search(&cfg(2, 10_000, 3), &g, &obj).unwrap();
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for row in &r.rows {
            *counts.entry(row.query.clone()).or_default() += 1;
        }
        assert_eq!(counts.len(), 15);
        for c in counts.values() {
            assert!((*c as f64 / 1e4 - 1.0 / 15.0).abs() < 0.01);
        }
        let full = run_random_search(&cfg(6, 5, 3), &g, &obj).unwrap();
        assert!(full.rows.iter().all(|r| r.query == vec![0, 1, 2, 3, 4, 5]));
    }

    #[test]
    fn walkers_on_isolated_nodes_never_move() {
        let g = Graph::from_edges(5, []).unwrap();
        let obj = avg_node_score("z", vec![0.0; 5]);
        let r = run_k_random_walk(&cfg(2, 20, 1), &g, &obj).unwrap();
        assert!(r.rows.iter().all(|row| row.query == r.start));
    }

    #[test]
    fn single_walker_moves_one_hop() {
        let g = cycle(6);
        let obj = avg_node_score("z", vec![0.0; 6]);
        let r = run_k_random_walk(&cfg(1, 1, 4), &g, &obj).unwrap();
        let (a, b) = (r.start[0], r.rows[0].query[0]);
        assert!(g.has_edge(a, b));
    }

    #[test]
    fn walker_occupancy_on_triangle_is_uniform() {
        let g = cycle(3);
        let mut oracle = NeighborOracle::new(&g);
        let mut rng = stream(5, "occupancy");
        let mut pos = vec![0];
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            pos = walk_step(&pos, &mut oracle, &mut rng);
            counts[pos[0]] += 1;
        }
        for c in counts {
            assert!((c as f64 / 1e4 - 1.0 / 3.0).abs() < 0.02);
        }
    }

    #[test]
    fn k_local_search_holds_on_flat_objective_and_climbs_a_path() {
        let g = cycle(8);
        let flat = avg_node_score("z", vec![1.0; 8]);
        let r = run_k_local_search(&cfg(2, 30, 2), &g, &flat).unwrap();
        assert!(r.rows.iter().all(|row| !row.center_moved && row.distance == 0));

        let path = Graph::from_edges(8, (0..7).map(|i| (i, i + 1))).unwrap();
        let ramp = avg_node_score("ramp", (0..8).map(|i| i as f64).collect());
        let c = RunConfig { init_method: InitMethod::None, ..cfg(1, 200, 6) };
        let r = run_k_local_search(&c, &path, &ramp).unwrap();
        assert_eq!(r.final_best_y(), Some(7.0));
        let accepted: Vec<f64> = r.rows.iter().filter(|row| row.center_moved).map(|row| row.y).collect();
        assert!(accepted.windows(2).all(|w| w[1] == w[0] + 1.0));
    }

    #[test]
    fn bfs_visits_by_hop_distance() {
        let g = cycle(6);
        let obj = avg_node_score("z", vec![0.0; 6]);
        for seed in 0..5 {
            let r = run_bfs_combo(&cfg(2, 14, seed), &g, &obj).unwrap();
            let brute = brute_force_combo_graph(&g, 2, 1000).unwrap();
            let at = |q: &[usize]| brute.index_of(&ComboNode::new(q.to_vec()).unwrap()).unwrap();
            let s = at(&r.start);
            let hops: Vec<usize> = r
                .rows
                .iter()
                .map(|row| combo_hop_distance(&brute.graph, s, at(&row.query)).unwrap().unwrap())
                .collect();
            assert_eq!(hops[0], 1);
            assert!(hops.windows(2).all(|w| w[0] <= w[1]), "{hops:?}");
            let distinct: HashSet<_> = r.rows.iter().map(|row| row.query.clone()).collect();
            assert_eq!(distinct.len(), 14);
            assert!(!distinct.contains(&r.start));
        }
    }

    #[test]
    fn dfs_never_revisits() {
        let g = cycle(7);
        let obj = avg_node_score("z", vec![0.0; 7]);
        let brute = brute_force_combo_graph(&g, 3, 1000).unwrap();
        let r = run_dfs_combo(&cfg(3, 34, 8), &g, &obj).unwrap();
        let mut seen = HashSet::from([r.start.clone()]);
        for row in &r.rows {
            assert!(seen.insert(row.query.clone()));
        }
        assert_eq!(seen.len(), brute.nodes.len());
        let at = |q: &[usize]| brute.index_of(&ComboNode::new(q.to_vec()).unwrap()).unwrap();
        let d = combo_hop_distance(&brute.graph, at(&r.start), at(&r.rows[0].query)).unwrap();
        assert_eq!(d, Some(1));
    }

    #[test]
    fn local_search_combo_exhausts_then_restarts() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let obj = avg_node_score("z", vec![1.0; 3]);
        for seed in 0..6 {
            let r = run_local_search_combo(&cfg(2, 6, seed), &g, &obj).unwrap();
            let start = ComboNode::new(r.start.clone()).unwrap();
            let mut oracle = NeighborOracle::new(&g);
            let nbrs = combo_neighbors(&start, &mut oracle);
            for (i, v) in nbrs.iter().enumerate() {
                assert!(nbrs.iter().any(|u| u.elements() == r.rows[i].query.as_slice()));
                assert!(!r.rows[i].restarted, "{v:?}");
            }
            assert!(r.rows[nbrs.len()].restarted);
            assert_eq!(r, run_local_search_combo(&cfg(2, 6, seed), &g, &obj).unwrap());
        }
    }
}
