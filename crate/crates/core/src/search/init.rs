//! Initial queries and the multi-walker step shared with the baselines.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::seq::IndexedRandom;
use rand::Rng;

use super::config::{InitMethod, RunConfig};
use super::record::InitRow;
use super::tracker::Tracker;
use crate::combo::ComboNode;
use crate::graph::{Graph, NeighborOracle};
use crate::objectives::{Evaluator, Objective};
use crate::rng::stream;
use crate::Result;

const COLLISION_RETRIES: usize = 10;

pub(crate) fn random_subset<R: Rng + ?Sized>(pool: &[usize], k: usize, rng: &mut R) -> ComboNode {
    let picked = sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    ComboNode::new(picked).expect("distinct picks")
}

/// Moves every walker to a uniform neighbor (walkers on isolated nodes
/// stay). A walker landing on an occupied node re-steps up to a fixed
/// number of times, then stays put if its old node is free, and otherwise
/// jumps to a uniformly chosen free node.
pub fn walk_step<R: Rng + ?Sized>(positions: &[usize], oracle: &mut NeighborOracle<'_>, rng: &mut R) -> Vec<usize> {
    let n = oracle.num_nodes();
    let mut taken: HashSet<usize> = HashSet::with_capacity(positions.len());
    let mut out = Vec::with_capacity(positions.len());
    for &cur in positions {
        let nbrs = oracle.reveal(cur);
        let mut placed = None;
        for _ in 0..=COLLISION_RETRIES {
            let cand = *nbrs.choose(rng).unwrap_or(&cur);
            if !taken.contains(&cand) {
                placed = Some(cand);
                break;
            }
        }
        let pos = placed.unwrap_or_else(|| {
            if !taken.contains(&cur) {
                cur
            } else {
                loop {
                    let v = rng.random_range(0..n);
                    if !taken.contains(&v) {
                        break v;
                    }
                }
            }
        });
        taken.insert(pos);
        out.push(pos);
    }
    out
}

/// Runs the configured initialization and returns the start: the best
/// initial query, or a uniform random subset when there are none.
pub(crate) fn initialize_into(tracker: &mut Tracker<'_, '_>, config: &RunConfig) -> Result<ComboNode> {
    let mut rng = stream(config.seed, "init");
    let n = tracker.oracle.num_nodes();
    let all: Vec<usize> = (0..n).collect();
    let mut best: Option<(f64, ComboNode)> = None;
    let mut consider = |v: ComboNode, y: f64| {
        if best.as_ref().is_none_or(|(b, _)| y > *b) {
            best = Some((y, v));
        }
    };
    match config.init_method {
        InitMethod::None => {}
        InitMethod::UniformRandom(count) => {
            for _ in 0..count {
                let v = random_subset(&all, config.k, &mut rng);
                let obs = tracker.init_query(&v)?;
                consider(v, obs.y);
            }
        }
        InitMethod::RandomWalk(count) => {
            let mut walkers = random_subset(&all, config.k, &mut rng).elements().to_vec();
            for step in 0..count {
                if step > 0 {
                    walkers = walk_step(&walkers, &mut tracker.oracle, &mut rng);
                }
                let v = ComboNode::new(walkers.clone())?;
                let obs = tracker.init_query(&v)?;
                consider(v, obs.y);
            }
        }
    }
    let start = match best {
        Some((_, v)) => v,
        None => random_subset(&all, config.k, &mut rng),
    };
    tracker.set_start(start.clone());
    Ok(start)
}

#[derive(Clone, Debug)]
pub struct Initialization {
    pub start: ComboNode,
    pub queries: Vec<InitRow>,
    pub revealed: Vec<usize>,
}

/// Standalone initialization against a fully available graph.
pub fn initialize(config: &RunConfig, graph: &Graph, objective: &dyn Objective) -> Result<Initialization> {
    config.validate(graph.num_nodes())?;
    let evaluator = Evaluator::new(objective, config.noise_sigma, config.seed)?;
    let mut tracker = Tracker::new(evaluator, NeighborOracle::new(graph), config.budget);
    let start = initialize_into(&mut tracker, config)?;
    let revealed = tracker.oracle.revealed_nodes();
    let record = tracker.finish("init", config.seed);
    Ok(Initialization {
        start,
        queries: record.init,
        revealed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_ba, generate_grid2d};
    use crate::objectives::avg_node_score;

    fn cfg(k: usize, init: InitMethod) -> RunConfig {
        RunConfig {
            k,
            init_method: init,
            ..RunConfig::default()
        }
    }

    #[test]
    fn init_counts() {
        let g = generate_ba(100, 2, 0).unwrap();
        let obj = avg_node_score("i", (0..100).map(|v| v as f64).collect());
        let none = initialize(&cfg(3, InitMethod::None), &g, &obj).unwrap();
        assert!(none.queries.is_empty());
        assert_eq!(none.start.k(), 3);
        let uni = initialize(&cfg(3, InitMethod::UniformRandom(30)), &g, &obj).unwrap();
        assert_eq!(uni.queries.len(), 30);
        let best = uni.queries.iter().map(|r| r.y).fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(obj.value(uni.start.elements()).unwrap(), best);
        let walk = initialize(&cfg(16, InitMethod::RandomWalk(10)), &g, &obj).unwrap();
        assert_eq!(walk.queries.len(), 10);
        assert!(walk.queries.iter().all(|r| r.query.len() == 16));
    }

    #[test]
    fn walkers_stay_distinct() {
        let g = generate_grid2d(3, 3).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let mut rng = stream(1, "w");
        let mut pos: Vec<usize> = (0..8).collect();
        for _ in 0..200 {
            pos = walk_step(&pos, &mut oracle, &mut rng);
            let set: HashSet<usize> = pos.iter().copied().collect();
            assert_eq!(set.len(), 8);
        }
    }

    #[test]
    fn isolated_walkers_stay() {
        let g = Graph::from_edges(5, []).unwrap();
        let mut oracle = NeighborOracle::new(&g);
        let mut rng = stream(1, "w");
        assert_eq!(walk_step(&[0, 3], &mut oracle, &mut rng), vec![0, 3]);
    }
}
