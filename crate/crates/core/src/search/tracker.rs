//! Query bookkeeping shared by every method.

use std::collections::{HashMap, HashSet};

use super::record::{Hyperparameters, InitRow, OracleAudit, QueryRow, RunRecord};
use crate::combo::{set_difference_distance, ComboNode};
use crate::graph::NeighborOracle;
use crate::objectives::{Evaluator, Observation};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default)]
struct Stats {
    sum: f64,
    count: usize,
}

/// Per-row annotations supplied by the method.
#[derive(Default)]
pub(crate) struct RowContext {
    pub restarted: bool,
    pub hyperparameters: Option<Hyperparameters>,
}

pub(crate) struct Tracker<'a, 'g> {
    pub evaluator: Evaluator<'a>,
    pub oracle: NeighborOracle<'g>,
    budget: usize,
    stats: HashMap<ComboNode, Stats>,
    best: Option<(f64, ComboNode)>,
    best_clean: f64,
    explored: HashSet<ComboNode>,
    start: Option<ComboNode>,
    init: Vec<InitRow>,
    rows: Vec<QueryRow>,
}

impl<'a, 'g> Tracker<'a, 'g> {
    pub fn new(evaluator: Evaluator<'a>, oracle: NeighborOracle<'g>, budget: usize) -> Self {
        Self {
            evaluator,
            oracle,
            budget,
            stats: HashMap::new(),
            best: None,
            best_clean: f64::NEG_INFINITY,
            explored: HashSet::new(),
            start: None,
            init: Vec::new(),
            rows: Vec::new(),
        }
    }

    fn record(&mut self, v: &ComboNode) -> Result<Observation> {
        let obs = self.evaluator.observe(v)?;
        let entry = self.stats.entry(v.clone()).or_default();
        entry.sum += obs.y;
        entry.count += 1;
        if self.best.as_ref().is_none_or(|(b, _)| obs.y > *b) {
            self.best = Some((obs.y, v.clone()));
        }
        self.best_clean = self.best_clean.max(obs.clean);
        self.explored.insert(v.clone());
        Ok(obs)
    }

    /// An initialization query; does not consume the budget.
    pub fn init_query(&mut self, v: &ComboNode) -> Result<Observation> {
        let obs = self.record(v)?;
        self.init.push(InitRow {
            query: v.elements().to_vec(),
            y: obs.y,
            clean_y: obs.clean,
        });
        Ok(obs)
    }

    pub fn set_start(&mut self, start: ComboNode) {
        self.start = Some(start);
    }

    pub fn start(&self) -> &ComboNode {
        self.start.as_ref().expect("start is set before the first query")
    }

    /// A budgeted query. The row's `distance` and `center_moved` fields are
    /// filled in by [`Tracker::settle`].
    pub fn query(&mut self, v: &ComboNode, ctx: RowContext) -> Result<Observation> {
        if self.done() {
            return Err(Error::InvalidParameters("query budget exhausted".into()));
        }
        let obs = self.record(v)?;
        let (best_y, incumbent) = self.best.clone().expect("at least one observation");
        self.rows.push(QueryRow {
            t: self.rows.len() + 1,
            query: v.elements().to_vec(),
            y: obs.y,
            clean_y: obs.clean,
            best_y,
            best_clean_y: self.best_clean,
            incumbent: incumbent.elements().to_vec(),
            explored: self.explored.len(),
            revealed: self.oracle.reveal_count(),
            distance: 0,
            center_moved: false,
            restarted: ctx.restarted,
            hyperparameters: ctx.hyperparameters,
        });
        Ok(obs)
    }

    /// Records where the method's center ended up after the latest query.
    pub fn settle(&mut self, center: &ComboNode, moved: bool) {
        let distance = set_difference_distance(center, self.start.as_ref().unwrap_or(center)).unwrap_or(0);
        let explored = self.explored.len();
        let revealed = self.oracle.reveal_count();
        if let Some(row) = self.rows.last_mut() {
            row.distance = distance;
            row.center_moved = moved;
            row.explored = explored;
            row.revealed = revealed;
        }
    }

    pub fn mark_explored<'n>(&mut self, nodes: impl IntoIterator<Item = &'n ComboNode>) {
        for v in nodes {
            if !self.explored.contains(v) {
                self.explored.insert(v.clone());
            }
        }
    }

    pub fn done(&self) -> bool {
        self.rows.len() >= self.budget
    }

    pub fn is_observed(&self, v: &ComboNode) -> bool {
        self.stats.contains_key(v)
    }

    /// Mean of all observations of `v`.
    pub fn mean(&self, v: &ComboNode) -> Option<f64> {
        self.stats.get(v).map(|s| s.sum / s.count as f64)
    }

    pub fn incumbent(&self) -> Option<&ComboNode> {
        self.best.as_ref().map(|(_, v)| v)
    }

    pub fn finish(self, method: &str, seed: u64) -> RunRecord {
        let mut touched: Vec<usize> = self.explored.iter().flat_map(|v| v.elements().iter().copied()).collect();
        touched.sort_unstable();
        touched.dedup();
        let audit = OracleAudit {
            revealed: self.oracle.revealed_nodes(),
            touched,
        };
        RunRecord {
            audit,
            method: method.to_string(),
            seed,
            start: self.start.map(|s| s.elements().to_vec()).unwrap_or_default(),
            evaluations: self.evaluator.evaluations(),
            init: self.init,
            rows: self.rows,
        }
    }
}
