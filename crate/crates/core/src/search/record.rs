use serde::{Deserialize, Serialize};

use crate::gp::KernelSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    pub kernel: KernelSpec,
    pub noise_variance: f64,
    pub log_marginal_likelihood: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitRow {
    pub query: Vec<usize>,
    pub y: f64,
    pub clean_y: f64,
}

/// One post-initialization query.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryRow {
    /// 1-based query counter.
    pub t: usize,
    pub query: Vec<usize>,
    pub y: f64,
    pub clean_y: f64,
    /// Best observation so far, initialization included.
    pub best_y: f64,
    /// Best noise-free value among all queries so far.
    pub best_clean_y: f64,
    pub incumbent: Vec<usize>,
    /// Distinct combo-nodes seen so far (sampled or queried).
    pub explored: usize,
    /// Distinct original nodes whose neighbors have been revealed.
    pub revealed: usize,
    /// `|center \ start|` after this query.
    pub distance: usize,
    pub center_moved: bool,
    /// A restart happened since the previous query.
    pub restarted: bool,
    pub hyperparameters: Option<Hyperparameters>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: String,
    pub seed: u64,
    pub start: Vec<usize>,
    pub init: Vec<InitRow>,
    pub rows: Vec<QueryRow>,
    /// Objective evaluations including initialization.
    pub evaluations: usize,
    #[serde(skip)]
    pub audit: OracleAudit,
}

/// Original nodes revealed by the oracle, and the union of elements of every
/// combo-node sampled or queried.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleAudit {
    pub revealed: Vec<usize>,
    pub touched: Vec<usize>,
}

impl RunRecord {
    pub fn final_best_y(&self) -> Option<f64> {
        self.rows.last().map(|r| r.best_y)
    }

    pub fn final_best_clean_y(&self) -> Option<f64> {
        self.rows.last().map(|r| r.best_clean_y)
    }

    /// Row-count, monotonicity and incumbent bookkeeping checks.
    pub fn invariant_violations(&self, budget: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.rows.len() != budget {
            out.push(format!("{} rows for a budget of {budget}", self.rows.len()));
        }
        if self.evaluations != self.init.len() + self.rows.len() {
            out.push(format!(
                "{} evaluations for {} init rows and {} query rows",
                self.evaluations,
                self.init.len(),
                self.rows.len()
            ));
        }
        for (i, w) in self.rows.windows(2).enumerate() {
            if w[1].best_y < w[0].best_y {
                out.push(format!("best_y decreases at t = {}", i + 2));
            }
            if w[1].explored < w[0].explored || w[1].revealed < w[0].revealed {
                out.push(format!("recorder decreases at t = {}", i + 2));
            }
        }
        let all_y = self.init.iter().map(|r| r.y).chain(self.rows.iter().map(|r| r.y));
        let max = all_y.fold(f64::NEG_INFINITY, f64::max);
        if let Some(last) = self.rows.last() {
            if last.best_y != max {
                out.push(format!("final best_y {} differs from the largest observation {max}", last.best_y));
            }
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.t != i + 1 {
                out.push(format!("row {i} has t = {}", r.t));
            }
        }
        for v in &self.audit.revealed {
            if self.audit.touched.binary_search(v).is_err() {
                out.push(format!("node {v} was revealed but belongs to no sampled or queried combo-node"));
            }
        }
        out
    }
}
