//! Black-box functions over k-subsets, all posed as maximization.

mod ic;
mod sir;
mod transitivity;

pub use ic::{ic_simulate, IcOutcome, IcParams, InfluenceObjective};
pub use sir::{flatten_curve_threshold_time, patient_zero_scores, sir_simulate, FlattenCurveObjective, SirParams, SirTrace, Status};
pub use transitivity::TransitivityDropObjective;

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::combo::{binomial, ComboNode};
use crate::graph::{eigendecompose, normalized_laplacian, pagerank, Graph};
use crate::rng::{stream, StreamRng};
use crate::{Error, Result};

pub trait Objective: Send + Sync {
    fn name(&self) -> String;

    /// Number of nodes subsets are drawn from.
    fn universe(&self) -> usize;

    /// Noise-free value of a subset of node ids.
    fn value(&self, subset: &[usize]) -> Result<f64>;

    /// Per-node scores when the objective is an aggregate of them.
    fn node_scores(&self) -> Option<&NodeScores> {
        None
    }

    /// True for Monte Carlo estimates (seeded, hence still repeatable).
    fn is_stochastic(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Aggregation {
    /// `(1/k) Σ s_v`
    Mean,
    /// `(1/√k) Σ s_v`
    SumOverRootK,
}

impl Aggregation {
    fn weight(self, k: usize) -> f64 {
        match self {
            Self::Mean => 1.0 / k as f64,
            Self::SumOverRootK => 1.0 / (k as f64).sqrt(),
        }
    }
}

/// Separable objective built from fixed per-node scores.
#[derive(Clone, Debug)]
pub struct NodeScores {
    name: String,
    scores: Vec<f64>,
    aggregation: Aggregation,
}

impl NodeScores {
    pub fn new(name: impl Into<String>, scores: Vec<f64>, aggregation: Aggregation) -> Self {
        Self {
            name: name.into(),
            scores,
            aggregation,
        }
    }

    pub fn average(name: impl Into<String>, scores: Vec<f64>) -> Self {
        Self::new(name, scores, Aggregation::Mean)
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    /// Best value over all k-subsets together with one maximizer.
    pub fn optimum(&self, k: usize) -> Result<(f64, Vec<usize>)> {
        if k == 0 || k > self.scores.len() {
            return Err(Error::InvalidParameters(format!("k = {k} with {} nodes", self.scores.len())));
        }
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        order.sort_by(|&a, &b| self.scores[b].total_cmp(&self.scores[a]).then(a.cmp(&b)));
        let mut top = order[..k].to_vec();
        top.sort_unstable();
        Ok((self.value(&top)?, top))
    }
}

impl Objective for NodeScores {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn universe(&self) -> usize {
        self.scores.len()
    }

    fn value(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::InvalidParameters("empty subset".into()));
        }
        let mut sum = 0.0;
        for &v in subset {
            sum += *self.scores.get(v).ok_or(Error::IndexOutOfRange {
                index: v,
                len: self.scores.len(),
            })?;
        }
        Ok(sum * self.aggregation.weight(subset.len()))
    }

    fn node_scores(&self) -> Option<&NodeScores> {
        Some(self)
    }
}

pub fn avg_node_score(name: impl Into<String>, scores: Vec<f64>) -> NodeScores {
    NodeScores::average(name, scores)
}

fn ackley(x: f64, y: f64) -> f64 {
    use std::f64::consts::{E, PI};
    -20.0 * (-0.2 * (0.5 * (x * x + y * y)).sqrt()).exp()
        - (0.5 * ((2.0 * PI * x).cos() + (2.0 * PI * y).cos())).exp()
        + 20.0
        + E
}

/// Negated Ackley values on a `rows × cols` grid spanning `[-5, 5]²`, plus
/// frozen Gaussian noise per node. Node `(i, j)` has id `i·cols + j`.
pub fn ackley_grid_scores(rows: usize, cols: usize, noise_sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if rows == 0 || cols == 0 || !(noise_sigma >= 0.0) {
        return Err(Error::InvalidParameters(format!(
            "ackley grid {rows}x{cols} with noise {noise_sigma}"
        )));
    }
    let coord = |i: usize, len: usize| {
        if len == 1 {
            0.0
        } else {
            -5.0 + 10.0 * i as f64 / (len - 1) as f64
        }
    };
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidParameters(e.to_string()))?;
    let mut rng = stream(seed, "ackley-noise");
    let mut out = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let eps = if noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            out.push(-ackley(coord(j, cols), coord(i, rows)) + eps);
        }
    }
    Ok(out)
}

/// PageRank z-scores (population standard deviation) summed and scaled by
/// `1/√k`.
pub fn standardized_pagerank_objective(g: &Graph) -> Result<NodeScores> {
    let pr = pagerank(g, 0.85, 1e-10)?;
    let n = pr.len() as f64;
    let mean = pr.iter().sum::<f64>() / n;
    let std = (pr.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    if std == 0.0 {
        return Err(Error::Undefined("standardized PageRank of a graph with uniform PageRank"));
    }
    let z = pr.iter().map(|v| (v - mean) / std).collect();
    Ok(NodeScores::new("standardized_pagerank", z, Aggregation::SumOverRootK))
}

/// Averages entries of the `j`-th (1-based) eigenvector of the normalized
/// Laplacian.
pub fn eigenvector_signal_objective(g: &Graph, j: usize) -> Result<NodeScores> {
    let n = g.num_nodes();
    if j == 0 || j > n {
        return Err(Error::IndexOutOfRange { index: j, len: n });
    }
    let basis = eigendecompose(&normalized_laplacian(g))?;
    Ok(NodeScores::average(format!("eigenvector_{j}"), basis.eigenvector(j - 1)))
}

/// One observation: the noise-free value and what the optimizer sees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub y: f64,
    pub clean: f64,
}

/// Counts evaluations and adds seeded Gaussian observation noise.
pub struct Evaluator<'a> {
    objective: &'a dyn Objective,
    noise: Option<Normal<f64>>,
    rng: StreamRng,
    evaluations: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a dyn Objective, noise_sigma: f64, seed: u64) -> Result<Self> {
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::InvalidParameters(format!("noise sigma {noise_sigma}")));
        }
        let noise = (noise_sigma > 0.0).then(|| Normal::new(0.0, noise_sigma).unwrap());
        Ok(Self {
            objective,
            noise,
            rng: StreamRng::seed_from_u64(crate::rng::derive_seed(seed, "observation-noise")),
            evaluations: 0,
        })
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.objective
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    pub fn observe(&mut self, subset: &ComboNode) -> Result<Observation> {
        let clean = self.objective.value(subset.elements()).map_err(|e| Error::Objective {
            query: self.evaluations,
            source: Box::new(e),
        })?;
        self.evaluations += 1;
        let y = match &self.noise {
            Some(d) => clean + d.sample(&mut self.rng),
            None => clean,
        };
        Ok(Observation { y, clean })
    }
}

/// Global optimum of `objective` over k-subsets: exact for node-score
/// objectives, exhaustive for deterministic ones with at most `cap`
/// subsets, otherwise `None`.
pub fn ground_truth(objective: &dyn Objective, k: usize, cap: usize) -> Result<Option<(f64, Vec<usize>)>> {
    if let Some(scores) = objective.node_scores() {
        return scores.optimum(k).map(Some);
    }
    let n = objective.universe();
    if objective.is_stochastic() || k == 0 || k > n || binomial(n, k) > cap as u128 {
        return Ok(None);
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        let v = objective.value(&current)?;
        if best.as_ref().is_none_or(|(b, _)| v > *b) {
            best = Some((v, current.clone()));
        }
        let mut i = k;
        while i > 0 && current[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        current[i - 1] += 1;
        for j in i..k {
            current[j] = current[j - 1] + 1;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_ba;

    #[test]
    fn average_scores() {
        let obj = avg_node_score("s", vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(obj.value(&[2, 3]).unwrap(), 3.5);
        assert_eq!(ground_truth(&obj, 2, 10).unwrap().unwrap(), (3.5, vec![2, 3]));
        let flat = avg_node_score("c", vec![0.7; 5]);
        assert!((flat.value(&[0, 4]).unwrap() - 0.7).abs() < 1e-15);
        assert!((ground_truth(&flat, 3, 10).unwrap().unwrap().0 - 0.7).abs() < 1e-15);
        assert!(obj.value(&[9]).is_err());
    }

    #[test]
    fn ackley_examples() {
        let s = ackley_grid_scores(11, 11, 0.0, 0).unwrap();
        assert!(s[5 * 11 + 5].abs() < 1e-12);
        assert!(s.iter().all(|&v| v <= 1e-12));
        assert!((ackley(1.0, 1.0) - 3.6254).abs() < 1e-4);
        let a = ackley_grid_scores(4, 6, 0.5, 9).unwrap();
        assert_eq!(a, ackley_grid_scores(4, 6, 0.5, 9).unwrap());
        assert_ne!(a, ackley_grid_scores(4, 6, 0.5, 10).unwrap());
    }

    #[test]
    fn standardized_pagerank_moments() {
        let g = generate_ba(200, 3, 1).unwrap();
        let obj = standardized_pagerank_objective(&g).unwrap();
        let z = obj.scores();
        let mean = z.iter().sum::<f64>() / 200.0;
        let var = z.iter().map(|v| v * v).sum::<f64>() / 200.0;
        assert!(mean.abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        assert!((obj.value(&[0, 1, 2, 3]).unwrap() - (z[0] + z[1] + z[2] + z[3]) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvector_signals() {
        let g = generate_ba(20, 2, 0).unwrap();
        let obj = eigenvector_signal_objective(&g, 3).unwrap();
        assert_eq!(obj.universe(), 20);
        assert!(eigenvector_signal_objective(&g, 21).is_err());
        // On a regular graph the first eigenvector is constant.
        let ring = Graph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
        let first = eigenvector_signal_objective(&ring, 1).unwrap();
        let a = first.value(&[0, 1]).unwrap();
        assert!((first.value(&[3, 6]).unwrap() - a).abs() < 1e-12);
    }

    #[test]
    fn separable_ground_truth_matches_brute_force() {
        let scores: Vec<f64> = (0..9).map(|i| ((i * 7) % 5) as f64 - 0.5 * i as f64).collect();
        let obj = avg_node_score("s", scores);
        struct Opaque(NodeScores);
        impl Objective for Opaque {
            fn name(&self) -> String {
                "opaque".into()
            }
            fn universe(&self) -> usize {
                self.0.universe()
            }
            fn value(&self, s: &[usize]) -> Result<f64> {
                self.0.value(s)
            }
        }
        for k in 1..=4 {
            let fast = ground_truth(&obj, k, 1000).unwrap().unwrap().0;
            let slow = ground_truth(&Opaque(obj.clone()), k, 1000).unwrap().unwrap().0;
            assert_eq!(fast, slow);
        }
        assert!(ground_truth(&Opaque(obj), 4, 10).unwrap().is_none());
    }

    #[test]
    fn evaluator_noise_is_seeded() {
        let obj = avg_node_score("s", vec![1.0, 2.0, 3.0]);
        let v = ComboNode::new(vec![0, 2]).unwrap();
        let draw = |seed| {
            let mut e = Evaluator::new(&obj, 1.0, seed).unwrap();
            (0..3).map(|_| e.observe(&v).unwrap().y).collect::<Vec<_>>()
        };
        assert_eq!(draw(4), draw(4));
        assert_ne!(draw(4), draw(5));
        let mut quiet = Evaluator::new(&obj, 0.0, 0).unwrap();
        assert_eq!(quiet.observe(&v).unwrap(), Observation { y: 2.0, clean: 2.0 });
        assert_eq!(quiet.evaluations(), 1);
    }
}
