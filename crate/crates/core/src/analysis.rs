//! Rank correlation, spectral smoothness and the kernel-validation
//! protocol on brute-forced combo-graphs.

use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::combo::{brute_force_combo_graph, BruteComboGraph, ComboNode};
use crate::gp::{GpModel, KernelFamily, KernelSpec, DEFAULT_NOISE_VARIANCE};
use crate::graph::{diameter_capped, eigendecompose, generate_ba, normalized_laplacian, Graph, SpectralBasis};
use crate::objectives::eigenvector_signal_objective;
use crate::rng::stream;
use crate::{Error, Result};

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && values[order[j]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j + 1) as f64 / 2.0;
        for &idx in &order[i..j] {
            ranks[idx] = r;
        }
        i = j;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameters(format!("length mismatch: {} vs {}", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::InvalidParameters("need at least 2 pairs".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameters("spearman input contains non-finite values".into()));
    }
    pearson(&average_ranks(a), &average_ranks(b))
        .ok_or(Error::Undefined("rank correlation of a constant vector"))
}

/// Mean and standard error (sample std over √n; 0 for a single value).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

pub fn mean_stderr(values: &[f64]) -> MeanStderr {
    let n = values.len();
    if n == 0 {
        return MeanStderr { mean: f64::NAN, stderr: f64::NAN, n };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    };
    MeanStderr { mean, stderr, n }
}

/// Cumulative share of the signal's energy in the first `p` graph Fourier
/// coefficients, for every `p`.
pub fn cumulative_energy(basis: &SpectralBasis, signal: &[f64]) -> Result<Vec<f64>> {
    let coeffs = basis.transform(signal)?;
    let total: f64 = coeffs.iter().map(|c| c * c).sum();
    if total == 0.0 {
        return Err(Error::Undefined("energy profile of a zero signal"));
    }
    let mut acc = 0.0;
    Ok(coeffs
        .iter()
        .map(|c| {
            acc += c * c;
            (acc / total).min(1.0)
        })
        .collect())
}

/// Combo-graph signal averaging a node signal over each subset.
pub fn combo_signal(nodes: &[ComboNode], node_signal: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .map(|v| v.elements().iter().map(|&i| node_signal[i]).sum::<f64>() / v.k() as f64)
        .collect()
}

fn standardize(values: &mut [f64]) {
    let s = mean_stderr(values);
    let std = s.stderr * (values.len() as f64).sqrt();
    let std = if std > 0.0 { std } else { 1.0 };
    for v in values {
        *v = (*v - s.mean) / std;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum SignalSpec {
    /// Average of the `j`-th (1-based) normalized-Laplacian eigenvector.
    Eigenvector(usize),
    /// Independent standard normal value per combo-node.
    Noise,
}

/// One kernel-validation cell on a random BA graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelValidationSetup {
    pub nodes: usize,
    pub ba_m: usize,
    pub k: usize,
    pub signal: SignalSpec,
    pub train_fraction: f64,
    /// Gaussian noise added to the standardized training targets.
    pub noise_sigma: f64,
    pub kernels: Vec<KernelFamily>,
    pub gp_restarts: usize,
    pub cap: usize,
}

impl Default for KernelValidationSetup {
    fn default() -> Self {
        Self {
            nodes: 20,
            ba_m: 2,
            k: 3,
            signal: SignalSpec::Eigenvector(3),
            train_fraction: 0.25,
            noise_sigma: 0.0,
            kernels: KernelFamily::ALL.to_vec(),
            gp_restarts: 1,
            cap: crate::combo::DEFAULT_BRUTE_CAP,
        }
    }
}

/// A brute-forced combo-graph with its spectral basis.
pub struct ComboFixture {
    pub graph: Graph,
    pub combo: BruteComboGraph,
    pub basis: SpectralBasis,
}

impl ComboFixture {
    pub fn ba(nodes: usize, m: usize, k: usize, cap: usize, seed: u64) -> Result<Self> {
        let graph = generate_ba(nodes, m, seed)?;
        let combo = brute_force_combo_graph(&graph, k, cap)?;
        let basis = eigendecompose(&normalized_laplacian(&combo.graph))?;
        Ok(Self { graph, combo, basis })
    }

    pub fn signal(&self, spec: SignalSpec, seed: u64) -> Result<Vec<f64>> {
        Ok(match spec {
            SignalSpec::Eigenvector(j) => {
                let scores = eigenvector_signal_objective(&self.graph, j)?;
                combo_signal(&self.combo.nodes, scores.scores())
            }
            SignalSpec::Noise => {
                let mut rng = stream(seed, "kernel-validate/noise-signal");
                (0..self.combo.nodes.len()).map(|_| StandardNormal.sample(&mut rng)).collect()
            }
        })
    }
}

/// Test-split Spearman correlation of each kernel's posterior mean.
pub fn kernel_validation_cell(setup: &KernelValidationSetup, seed: u64) -> Result<Vec<(KernelFamily, f64)>> {
    let fx = ComboFixture::ba(setup.nodes, setup.ba_m, setup.k, setup.cap, seed)?;
    let mut truth = fx.signal(setup.signal, seed)?;
    standardize(&mut truth);
    let n = truth.len();
    let n_train = ((n as f64) * setup.train_fraction).round() as usize;
    if n_train < 2 || n - n_train < 2 {
        return Err(Error::InvalidParameters(format!("split of {n} combo-nodes leaves too few points")));
    }
    let mut split_rng = stream(seed, "kernel-validate/split");
    let mut perm = sample(&mut split_rng, n, n).into_vec();
    let test = perm.split_off(n_train);
    let mut train = perm;
    train.sort_unstable();
    let mut noise_rng = stream(seed, "kernel-validate/observation-noise");
    let y: Vec<f64> = train
        .iter()
        .map(|&i| {
            let e: f64 = StandardNormal.sample(&mut noise_rng);
            truth[i] + setup.noise_sigma * e
        })
        .collect();
    let test_truth: Vec<f64> = test.iter().map(|&i| truth[i]).collect();
    let order = diameter_capped(&fx.combo.graph, 5).max(2);
    let mut out = Vec::with_capacity(setup.kernels.len());
    for &family in &setup.kernels {
        let spec = KernelSpec::new(family, n, order);
        let mut model = GpModel::new(&fx.basis, train.clone(), y.clone(), spec, DEFAULT_NOISE_VARIANCE)?;
        let mut fit_rng = stream(seed, &format!("kernel-validate/fit/{}", family.name()));
        model.fit(setup.gp_restarts, &mut fit_rng)?;
        let post = model.posterior(&test)?;
        out.push((family, spearman_rho(&post.mean, &test_truth)?));
    }
    Ok(out)
}

/// Cumulative energy curve of the averaged `j`-th eigenvector signal on the
/// combo-graph of a random BA graph.
pub fn smoothness_curve(nodes: usize, m: usize, k: usize, j: usize, cap: usize, seed: u64) -> Result<Vec<f64>> {
    let fx = ComboFixture::ba(nodes, m, k, cap, seed)?;
    let signal = fx.signal(SignalSpec::Eigenvector(j), seed)?;
    cumulative_energy(&fx.basis, &signal)
}
