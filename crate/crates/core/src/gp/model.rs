//! Exact GP regression in a spectral basis.

use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::{Mat, Par, Side};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::kernel::KernelSpec;
use super::optimize::maximize_in_box;
use crate::graph::SpectralBasis;
use crate::{Error, Result};

pub const DEFAULT_NOISE_VARIANCE: f64 = 1e-6;
const NOISE_BOUNDS: (f64, f64) = (1e-8, 1.0);
const JITTER_START: f64 = 1e-8;
const JITTER_MAX: f64 = 1e-2;
const OPTIMIZER_ITERATIONS: usize = 60;
const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Posterior marginals in the units of the training observations.
#[derive(Clone, Debug, PartialEq)]
pub struct Posterior {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub log_marginal_likelihood: f64,
    pub evaluations: usize,
    pub failed_starts: usize,
    /// True when no start could be evaluated and defaults were restored.
    pub fell_back: bool,
}

struct Factor {
    l: Mat<f64>,
    alpha: Vec<f64>,
    jitter: f64,
    lml: f64,
}

/// GP on a fixed spectral basis, trained on a subset of its local indices.
pub struct GpModel<'b> {
    basis: &'b SpectralBasis,
    train: Vec<usize>,
    y_raw: Vec<f64>,
    y: Vec<f64>,
    y_mean: f64,
    y_std: f64,
    kernel: KernelSpec,
    noise_variance: f64,
    /// Rows of the eigenvector matrix at the training indices.
    w: Mat<f64>,
    factor: Factor,
}

fn standardize(y: &[f64]) -> (f64, f64) {
    if y.is_empty() {
        return (0.0, 1.0);
    }
    let t = y.len() as f64;
    let mean = y.iter().sum::<f64>() / t;
    if y.len() < 2 {
        return (mean, 1.0);
    }
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1.0);
    let std = var.sqrt();
    if std > 1e-12 * mean.abs().max(1.0) {
        (mean, std)
    } else {
        (mean, 1.0)
    }
}

/// Cholesky factor of `W diag(g) Wᵀ + noise·I`, escalating diagonal jitter
/// on failure.
fn factorize(w: &Mat<f64>, g: &[f64], noise: f64) -> Result<(Mat<f64>, f64)> {
    let t = w.nrows();
    let scaled = Mat::from_fn(t, w.ncols(), |i, p| w[(i, p)] * g[p]);
    let mut gram = &scaled * w.transpose();
    for i in 0..t {
        gram[(i, i)] += noise;
    }
    let mut jitter = 0.0;
    loop {
        if let Ok(llt) = gram.llt(Side::Lower) {
            return Ok((llt.L().to_owned(), jitter));
        }
        let next = if jitter == 0.0 { JITTER_START } else { jitter * 10.0 };
        if next > JITTER_MAX * (1.0 + 1e-9) {
            return Err(Error::Factorization(jitter));
        }
        for i in 0..t {
            gram[(i, i)] += next - jitter;
        }
        jitter = next;
    }
}

fn solve_lower(l: &Mat<f64>, rhs: &mut Mat<f64>) {
    solve_lower_triangular_in_place(l.as_ref(), rhs.as_mut(), Par::Seq);
}

fn build_factor(w: &Mat<f64>, g: &[f64], noise: f64, y: &[f64]) -> Result<Factor> {
    let t = y.len();
    let (l, jitter) = factorize(w, g, noise)?;
    let mut v = Mat::from_fn(t, 1, |i, _| y[i]);
    solve_lower(&l, &mut v);
    let fit_term: f64 = (0..t).map(|i| v[(i, 0)] * v[(i, 0)]).sum();
    faer::linalg::triangular_solve::solve_upper_triangular_in_place(l.transpose(), v.as_mut(), Par::Seq);
    let alpha: Vec<f64> = (0..t).map(|i| v[(i, 0)]).collect();
    let log_det: f64 = (0..t).map(|i| l[(i, i)].ln()).sum();
    let lml = -0.5 * fit_term - log_det - 0.5 * t as f64 * LN_2PI;
    Ok(Factor { l, alpha, jitter, lml })
}

impl<'b> GpModel<'b> {
    /// Standardizes `y` and factorizes the Gram matrix.
    pub fn new(
        basis: &'b SpectralBasis,
        train: Vec<usize>,
        y: Vec<f64>,
        kernel: KernelSpec,
        noise_variance: f64,
    ) -> Result<Self> {
        let n = basis.dimension();
        if train.len() != y.len() {
            return Err(Error::SizeMismatch(train.len(), y.len()));
        }
        let mut seen = vec![false; n];
        for &i in &train {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameters(format!("training index {i} repeated")));
            }
        }
        if !(noise_variance.is_finite() && noise_variance >= 0.0) {
            return Err(Error::InvalidParameters(format!("noise variance {noise_variance}")));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameters("non-finite observation".into()));
        }
        kernel.validate(n)?;
        let (y_mean, y_std) = standardize(&y);
        let ys: Vec<f64> = y.iter().map(|v| (v - y_mean) / y_std).collect();
        let u = basis.eigenvectors();
        let w = Mat::from_fn(train.len(), n, |i, p| u[(train[i], p)]);
        let factor = build_factor(&w, &kernel.weights(basis.eigenvalues()), noise_variance, &ys)?;
        Ok(Self {
            basis,
            train,
            y_raw: y,
            y: ys,
            y_mean,
            y_std,
            kernel,
            noise_variance,
            w,
            factor,
        })
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn train_indices(&self) -> &[usize] {
        &self.train
    }

    pub fn observations(&self) -> &[f64] {
        &self.y_raw
    }

    pub fn standardization(&self) -> (f64, f64) {
        (self.y_mean, self.y_std)
    }

    /// Diagonal jitter that was needed to factorize the Gram matrix.
    pub fn jitter(&self) -> f64 {
        self.factor.jitter
    }

    /// Log evidence of the standardized observations.
    pub fn log_marginal_likelihood(&self) -> f64 {
        self.factor.lml
    }

    /// Replaces the hyperparameters and refactorizes.
    pub fn set_hyperparameters(&mut self, kernel: KernelSpec, noise_variance: f64) -> Result<()> {
        kernel.validate(self.basis.dimension())?;
        let factor = build_factor(&self.w, &kernel.weights(self.basis.eigenvalues()), noise_variance, &self.y)?;
        self.kernel = kernel;
        self.noise_variance = noise_variance;
        self.factor = factor;
        Ok(())
    }

    pub fn posterior(&self, query: &[usize]) -> Result<Posterior> {
        let n = self.basis.dimension();
        if let Some(&bad) = query.iter().find(|&&q| q >= n) {
            return Err(Error::IndexOutOfRange { index: bad, len: n });
        }
        let t = self.train.len();
        let g = self.kernel.weights(self.basis.eigenvalues());
        let u = self.basis.eigenvectors();
        // Spectral coefficients g ⊙ Wᵀα give the mean as a projection.
        let coef: Vec<f64> = (0..n)
            .map(|p| g[p] * (0..t).map(|i| self.w[(i, p)] * self.factor.alpha[i]).sum::<f64>())
            .collect();
        let uq = Mat::from_fn(query.len(), n, |a, p| u[(query[a], p)]);
        let prior_var: Vec<f64> = (0..query.len())
            .map(|a| (0..n).map(|p| g[p] * uq[(a, p)] * uq[(a, p)]).sum())
            .collect();
        let mut mean: Vec<f64> = (0..query.len())
            .map(|a| (0..n).map(|p| uq[(a, p)] * coef[p]).sum())
            .collect();
        let mut variance = prior_var;
        if t > 0 {
            let scaled = Mat::from_fn(t, n, |i, p| self.w[(i, p)] * g[p]);
            let mut cross = &scaled * uq.transpose();
            solve_lower(&self.factor.l, &mut cross);
            for (a, var) in variance.iter_mut().enumerate() {
                *var -= (0..t).map(|i| cross[(i, a)] * cross[(i, a)]).sum::<f64>();
            }
        }
        let s2 = self.y_std * self.y_std;
        for (m, v) in mean.iter_mut().zip(variance.iter_mut()) {
            *m = *m * self.y_std + self.y_mean;
            *v = v.max(0.0) * s2;
        }
        Ok(Posterior { mean, variance })
    }

    /// Log evidence and its gradient over `kernel.log_params()` followed by
    /// `ln σ²`.
    fn evidence_and_gradient(&self, kernel: &KernelSpec, noise: f64) -> Option<(f64, Vec<f64>)> {
        let lambdas = self.basis.eigenvalues();
        let g = kernel.weights(lambdas);
        let f = build_factor(&self.w, &g, noise, &self.y).ok()?;
        let t = self.y.len();
        let n = self.basis.dimension();
        let mut v = self.w.clone();
        solve_lower(&f.l, &mut v);
        let mut linv = Mat::<f64>::identity(t, t);
        solve_lower(&f.l, &mut linv);
        let trace_inv: f64 = (0..t).map(|j| (j..t).map(|i| linv[(i, j)] * linv[(i, j)]).sum::<f64>()).sum();
        let d_dg: Vec<f64> = (0..n)
            .map(|p| {
                let a: f64 = (0..t).map(|i| self.w[(i, p)] * f.alpha[i]).sum();
                let b: f64 = (0..t).map(|i| v[(i, p)] * v[(i, p)]).sum();
                0.5 * (a * a - b)
            })
            .collect();
        let mut grad = kernel.log_param_gradient(lambdas, &d_dg);
        let alpha_sq: f64 = f.alpha.iter().map(|a| a * a).sum();
        grad.push(noise * 0.5 * (alpha_sq - trace_inv));
        f.lml.is_finite().then_some((f.lml, grad))
    }

    /// Maximum-likelihood fit of kernel hyperparameters and noise variance
    /// over a log-space box, from the current values, the defaults and
    /// `restarts` uniform random starts. With fewer than two observations
    /// the defaults are installed without fitting.
    pub fn fit<R: Rng + ?Sized>(&mut self, restarts: usize, rng: &mut R) -> Result<FitReport> {
        let n = self.basis.dimension();
        let defaults = KernelSpec::new(self.kernel.family, n, self.kernel.order);
        if self.train.len() < 2 {
            self.set_hyperparameters(defaults, DEFAULT_NOISE_VARIANCE)?;
            return Ok(FitReport {
                log_marginal_likelihood: self.log_marginal_likelihood(),
                evaluations: 0,
                failed_starts: 0,
                fell_back: false,
            });
        }
        let template = self.kernel.clone();
        let mut bounds = template.log_bounds();
        bounds.push((NOISE_BOUNDS.0.ln(), NOISE_BOUNDS.1.ln()));
        let pack = |k: &KernelSpec, noise: f64| {
            let mut x = k.log_params();
            x.push(noise.max(NOISE_BOUNDS.0).ln());
            x
        };
        let mut starts = vec![pack(&self.kernel, self.noise_variance)];
        let default_start = pack(&defaults, DEFAULT_NOISE_VARIANCE);
        if default_start != starts[0] {
            starts.push(default_start);
        }
        for _ in 0..restarts {
            starts.push(bounds.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect());
        }

        let m = bounds.len();
        let objective = |x: &[f64]| self.evidence_and_gradient(&template.with_log_params(&x[..m - 1]), x[m - 1].exp());
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut evaluations = 0;
        let mut failed_starts = 0;
        for start in &starts {
            match maximize_in_box(objective, start, &bounds, OPTIMIZER_ITERATIONS) {
                Some(found) => {
                    evaluations += found.evaluations;
                    if best.as_ref().is_none_or(|(v, _)| found.value > *v) {
                        best = Some((found.value, found.x));
                    }
                }
                None => {
                    evaluations += 1;
                    failed_starts += 1;
                }
            }
        }
        let fell_back = match best {
            Some((_, x)) => self
                .set_hyperparameters(template.with_log_params(&x[..m - 1]), x[m - 1].exp())
                .is_err(),
            None => true,
        };
        if fell_back {
            self.set_hyperparameters(defaults, DEFAULT_NOISE_VARIANCE)?;
        }
        Ok(FitReport {
            log_marginal_likelihood: self.log_marginal_likelihood(),
            evaluations,
            failed_starts,
            fell_back,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{kernel_matrix, KernelFamily};
    use crate::graph::{eigendecompose, generate_ba, normalized_laplacian, Graph};
    use crate::rng::stream;
    use rand::Rng;

    fn basis_of(g: &Graph) -> SpectralBasis {
        eigendecompose(&normalized_laplacian(g)).unwrap()
    }

    #[test]
    fn interpolates_without_noise() {
        let g = generate_ba(30, 2, 1).unwrap();
        let b = basis_of(&g);
        let m = GpModel::new(&b, vec![2, 5, 9], vec![1.0, -2.0, 0.5], KernelSpec::diffusion(1.0, 1.0), 0.0).unwrap();
        let post = m.posterior(&[2, 5, 9]).unwrap();
        for (got, want) in post.mean.iter().zip([1.0, -2.0, 0.5]) {
            assert!((got - want).abs() < 1e-6);
        }
    }

    #[test]
    fn identity_kernel_prior_far_from_data() {
        let g = generate_ba(10, 2, 1).unwrap();
        let b = basis_of(&g);
        let m = GpModel::new(&b, vec![0, 1], vec![3.0, 5.0], KernelSpec::diffusion(0.0, 1.0), 0.0).unwrap();
        let post = m.posterior(&[7]).unwrap();
        assert!((post.mean[0] - 4.0).abs() < 1e-10);
        // Unit prior variance in standardized units, rescaled by the sample variance.
        let (_, std) = m.standardization();
        assert!((post.variance[0] - std * std).abs() < 1e-10);
    }

    #[test]
    fn single_point_evidence() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let b = basis_of(&g);
        let m = GpModel::new(&b, vec![0], vec![4.2], KernelSpec::diffusion(0.0, 1.0), 0.0).unwrap();
        assert!((m.log_marginal_likelihood() + 0.5 * LN_2PI).abs() < 1e-12);
    }

    #[test]
    fn evidence_matches_explicit_inverse() {
        let g = generate_ba(40, 2, 9).unwrap();
        let b = basis_of(&g);
        let mut rng = stream(4, "lml");
        for family in KernelFamily::ALL {
            let train: Vec<usize> = (0..10).map(|i| i * 3 + 1).collect();
            let y: Vec<f64> = (0..10).map(|_| rng.random_range(-2.0..2.0)).collect();
            let mut spec = KernelSpec::new(family, 40, 4);
            spec.signal_variance = 1.4;
            let m = GpModel::new(&b, train.clone(), y, spec.clone(), 0.05).unwrap();
            let mut k = kernel_matrix(&spec, &b, &train, &train).unwrap();
            for i in 0..10 {
                k[(i, i)] += 0.05;
            }
            let ys = &m.y;
            use faer::linalg::solvers::DenseSolveCore;
            let inv = k.llt(Side::Lower).unwrap().inverse();
            let quad: f64 = (0..10).map(|i| (0..10).map(|j| ys[i] * inv[(i, j)] * ys[j]).sum::<f64>()).sum();
            let logdet: f64 = k.self_adjoint_eigen(Side::Lower).unwrap().S().column_vector().iter().map(|l| l.ln()).sum();
            let want = -0.5 * quad - 0.5 * logdet - 5.0 * LN_2PI;
            assert!((m.log_marginal_likelihood() - want).abs() < 1e-8, "{family:?}");
        }
    }

    #[test]
    fn evidence_gradient_matches_finite_differences() {
        let g = generate_ba(35, 2, 2).unwrap();
        let b = basis_of(&g);
        let mut rng = stream(5, "grad");
        for family in KernelFamily::ALL {
            let train: Vec<usize> = (0..12).map(|i| i * 2).collect();
            let y: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut spec = KernelSpec::new(family, 35, 4);
            for (i, v) in spec.beta.iter_mut().enumerate() {
                *v = 0.5 + 0.01 * i as f64;
            }
            spec.epsilon = 0.7;
            spec.signal_variance = 1.2;
            let m = GpModel::new(&b, train, y, spec.clone(), 0.1).unwrap();
            let mut x = spec.log_params();
            x.push(0.1f64.ln());
            let k = x.len();
            let eval = |x: &[f64]| m.evidence_and_gradient(&spec.with_log_params(&x[..k - 1]), x[k - 1].exp()).unwrap();
            let (_, grad) = eval(&x);
            let h = 1e-5;
            for i in [0, k - 2, k - 1] {
                let mut up = x.clone();
                up[i] += h;
                let mut dn = x.clone();
                dn[i] -= h;
                let fd = (eval(&up).0 - eval(&dn).0) / (2.0 * h);
                assert!((fd - grad[i]).abs() < 1e-5 * fd.abs().max(1.0), "{family:?} {i}: {fd} vs {}", grad[i]);
            }
        }
    }

    #[test]
    fn fit_never_lowers_evidence() {
        let g = generate_ba(30, 2, 3).unwrap();
        let b = basis_of(&g);
        let u3 = b.eigenvector(2);
        let train: Vec<usize> = (0..30).step_by(3).collect();
        let y: Vec<f64> = train.iter().map(|&i| u3[i]).collect();
        for family in KernelFamily::ALL {
            let spec = KernelSpec::new(family, 30, 4);
            let mut m = GpModel::new(&b, train.clone(), y.clone(), spec, DEFAULT_NOISE_VARIANCE).unwrap();
            let before = m.log_marginal_likelihood();
            let report = m.fit(3, &mut stream(1, "fit")).unwrap();
            assert!(!report.fell_back);
            assert!(report.log_marginal_likelihood >= before - 1e-9);
        }
    }

    #[test]
    fn constant_observations() {
        let g = generate_ba(20, 2, 3).unwrap();
        let b = basis_of(&g);
        let mut m = GpModel::new(&b, vec![0, 4, 8, 12], vec![2.5; 4], KernelSpec::diffusion(1.0, 1.0), 1e-6).unwrap();
        m.fit(2, &mut stream(0, "c")).unwrap();
        let post = m.posterior(&(0..20).collect::<Vec<_>>()).unwrap();
        assert!(post.mean.iter().all(|v| (v - 2.5).abs() < 1e-6));
    }

    #[test]
    fn too_few_points_uses_defaults() {
        let g = generate_ba(20, 2, 3).unwrap();
        let b = basis_of(&g);
        let mut m = GpModel::new(&b, vec![3], vec![1.0], KernelSpec::diffusion(4.0, 2.0), 0.3).unwrap();
        m.fit(5, &mut stream(0, "d")).unwrap();
        assert_eq!(m.kernel(), &KernelSpec::new(KernelFamily::Diffusion, 20, 2));
        assert_eq!(m.noise_variance(), DEFAULT_NOISE_VARIANCE);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = generate_ba(10, 2, 3).unwrap();
        let b = basis_of(&g);
        let k = KernelSpec::diffusion(1.0, 1.0);
        assert!(GpModel::new(&b, vec![1, 1], vec![0.0, 1.0], k.clone(), 0.0).is_err());
        assert!(GpModel::new(&b, vec![10], vec![0.0], k.clone(), 0.0).is_err());
        assert!(GpModel::new(&b, vec![1], vec![0.0, 1.0], k, 0.0).is_err());
    }

    #[test]
    fn recovers_diffusion_length_scale() {
        // Draw a GP sample with β = 0.5 on a 30-node graph and refit.
        let g = generate_ba(30, 2, 17).unwrap();
        let b = basis_of(&g);
        let weights = KernelSpec::diffusion(0.5, 1.0).weights(b.eigenvalues());
        let mut hits = 0;
        for rep in 0..10u64 {
            let mut rng = stream(rep, "draw");
            let z: Vec<f64> = (0..30).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
            let u = b.eigenvectors();
            let f: Vec<f64> = (0..30).map(|i| (0..30).map(|p| u[(i, p)] * weights[p].sqrt() * z[p]).sum()).collect();
            let train: Vec<usize> = (0..25).collect();
            let y: Vec<f64> = train.iter().map(|&i| f[i]).collect();
            let mut m = GpModel::new(&b, train, y, KernelSpec::diffusion(1.0, 1.0), DEFAULT_NOISE_VARIANCE).unwrap();
            m.fit(5, &mut stream(rep, "fit")).unwrap();
            let beta = m.kernel().beta[0];
            if (0.25..=1.0).contains(&beta) {
                hits += 1;
            }
        }
        assert!(hits >= 5, "recovered beta within a factor of 2 in {hits}/10 draws");
    }
}
