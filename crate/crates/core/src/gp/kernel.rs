//! Kernels of the form `K = U diag(g(λ)) Uᵀ` over a subgraph eigenbasis.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::graph::SpectralBasis;
use crate::{Error, Result};

pub(crate) const BETA_BOUNDS: (f64, f64) = (1e-4, 1e2);
pub(crate) const EPSILON_BOUNDS: (f64, f64) = (1e-4, 1e2);
pub(crate) const SIGNAL_BOUNDS: (f64, f64) = (1e-4, 1e3);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    Diffusion,
    DiffusionArd,
    Polynomial,
    SumInversePolynomial,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 4] = [
        KernelFamily::Diffusion,
        KernelFamily::DiffusionArd,
        KernelFamily::Polynomial,
        KernelFamily::SumInversePolynomial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Diffusion => "diffusion",
            Self::DiffusionArd => "diffusion_ard",
            Self::Polynomial => "polynomial",
            Self::SumInversePolynomial => "sum_inverse_polynomial",
        }
    }

    pub fn is_polynomial(self) -> bool {
        matches!(self, Self::Polynomial | Self::SumInversePolynomial)
    }
}

/// Kernel family plus hyperparameters.
///
/// `beta` has one entry for `Diffusion`, one per eigenvalue for
/// `DiffusionArd`, and `order - 1` entries for the polynomial families.
/// `epsilon` is only read by the polynomial families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub beta: Vec<f64>,
    pub epsilon: f64,
    pub order: usize,
    pub signal_variance: f64,
}

impl KernelSpec {
    /// Default hyperparameters (`β = 1`, `ε = 1`, unit signal variance) for a
    /// basis of dimension `n`. `order` is clamped to at least 2.
    pub fn new(family: KernelFamily, n: usize, order: usize) -> Self {
        let order = order.max(2);
        let len = match family {
            KernelFamily::Diffusion => 1,
            KernelFamily::DiffusionArd => n,
            _ => order - 1,
        };
        Self {
            family,
            beta: vec![1.0; len],
            epsilon: 1.0,
            order,
            signal_variance: 1.0,
        }
    }

    pub fn diffusion(beta: f64, signal_variance: f64) -> Self {
        Self {
            family: KernelFamily::Diffusion,
            beta: vec![beta],
            epsilon: 0.0,
            order: 2,
            signal_variance,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let want = match self.family {
            KernelFamily::Diffusion => 1,
            KernelFamily::DiffusionArd => n,
            _ => self.order.saturating_sub(1),
        };
        if self.order < 2 || self.beta.len() != want {
            return Err(Error::InvalidParameters(format!(
                "{} kernel of order {} expects {} beta values, got {}",
                self.family.name(),
                self.order,
                want,
                self.beta.len()
            )));
        }
        let finite_nonneg = |x: f64| x.is_finite() && x >= 0.0;
        if !self.beta.iter().all(|&b| finite_nonneg(b))
            || !finite_nonneg(self.epsilon)
            || !(self.signal_variance.is_finite() && self.signal_variance > 0.0)
        {
            return Err(Error::InvalidParameters(format!(
                "kernel hyperparameters out of range: {self:?}"
            )));
        }
        if self.family.is_polynomial() && self.epsilon == 0.0 && self.beta.iter().any(|&b| b == 0.0) {
            return Err(Error::InvalidParameters(
                "polynomial kernels need epsilon > 0 or all beta > 0".into(),
            ));
        }
        Ok(())
    }

    /// Spectral weights `g_p = s / r(λ_p)`.
    pub fn weights(&self, eigenvalues: &[f64]) -> Vec<f64> {
        let s = self.signal_variance;
        eigenvalues
            .iter()
            .enumerate()
            .map(|(p, &lam)| {
                let lam = lam.max(0.0);
                match self.family {
                    KernelFamily::Diffusion => s * (-self.beta[0] * lam).exp(),
                    KernelFamily::DiffusionArd => s * (-self.beta[p] * lam).exp(),
                    KernelFamily::Polynomial => s / (self.poly_sum(lam) + self.epsilon),
                    KernelFamily::SumInversePolynomial => {
                        s * powers(lam, self.beta.len())
                            .zip(&self.beta)
                            .map(|(lj, b)| 1.0 / (b * lj + self.epsilon))
                            .sum::<f64>()
                    }
                }
            })
            .collect()
    }

    fn poly_sum(&self, lam: f64) -> f64 {
        powers(lam, self.beta.len()).zip(&self.beta).map(|(lj, b)| b * lj).sum()
    }

    /// Hyperparameters in log space: betas, then epsilon for the polynomial
    /// families, then signal variance.
    pub(crate) fn log_params(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.beta.iter().map(|b| b.ln()).collect();
        if self.family.is_polynomial() {
            out.push(self.epsilon.ln());
        }
        out.push(self.signal_variance.ln());
        out
    }

    pub(crate) fn with_log_params(&self, theta: &[f64]) -> Self {
        let nb = self.beta.len();
        let mut next = self.clone();
        for (b, t) in next.beta.iter_mut().zip(theta) {
            *b = t.exp();
        }
        let mut at = nb;
        if self.family.is_polynomial() {
            next.epsilon = theta[at].exp();
            at += 1;
        }
        next.signal_variance = theta[at].exp();
        next
    }

    pub(crate) fn log_bounds(&self) -> Vec<(f64, f64)> {
        let ln = |(a, b): (f64, f64)| (a.ln(), b.ln());
        let mut out = vec![ln(BETA_BOUNDS); self.beta.len()];
        if self.family.is_polynomial() {
            out.push(ln(EPSILON_BOUNDS));
        }
        out.push(ln(SIGNAL_BOUNDS));
        out
    }

    /// Chain rule from `∂L/∂g_p` to the gradient over [`Self::log_params`].
    pub(crate) fn log_param_gradient(&self, eigenvalues: &[f64], d_dg: &[f64]) -> Vec<f64> {
        let s = self.signal_variance;
        let nb = self.beta.len();
        let mut grad = vec![0.0; self.log_params().len()];
        let weights = self.weights(eigenvalues);
        let last = grad.len() - 1;
        grad[last] = weights.iter().zip(d_dg).map(|(g, d)| g * d).sum();
        for (p, (&lam, &d)) in eigenvalues.iter().zip(d_dg).enumerate() {
            let lam = lam.max(0.0);
            match self.family {
                KernelFamily::Diffusion => grad[0] -= d * self.beta[0] * lam * weights[p],
                KernelFamily::DiffusionArd => grad[p] = -d * self.beta[p] * lam * weights[p],
                KernelFamily::Polynomial => {
                    let r = self.poly_sum(lam) + self.epsilon;
                    let c = -d * s / (r * r);
                    for (j, lj) in powers(lam, nb).enumerate() {
                        grad[j] += c * self.beta[j] * lj;
                    }
                    grad[nb] += c * self.epsilon;
                }
                KernelFamily::SumInversePolynomial => {
                    for (j, lj) in powers(lam, nb).enumerate() {
                        let r = self.beta[j] * lj + self.epsilon;
                        let c = -d * s / (r * r);
                        grad[j] += c * self.beta[j] * lj;
                        grad[nb] += c * self.epsilon;
                    }
                }
            }
        }
        grad
    }
}

/// `λ, λ², …, λ^m`.
fn powers(lam: f64, m: usize) -> impl Iterator<Item = f64> {
    (1..=m as i32).map(move |j| lam.powi(j))
}

/// Kernel block between local indices `rows` and `cols`.
pub fn kernel_matrix(spec: &KernelSpec, basis: &SpectralBasis, rows: &[usize], cols: &[usize]) -> Result<Mat<f64>> {
    let n = basis.dimension();
    spec.validate(n)?;
    for &i in rows.iter().chain(cols) {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, len: n });
        }
    }
    let g = spec.weights(basis.eigenvalues());
    let u = basis.eigenvectors();
    let left = Mat::from_fn(rows.len(), n, |a, p| u[(rows[a], p)] * g[p]);
    let right = Mat::from_fn(n, cols.len(), |p, b| u[(cols[b], p)]);
    Ok(left * right)
}
