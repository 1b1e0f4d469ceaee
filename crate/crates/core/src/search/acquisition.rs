use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::gp::GpModel;
use crate::{Error, Result};

/// `E[max(f - best, 0)]` for `f ~ N(mean, variance)`.
pub fn expected_improvement(mean: f64, variance: f64, best: f64) -> f64 {
    let sigma = variance.max(0.0).sqrt();
    if sigma == 0.0 {
        return (mean - best).max(0.0);
    }
    let z = (mean - best) / sigma;
    let cdf = 0.5 * libm::erfc(-z * FRAC_1_SQRT_2);
    let pdf = (-0.5 * z * z).exp() / (2.0 * PI).sqrt();
    (sigma * (z * cdf + pdf)).max(0.0)
}

/// Candidate with the largest expected improvement over `best`; ties go to
/// the lowest local index.
pub fn select_next(model: &GpModel<'_>, candidates: &[usize], best: f64) -> Result<usize> {
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() {
        return Err(Error::Exhausted);
    }
    let post = model.posterior(&sorted)?;
    let mut pick = 0;
    let mut top = f64::NEG_INFINITY;
    for (i, (&m, &v)) in post.mean.iter().zip(&post.variance).enumerate() {
        let ei = expected_improvement(m, v, best);
        if ei > top {
            top = ei;
            pick = i;
        }
    }
    Ok(sorted[pick])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::KernelSpec;
    use crate::graph::{eigendecompose, generate_ba, normalized_laplacian};
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn closed_forms() {
        assert_eq!(expected_improvement(2.0, 0.0, 1.0), 1.0);
        assert_eq!(expected_improvement(0.0, 0.0, 1.0), 0.0);
        assert!((expected_improvement(1.0, 1.0, 1.0) - 0.398_942_280_4).abs() < 1e-9);
    }

    #[test]
    fn monte_carlo_agreement() {
        let mut rng = stream(0, "ei");
        let mc: f64 = (0..1_000_000)
            .map(|_| (rng.sample::<f64, _>(StandardNormal) - 1.0).max(0.0))
            .sum::<f64>()
            / 1e6;
        assert!((mc - expected_improvement(0.0, 1.0, 1.0)).abs() < 1e-2);
    }

    #[test]
    fn selection() {
        let g = generate_ba(12, 2, 0).unwrap();
        let b = eigendecompose(&normalized_laplacian(&g)).unwrap();
        let prior = GpModel::new(&b, vec![], vec![], KernelSpec::diffusion(0.0, 1.0), 0.0).unwrap();
        assert_eq!(select_next(&prior, &[7, 3, 9], 0.0).unwrap(), 3);
        assert_eq!(select_next(&prior, &[5], 0.0).unwrap(), 5);
        assert!(matches!(select_next(&prior, &[], 0.0), Err(Error::Exhausted)));

        let m = GpModel::new(&b, vec![0, 1, 2], vec![0.1, 0.9, 0.4], KernelSpec::diffusion(1.0, 1.0), 1e-6).unwrap();
        let cands = [3, 4, 5, 6, 7];
        let post = m.posterior(&cands).unwrap();
        let want = cands
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, _)| {
                let ei = expected_improvement(post.mean[i], post.variance[i], 0.9);
                if ei > acc.1 {
                    (i, ei)
                } else {
                    acc
                }
            })
            .0;
        assert_eq!(select_next(&m, &cands, 0.9).unwrap(), cands[want]);
    }
}
