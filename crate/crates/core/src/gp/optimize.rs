//! Projected limited-memory quasi-Newton ascent inside a box.

use std::collections::VecDeque;

#[derive(Clone, Debug)]
pub struct BoxMaximum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
}

const MEMORY: usize = 8;

fn project(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (xi, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *xi = xi.clamp(lo, hi);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gradient with components that push against an active bound zeroed.
fn projected_gradient(x: &[f64], g: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter()
        .zip(g)
        .zip(bounds)
        .map(|((&xi, &gi), &(lo, hi))| {
            if (xi <= lo && gi < 0.0) || (xi >= hi && gi > 0.0) {
                0.0
            } else {
                gi
            }
        })
        .collect()
}

/// Maximizes `f` from `x0` over the box `bounds`. `f` returns the value and
/// gradient, or `None` where it cannot be evaluated; such points are
/// treated as worse than any finite value. Returns `None` when `x0` itself
/// cannot be evaluated.
pub fn maximize_in_box<F>(mut f: F, x0: &[f64], bounds: &[(f64, f64)], max_iter: usize) -> Option<BoxMaximum>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let mut x = x0.to_vec();
    project(&mut x, bounds);
    let (mut value, mut grad) = f(&x)?;
    let mut evaluations = 1;
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();

    for _ in 0..max_iter {
        let pg = projected_gradient(&x, &grad, bounds);
        if pg.iter().map(|v| v.abs()).fold(0.0, f64::max) < 1e-6 {
            break;
        }
        // Two-loop recursion on the ascent problem (curvature pairs use
        // the negated gradient difference so they stay positive).
        let mut d = pg.clone();
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &d);
            for (di, yi) in d.iter_mut().zip(y) {
                *di -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let gamma = dot(s, y) / dot(y, y);
            d.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &d);
            for (di, si) in d.iter_mut().zip(s) {
                *di += (a - b) * si;
            }
        }
        for (di, pgi) in d.iter_mut().zip(&pg) {
            if *pgi == 0.0 {
                *di = 0.0;
            }
        }
        if dot(&d, &pg) <= 0.0 {
            d = pg.clone();
            history.clear();
        }
        if history.is_empty() {
            // Keep the very first step inside a unit ball in log space.
            let norm = dot(&d, &d).sqrt();
            if norm > 1.0 {
                d.iter_mut().for_each(|v| *v /= norm);
            }
        }

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let mut trial: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            project(&mut trial, bounds);
            let moved: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            if dot(&moved, &moved) == 0.0 {
                break;
            }
            evaluations += 1;
            if let Some((v, g)) = f(&trial) {
                if v.is_finite() && v >= value + 1e-4 * dot(&grad, &moved) {
                    accepted = Some((trial, v, g, moved));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((trial, v, g, s)) = accepted else { break };
        let y: Vec<f64> = grad.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 {
            if history.len() == MEMORY {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        let gain = v - value;
        x = trial;
        value = v;
        grad = g;
        if gain.abs() < 1e-10 * value.abs().max(1.0) {
            break;
        }
    }
    Some(BoxMaximum { x, value, evaluations })
}
