//! Shared first-order minimizer for the RBM and DBN projections: plain
//! gradient descent with a step that halves on non-improvement, restarted
//! from several seeded Gaussian initializations.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::models::derive_seed;

#[derive(Debug, Clone, Copy)]
pub struct GradConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial step size; halved whenever a step fails to improve.
    pub step: f64,
    /// Declare convergence when the gradient max-norm falls below this.
    pub gtol: f64,
    /// Declare convergence when an accepted step improves by less than this.
    pub ftol: f64,
    /// Standard deviation of the Gaussian parameter initialization.
    pub init_sigma: f64,
    pub seed: u64,
}

impl Default for GradConfig {
    fn default() -> Self {
        GradConfig {
            restarts: 10,
            max_iters: 5000,
            step: 0.1,
            gtol: 1e-7,
            ftol: 1e-12,
            init_sigma: 0.1,
            seed: 0,
        }
    }
}

pub(crate) struct DescentOutcome {
    pub theta: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize `value` from the best of `cfg.restarts` seeded starts, using
/// `grad` once per outer iteration.
pub(crate) fn descend(
    dim: usize,
    cfg: &GradConfig,
    value: &mut dyn FnMut(&[f64]) -> f64,
    grad: &mut dyn FnMut(&[f64]) -> Vec<f64>,
) -> DescentOutcome {
    let normal = Normal::new(0.0, cfg.init_sigma.max(f64::MIN_POSITIVE)).unwrap();
    let restarts = cfg.restarts.max(1);
    let mut best: Option<DescentOutcome> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, r as u64));
        let mut theta: Vec<f64> = (0..dim).map(|_| normal.sample(&mut rng)).collect();
        let mut current = value(&theta);
        let mut step = cfg.step;
        let mut iterations = 0;
        let mut converged = false;
        let mut trial = vec![0.0; dim];
        'outer: for _ in 0..cfg.max_iters {
            iterations += 1;
            let g = grad(&theta);
            if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) <= cfg.gtol {
                converged = true;
                break;
            }
            loop {
                for ((t, &x), &gv) in trial.iter_mut().zip(&theta).zip(&g) {
                    *t = x - step * gv;
                }
                let attempt = value(&trial);
                if attempt < current {
                    let improvement = current - attempt;
                    std::mem::swap(&mut theta, &mut trial);
                    current = attempt;
                    if improvement < cfg.ftol {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                step *= 0.5;
                if step < 1e-16 {
                    break 'outer;
                }
            }
        }
        let outcome = DescentOutcome {
            theta,
            value: current,
            iterations,
            converged,
        };
        if best.as_ref().map_or(true, |b| outcome.value < b.value) {
            best = Some(outcome);
        }
    }
    best.expect("at least one restart")
}

/// Central finite-difference gradient of `value` with half-step `h`.
pub(crate) fn finite_difference_grad(
    theta: &[f64],
    h: f64,
    value: &mut dyn FnMut(&[f64]) -> f64,
) -> Vec<f64> {
    let mut work = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        let orig = work[i];
        work[i] = orig + h;
        let up = value(&work);
        work[i] = orig - h;
        let down = value(&work);
        work[i] = orig;
        grad.push((up - down) / (2.0 * h));
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descends_a_convex_quadratic_to_the_minimum() {
        let cfg = GradConfig {
            restarts: 2,
            max_iters: 2000,
            ..GradConfig::default()
        };
        // f(x) = sum (x_i - i)^2
        let target = |x: &[f64]| -> f64 {
            x.iter()
                .enumerate()
                .map(|(i, v)| (v - i as f64).powi(2))
                .sum()
        };
        let out = descend(
            3,
            &cfg,
            &mut |x| target(x),
            &mut |x| {
                x.iter()
                    .enumerate()
                    .map(|(i, v)| 2.0 * (v - i as f64))
                    .collect()
            },
        );
        assert!(out.converged);
        assert!(out.value < 1e-10);
        for (i, v) in out.theta.iter().enumerate() {
            assert!((v - i as f64).abs() < 1e-5);
        }
    }

    #[test]
    fn finite_differences_match_analytic_gradient() {
        let mut f = |x: &[f64]| x[0] * x[0] + 3.0 * x[0] * x[1] + x[1].powi(4);
        let theta = [0.7, -0.4];
        let g = finite_difference_grad(&theta, 1e-5, &mut f);
        let exact = [2.0 * 0.7 + 3.0 * -0.4, 3.0 * 0.7 + 4.0 * (-0.4f64).powi(3)];
        for (a, b) in g.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
