//! Naive Bayes / mixture model: convex combinations of k product
//! distributions, fit by EM on the exact target distribution. Each run is a
//! local minimization of D(p || mixture); the best of several seeded
//! restarts is reported.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::{derive_seed, Model, ProjResult};
use crate::space::StateSpace;

#[derive(Debug, Clone, Copy)]
pub struct EmConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop a run when the divergence improves by less than this.
    pub ftol: f64,
    /// Half-width of the uniform perturbation applied to the marginals at
    /// initialization.
    pub noise: f64,
    pub seed: u64,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig {
            restarts: 20,
            max_iters: 500,
            ftol: 1e-10,
            noise: 0.05,
            seed: 0,
        }
    }
}

struct EmRun {
    probs: Vec<f64>,
    divergence: f64,
    iterations: usize,
    converged: bool,
    /// Divergence after every EM update, for monotonicity checks.
    trace: Vec<f64>,
}

/// One EM run from a seeded perturbed-marginals initialization.
fn em_run(p: &Dist, k: usize, cfg: &EmConfig, seed: u64) -> EmRun {
    let space = p.space();
    let n = space.arity();
    let total = space.total();
    let cards = space.cards();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // coords[x * n + a] = a-th coordinate of state x
    let mut coords = vec![0usize; total * n];
    let mut state = vec![0usize; n];
    for x in 0..total {
        space.state_into(x, &mut state);
        coords[x * n..(x + 1) * n].copy_from_slice(&state);
    }

    let marginals = p.axis_marginals();
    let mut lambda = vec![1.0 / k as f64; k];
    let mut factors: Vec<Vec<Vec<f64>>> = (0..k)
        .map(|_| {
            marginals
                .iter()
                .map(|marg| {
                    let mut f: Vec<f64> = marg
                        .iter()
                        .map(|&v| {
                            let jitter = if cfg.noise > 0.0 {
                                rng.gen_range(-cfg.noise..cfg.noise)
                            } else {
                                0.0
                            };
                            (v + jitter).max(1e-9)
                        })
                        .collect();
                    let s: f64 = f.iter().sum();
                    f.iter_mut().for_each(|v| *v /= s);
                    f
                })
                .collect()
        })
        .collect();

    let mut probs = vec![0.0; total];
    let mut comp = vec![0.0; k];
    let mut divergence = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut trace = Vec::new();

    for _ in 0..cfg.max_iters {
        let mut new_lambda = vec![0.0; k];
        let mut new_factors: Vec<Vec<Vec<f64>>> = (0..k)
            .map(|_| cards.iter().map(|&c| vec![0.0; c]).collect())
            .collect();
        let mut d = 0.0;
        for x in 0..total {
            let xc = &coords[x * n..(x + 1) * n];
            let mut q = 0.0;
            for i in 0..k {
                let mut f = lambda[i];
                for (a, &y) in xc.iter().enumerate() {
                    f *= factors[i][a][y];
                }
                comp[i] = f;
                q += f;
            }
            probs[x] = q;
            let mass = p.prob(x);
            if mass > 0.0 {
                d += mass * (mass / q).ln();
                // responsibilities weighted by target mass
                for i in 0..k {
                    let r = mass * comp[i] / q;
                    new_lambda[i] += r;
                    for (a, &y) in xc.iter().enumerate() {
                        new_factors[i][a][y] += r;
                    }
                }
            }
        }
        iterations += 1;
        trace.push(d);
        let improved = divergence - d;
        divergence = d;
        if improved < cfg.ftol {
            converged = true;
            break;
        }
        for i in 0..k {
            if new_lambda[i] > 0.0 {
                for f in &mut new_factors[i] {
                    let s: f64 = f.iter().sum();
                    f.iter_mut().for_each(|v| *v /= s);
                }
            } else {
                // dead component: park it on the uniform product
                for f in &mut new_factors[i] {
                    let u = 1.0 / f.len() as f64;
                    f.iter_mut().for_each(|v| *v = u);
                }
            }
        }
        lambda = new_lambda;
        factors = new_factors;
    }

    EmRun {
        probs,
        divergence,
        iterations,
        converged,
        trace,
    }
}

/// Divergence after every EM update of the single seeded run `restart`
/// would perform under `cfg`; a diagnostic for monotonicity checks.
pub fn em_trace(p: &Dist, k: usize, cfg: &EmConfig, restart: u64) -> Result<Vec<f64>> {
    if k < 1 {
        return Err(Error::KOutOfRange {
            k,
            condition: "k >= 1".into(),
        });
    }
    Ok(em_run(p, k, cfg, derive_seed(cfg.seed, restart)).trace)
}

/// Project onto the k-component mixture-of-products model by EM, keeping
/// the best of `cfg.restarts` seeded runs.
pub fn project_mixture_em(p: &Dist, k: usize, cfg: &EmConfig) -> Result<ProjResult> {
    if k < 1 {
        return Err(Error::KOutOfRange {
            k,
            condition: "k >= 1".into(),
        });
    }
    let restarts = cfg.restarts.max(1);
    let mut best: Option<EmRun> = None;
    for r in 0..restarts {
        let run = em_run(p, k, cfg, derive_seed(cfg.seed, r as u64));
        if best.as_ref().map_or(true, |b| run.divergence < b.divergence) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one restart");
    let total: f64 = best.probs.iter().sum();
    let probs: Vec<f64> = best.probs.iter().map(|v| v / total).collect();
    let q_star = Dist::from_normalized(p.space().clone(), probs);
    let divergence = p.kl(&q_star)?;
    Ok(ProjResult {
        q_star,
        divergence,
        iterations: best.iterations,
        converged: best.converged,
        restarts,
    })
}

#[derive(Debug, Clone)]
pub struct MixtureModel {
    space: StateSpace,
    k: usize,
    cfg: EmConfig,
}

impl MixtureModel {
    pub fn new(space: StateSpace, k: usize, cfg: EmConfig) -> Self {
        MixtureModel { space, k, cfg }
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl Model for MixtureModel {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        project_mixture_em(p, self.k, &self.cfg)
    }

    fn iterative(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "mixture"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::project_independence;

    fn space(cards: &[usize]) -> StateSpace {
        StateSpace::new(cards.to_vec()).unwrap()
    }

    #[test]
    fn one_component_recovers_the_independence_projection() {
        let p = Dist::new(space(&[2, 2]), vec![0.5, 0.3, 0.1, 0.1]).unwrap();
        let em = project_mixture_em(&p, 1, &EmConfig::default()).unwrap();
        let ind = project_independence(&p).unwrap();
        assert!((em.divergence.value() - ind.divergence.value()).abs() < 1e-8);
        assert!(em.q_star.linf(&ind.q_star).unwrap() < 1e-6);
    }

    #[test]
    fn as_many_components_as_states_fits_exactly() {
        let p = Dist::new(space(&[2, 2]), vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let r = project_mixture_em(&p, 4, &EmConfig::default()).unwrap();
        assert!(r.divergence.value() <= 1e-8);
    }

    #[test]
    fn two_components_fit_the_three_bit_diagonal() {
        let p = Dist::uniform_on(space(&[2, 2, 2]), &[0, 7]).unwrap();
        let r = project_mixture_em(&p, 2, &EmConfig::default()).unwrap();
        assert!(r.divergence.value() <= 1e-8);
    }

    #[test]
    fn rejects_zero_components() {
        let p = Dist::uniform(space(&[2, 2]));
        assert!(matches!(
            project_mixture_em(&p, 0, &EmConfig::default()),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn divergence_is_monotone_within_a_run() {
        let p = Dist::new(
            space(&[2, 2, 2]),
            vec![0.25, 0.05, 0.1, 0.1, 0.05, 0.15, 0.1, 0.2],
        )
        .unwrap();
        let cfg = EmConfig::default();
        for restart in 0..5u64 {
            let run = em_run(&p, 2, &cfg, derive_seed(cfg.seed, restart));
            for pair in run.trace.windows(2) {
                assert!(
                    pair[1] <= pair[0] + 1e-12,
                    "EM step increased divergence: {} -> {}",
                    pair[0],
                    pair[1]
                );
            }
        }
    }
}
