//! Binary restricted Boltzmann machines: n visible and m hidden units with
//! full bipartite coupling. The hidden sum has the closed softplus form
//! ln q~(v) = b.v + sum_j softplus(c_j + v.W_j), so the visible distribution
//! and the exact divergence gradient never enumerate hidden states.

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::optim::{descend, GradConfig};
use crate::models::{Model, ProjResult};
use crate::space::StateSpace;

/// Hard cap on n+m for exact visible-side enumeration.
pub(crate) const UNIT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbmParams {
    /// n x m coupling matrix, row i = weights of visible unit i.
    pub w: Vec<Vec<f64>>,
    /// Visible biases, length n.
    pub b: Vec<f64>,
    /// Hidden biases, length m.
    pub c: Vec<f64>,
}

impl RbmParams {
    pub fn new(w: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let params = RbmParams { w, b, c };
        params.validate()?;
        Ok(params)
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        RbmParams {
            w: vec![vec![0.0; m]; n],
            b: vec![0.0; n],
            c: vec![0.0; m],
        }
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn m(&self) -> usize {
        self.c.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.b.is_empty() || self.w.len() != self.b.len() {
            return Err(Error::BadParamShape(format!(
                "W has {} rows for {} visible biases",
                self.w.len(),
                self.b.len()
            )));
        }
        for row in &self.w {
            if row.len() != self.c.len() {
                return Err(Error::BadParamShape(format!(
                    "W row has {} entries for {} hidden biases",
                    row.len(),
                    self.c.len()
                )));
            }
        }
        let finite = self.b.iter().chain(&self.c).all(|v| v.is_finite())
            && self.w.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::BadParamShape("non-finite parameter".into()));
        }
        Ok(())
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Unnormalized log visible weights ln q~(v) for every v, plus the log
/// partition function.
fn log_weights(params: &RbmParams, space: &StateSpace) -> (Vec<f64>, f64) {
    let n = params.n();
    let m = params.m();
    let mut lw = Vec::with_capacity(space.total());
    let mut state = vec![0usize; n];
    for v in 0..space.total() {
        space.state_into(v, &mut state);
        let mut val = 0.0;
        for (i, &vi) in state.iter().enumerate() {
            if vi == 1 {
                val += params.b[i];
            }
        }
        for j in 0..m {
            let mut act = params.c[j];
            for (i, &vi) in state.iter().enumerate() {
                if vi == 1 {
                    act += params.w[i][j];
                }
            }
            val += softplus(act);
        }
        lw.push(val);
    }
    let max = lw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ln_z = max + lw.iter().map(|&v| (v - max).exp()).sum::<f64>().ln();
    (lw, ln_z)
}

/// Exact visible marginal of the RBM, by enumerating the visible states.
pub fn rbm_visible(params: &RbmParams) -> Result<Dist> {
    params.validate()?;
    let units = params.n() + params.m();
    if units > UNIT_LIMIT {
        return Err(Error::TooManyUnits {
            units,
            limit: UNIT_LIMIT,
        });
    }
    let space = StateSpace::binary(params.n())?;
    let (lw, ln_z) = log_weights(params, &space);
    let probs: Vec<f64> = lw.iter().map(|&v| (v - ln_z).exp()).collect();
    let total: f64 = probs.iter().sum();
    Ok(Dist::from_normalized(
        space,
        probs.into_iter().map(|v| v / total).collect(),
    ))
}

/// Parameter vector layout: W row-major, then b, then c.
fn unflatten(theta: &[f64], n: usize, m: usize) -> RbmParams {
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        w.push(theta[i * m..(i + 1) * m].to_vec());
    }
    RbmParams {
        w,
        b: theta[n * m..n * m + n].to_vec(),
        c: theta[n * m + n..].to_vec(),
    }
}

/// D(p || q_theta) for the visible distribution of the RBM.
pub fn rbm_kl(p: &Dist, params: &RbmParams) -> f64 {
    let (lw, ln_z) = log_weights(params, p.space());
    let mut d = 0.0;
    for (v, &mass) in p.probs().iter().enumerate() {
        if mass > 0.0 {
            d += mass * (mass.ln() - (lw[v] - ln_z));
        }
    }
    d.max(0.0)
}

/// Exact gradient of theta -> D(p || q_theta): E_q[s] - E_p[s] with
/// sufficient statistics s = (v_i hbar_j, v_i, hbar_j), where
/// hbar_j(v) = sigma(c_j + v.W_j).
pub fn rbm_kl_grad(p: &Dist, params: &RbmParams) -> Vec<f64> {
    let n = params.n();
    let m = params.m();
    let space = p.space();
    let (lw, ln_z) = log_weights(params, space);
    let mut grad = vec![0.0; n * m + n + m];
    let mut state = vec![0usize; n];
    let mut hbar = vec![0.0; m];
    for v in 0..space.total() {
        space.state_into(v, &mut state);
        let weight = (lw[v] - ln_z).exp() - p.prob(v);
        if weight == 0.0 {
            continue;
        }
        for j in 0..m {
            let mut act = params.c[j];
            for (i, &vi) in state.iter().enumerate() {
                if vi == 1 {
                    act += params.w[i][j];
                }
            }
            hbar[j] = sigmoid(act);
        }
        for (i, &vi) in state.iter().enumerate() {
            if vi == 1 {
                for j in 0..m {
                    grad[i * m + j] += weight * hbar[j];
                }
                grad[n * m + i] += weight;
            }
        }
        for j in 0..m {
            grad[n * m + n + j] += weight * hbar[j];
        }
    }
    grad
}

/// Fit an RBM with m hidden units to p by gradient descent on the exact
/// divergence; best of `cfg.restarts` seeded starts.
pub fn project_rbm(p: &Dist, m: usize, cfg: &GradConfig) -> Result<ProjResult> {
    if !p.space().is_binary() {
        return Err(Error::Unsupported(
            "RBM projection requires binary units".into(),
        ));
    }
    let n = p.space().arity();
    if n + m > UNIT_LIMIT {
        return Err(Error::TooManyUnits {
            units: n + m,
            limit: UNIT_LIMIT,
        });
    }
    let dim = n * m + n + m;
    let outcome = descend(
        dim,
        cfg,
        &mut |theta| rbm_kl(p, &unflatten(theta, n, m)),
        &mut |theta| rbm_kl_grad(p, &unflatten(theta, n, m)),
    );
    let params = unflatten(&outcome.theta, n, m);
    let q_star = rbm_visible(&params)?;
    let divergence = p.kl(&q_star)?;
    Ok(ProjResult {
        q_star,
        divergence,
        iterations: outcome.iterations,
        converged: outcome.converged,
        restarts: cfg.restarts.max(1),
    })
}

#[derive(Debug, Clone)]
pub struct RbmModel {
    space: StateSpace,
    m: usize,
    cfg: GradConfig,
}

impl RbmModel {
    pub fn new(space: StateSpace, m: usize, cfg: GradConfig) -> Result<Self> {
        if !space.is_binary() {
            return Err(Error::Unsupported(
                "RBM projection requires binary units".into(),
            ));
        }
        Ok(RbmModel { space, m, cfg })
    }

    pub fn hidden_units(&self) -> usize {
        self.m
    }
}

impl Model for RbmModel {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        project_rbm(p, self.m, &self.cfg)
    }

    fn iterative(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "rbm"
    }
}
