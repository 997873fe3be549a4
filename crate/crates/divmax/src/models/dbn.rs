//! Binary deep belief networks: an RBM over the two deepest layers and
//! directed sigmoid layers downward. The visible marginal is computed
//! exactly layer by layer; projection uses finite-difference gradients.

use serde::{Deserialize, Serialize};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::optim::{descend, finite_difference_grad, GradConfig};
use crate::models::rbm::{rbm_visible, RbmParams, UNIT_LIMIT};
use crate::models::{Model, ProjResult};
use crate::space::StateSpace;

/// One directed layer: p(child | parent) is a product of independent binary
/// units with success probabilities sigma(W parent + b).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectedLayer {
    /// child_width x parent_width weights.
    pub w: Vec<Vec<f64>>,
    /// child_width biases.
    pub b: Vec<f64>,
}

/// Layer widths (visible first), the top RBM over the two deepest layers,
/// and one directed layer per remaining adjacent pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnParams {
    pub widths: Vec<usize>,
    pub top: RbmParams,
    /// directed[l] maps layer l+1 down to layer l, for l < L-2.
    pub directed: Vec<DirectedLayer>,
}

impl DbnParams {
    pub fn zeros(widths: Vec<usize>) -> Result<Self> {
        let l = widths.len();
        if l < 2 {
            return Err(Error::BadParamShape(
                "a DBN needs at least two layers".into(),
            ));
        }
        let params = DbnParams {
            top: RbmParams::zeros(widths[l - 2], widths[l - 1]),
            directed: widths
                .windows(2)
                .take(l - 2)
                .map(|pair| DirectedLayer {
                    w: vec![vec![0.0; pair[1]]; pair[0]],
                    b: vec![0.0; pair[0]],
                })
                .collect(),
            widths,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.widths.len();
        if l < 2 {
            return Err(Error::BadParamShape(
                "a DBN needs at least two layers".into(),
            ));
        }
        if self.widths.iter().any(|&w| w == 0) {
            return Err(Error::BadParamShape("zero-width layer".into()));
        }
        let units: usize = self.widths.iter().sum();
        if units > UNIT_LIMIT {
            return Err(Error::TooManyUnits {
                units,
                limit: UNIT_LIMIT,
            });
        }
        self.top.validate()?;
        if self.top.n() != self.widths[l - 2] || self.top.m() != self.widths[l - 1] {
            return Err(Error::BadParamShape(format!(
                "top RBM is {}x{}, widths end in {}x{}",
                self.top.n(),
                self.top.m(),
                self.widths[l - 2],
                self.widths[l - 1]
            )));
        }
        if self.directed.len() != l - 2 {
            return Err(Error::BadParamShape(format!(
                "{} directed layers for {} total layers",
                self.directed.len(),
                l
            )));
        }
        for (i, layer) in self.directed.iter().enumerate() {
            let child = self.widths[i];
            let parent = self.widths[i + 1];
            if layer.b.len() != child
                || layer.w.len() != child
                || layer.w.iter().any(|row| row.len() != parent)
            {
                return Err(Error::BadParamShape(format!(
                    "directed layer {i} is not {child}x{parent}"
                )));
            }
            let finite = layer.b.iter().all(|v| v.is_finite())
                && layer.w.iter().flatten().all(|v| v.is_finite());
            if !finite {
                return Err(Error::BadParamShape("non-finite parameter".into()));
            }
        }
        Ok(())
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

/// Exact visible marginal: marginalize the top RBM onto the second-deepest
/// layer, then push down through each directed layer.
pub fn dbn_visible(params: &DbnParams) -> Result<Dist> {
    params.validate()?;
    let mut cur = rbm_visible(&params.top)?;
    for layer in params.directed.iter().rev() {
        cur = push_down(&cur, layer)?;
    }
    Ok(cur)
}

/// Marginal of the child layer given the parent layer's distribution.
fn push_down(parent: &Dist, layer: &DirectedLayer) -> Result<Dist> {
    let child_n = layer.b.len();
    let parent_n = parent.space().arity();
    let child_space = StateSpace::binary(child_n)?;
    let mut probs = vec![0.0; child_space.total()];
    let mut parent_state = vec![0usize; parent_n];
    let mut on = vec![0.0; child_n]; // per-unit success probability
    let mut child_state = vec![0usize; child_n];
    for y in 0..parent.space().total() {
        let mass = parent.prob(y);
        if mass == 0.0 {
            continue;
        }
        parent.space().state_into(y, &mut parent_state);
        for i in 0..child_n {
            let mut act = layer.b[i];
            for (j, &pj) in parent_state.iter().enumerate() {
                if pj == 1 {
                    act += layer.w[i][j];
                }
            }
            on[i] = sigmoid(act);
        }
        for (x, slot) in probs.iter_mut().enumerate() {
            child_space.state_into(x, &mut child_state);
            let mut q = mass;
            for (i, &xi) in child_state.iter().enumerate() {
                q *= if xi == 1 { on[i] } else { 1.0 - on[i] };
            }
            *slot += q;
        }
    }
    let total: f64 = probs.iter().sum();
    Ok(Dist::from_normalized(
        child_space,
        probs.into_iter().map(|v| v / total).collect(),
    ))
}

/// Parameter vector layout: top W, top b, top c, then per directed layer
/// (W row-major, b), outermost layer first.
fn unflatten(theta: &[f64], widths: &[usize]) -> DbnParams {
    let l = widths.len();
    let n = widths[l - 2];
    let m = widths[l - 1];
    let mut at = 0;
    let mut take = |count: usize| {
        let slice = &theta[at..at + count];
        at += count;
        slice.to_vec()
    };
    let mut w = Vec::with_capacity(n);
    for _ in 0..n {
        w.push(take(m));
    }
    let top = RbmParams {
        w,
        b: take(n),
        c: take(m),
    };
    let mut directed = Vec::with_capacity(l - 2);
    for i in 0..l - 2 {
        let child = widths[i];
        let parent = widths[i + 1];
        let mut w = Vec::with_capacity(child);
        for _ in 0..child {
            w.push(take(parent));
        }
        directed.push(DirectedLayer { w, b: take(child) });
    }
    DbnParams {
        widths: widths.to_vec(),
        top,
        directed,
    }
}

fn param_dim(widths: &[usize]) -> usize {
    let l = widths.len();
    let mut dim = widths[l - 2] * widths[l - 1] + widths[l - 2] + widths[l - 1];
    for i in 0..l - 2 {
        dim += widths[i] * widths[i + 1] + widths[i];
    }
    dim
}

/// Fit a DBN with the given layer widths to p; gradients by central finite
/// differences, best of `cfg.restarts` seeded starts.
pub fn project_dbn(p: &Dist, widths: &[usize], cfg: &GradConfig) -> Result<ProjResult> {
    if !p.space().is_binary() {
        return Err(Error::Unsupported(
            "DBN projection requires binary units".into(),
        ));
    }
    if widths.len() < 2 {
        return Err(Error::BadParamShape(
            "a DBN needs at least two layers".into(),
        ));
    }
    if widths[0] != p.space().arity() {
        return Err(Error::ArityMismatch {
            got: widths[0],
            want: p.space().arity(),
        });
    }
    // reject invalid width lists (zero widths, too many units) up front
    DbnParams::zeros(widths.to_vec())?.validate()?;

    let kl = |params: &DbnParams| -> f64 {
        let q = dbn_visible(params).expect("validated widths");
        p.kl(&q).expect("same space").value()
    };
    let mut value = |theta: &[f64]| kl(&unflatten(theta, widths));
    let mut grad =
        |theta: &[f64]| finite_difference_grad(theta, 1e-5, &mut |t| kl(&unflatten(t, widths)));
    let outcome = descend(param_dim(widths), cfg, &mut value, &mut grad);
    let params = unflatten(&outcome.theta, widths);
    let q_star = dbn_visible(&params)?;
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
pub struct DbnModel {
    space: StateSpace,
    widths: Vec<usize>,
    cfg: GradConfig,
}

impl DbnModel {
    pub fn new(widths: Vec<usize>, cfg: GradConfig) -> Result<Self> {
        DbnParams::zeros(widths.clone())?.validate()?;
        let space = StateSpace::binary(widths[0])?;
        Ok(DbnModel { space, widths, cfg })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }
}

impl Model for DbnModel {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        project_dbn(p, &self.widths, &self.cfg)
    }

    fn iterative(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "dbn"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_dbn(widths: Vec<usize>, seed: u64) -> DbnParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = DbnParams::zeros(widths).unwrap();
        for v in params
            .top
            .w
            .iter_mut()
            .flatten()
            .chain(params.top.b.iter_mut())
            .chain(params.top.c.iter_mut())
        {
            *v = rng.gen_range(-1.0..1.0);
        }
        for layer in &mut params.directed {
            for v in layer.w.iter_mut().flatten().chain(layer.b.iter_mut()) {
                *v = rng.gen_range(-1.0..1.0);
            }
        }
        params
    }

    #[test]
    fn two_layer_dbn_is_the_top_rbm() {
        let params = random_dbn(vec![3, 2], 5);
        let via_dbn = dbn_visible(&params).unwrap();
        let via_rbm = rbm_visible(&params.top).unwrap();
        assert!(via_dbn.linf(&via_rbm).unwrap() < 1e-14);
    }

    #[test]
    fn visible_matches_full_joint_enumeration() {
        let params = random_dbn(vec![2, 2, 2], 9);
        let q = dbn_visible(&params).unwrap();

        // oracle: enumerate the full joint over all three layers
        let sig = |x: f64| 1.0 / (1.0 + (-x).exp());
        let mut probs = vec![0.0; 4];
        let mut z_top = 0.0;
        let mut top = vec![0.0; 16];
        for h1 in 0..4usize {
            for h2 in 0..4usize {
                let bit = |s: usize, i: usize| (s >> (1 - i)) & 1;
                let mut e = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        e += params.top.w[i][j] * (bit(h1, i) * bit(h2, j)) as f64;
                    }
                    e += params.top.b[i] * bit(h1, i) as f64;
                    e += params.top.c[i] * bit(h2, i) as f64;
                }
                top[h1 * 4 + h2] = e.exp();
                z_top += e.exp();
            }
        }
        for v in 0..4usize {
            for h1 in 0..4usize {
                let bit = |s: usize, i: usize| (s >> (1 - i)) & 1;
                let mut cond = 1.0;
                for i in 0..2 {
                    let mut act = params.directed[0].b[i];
                    for j in 0..2 {
                        act += params.directed[0].w[i][j] * bit(h1, j) as f64;
                    }
                    let on = sig(act);
                    cond *= if bit(v, i) == 1 { on } else { 1.0 - on };
                }
                let h1_mass: f64 = (0..4).map(|h2| top[h1 * 4 + h2]).sum::<f64>() / z_top;
                probs[v] += cond * h1_mass;
            }
        }
        for (a, b) in q.probs().iter().zip(&probs) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn visible_is_a_valid_distribution() {
        for seed in 0..5 {
            let params = random_dbn(vec![3, 2, 1], seed);
            let q = dbn_visible(&params).unwrap();
            assert!(q.probs().iter().all(|&v| v >= 0.0));
            assert!((q.probs().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn shape_validation_rejects_bad_params() {
        assert!(DbnParams::zeros(vec![3]).is_err());
        assert!(DbnParams::zeros(vec![3, 0]).is_err());
        assert!(DbnParams::zeros(vec![12, 5, 4]).is_err());
        let mut params = DbnParams::zeros(vec![2, 2, 2]).unwrap();
        params.directed.pop();
        assert!(params.validate().is_err());
    }

    #[test]
    fn projection_requires_matching_visible_width() {
        let p = Dist::uniform(StateSpace::binary(3).unwrap());
        assert!(matches!(
            project_dbn(&p, &[2, 2], &GradConfig::default()),
            Err(Error::ArityMismatch { .. })
        ));
    }
}
