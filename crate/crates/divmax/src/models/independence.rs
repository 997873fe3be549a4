//! The independence model: product distributions over the state space.
//! The rI-projection of p is the product of its marginals, and the
//! divergence from the model is the multi-information of p.

use crate::dist::Dist;
use crate::error::Result;
use crate::models::{Model, ProjResult};
use crate::space::StateSpace;

#[derive(Debug, Clone)]
pub struct IndependenceModel {
    space: StateSpace,
}

impl IndependenceModel {
    pub fn new(space: StateSpace) -> Self {
        IndependenceModel { space }
    }
}

impl Model for IndependenceModel {
    fn space(&self) -> &StateSpace {
        &self.space
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        project_independence(p)
    }

    fn divergence(&self, p: &Dist) -> Result<f64> {
        Ok(p.multi_information())
    }

    fn name(&self) -> &'static str {
        "independence"
    }
}

/// Project onto the independence model: q_star is the product of the
/// marginals of p (moment matching), and the divergence is the
/// multi-information of p.
pub fn project_independence(p: &Dist) -> Result<ProjResult> {
    let margs = p.axis_marginals();
    let space = p.space().clone();
    let mut probs = vec![0.0; space.total()];
    let mut state = vec![0usize; space.arity()];
    for (idx, slot) in probs.iter_mut().enumerate() {
        space.state_into(idx, &mut state);
        *slot = state
            .iter()
            .zip(&margs)
            .map(|(&x, marg)| marg[x])
            .product();
    }
    let q_star = Dist::from_normalized(space, probs);
    Ok(ProjResult::closed_form(q_star, p.multi_information()))
}
