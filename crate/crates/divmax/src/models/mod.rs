//! Statistical models and their rI-projections: given a target p, each model
//! M computes arg min_{q in M} D(p || q). Independence, partition, MPD, and
//! multinomial projections are closed-form; mixture, RBM, and DBN use
//! iterative local minimization and report the best local optimum found.

mod dbn;
mod independence;
mod mixture;
mod mpd;
mod multinomial;
mod optim;
mod partition;
mod rbm;
mod submodel;
mod union;

pub use dbn::{dbn_visible, project_dbn, DbnModel, DbnParams, DirectedLayer};
pub use independence::{project_independence, IndependenceModel};
pub use mixture::{em_trace, project_mixture_em, EmConfig, MixtureModel};
pub use mpd::{project_mpd, MpdModel};
pub use multinomial::{multinomial_dist, project_multinomial, CountSpace, MultinomialModel};
pub use optim::GradConfig;
pub use partition::{project_partition, PartitionModel};
pub use rbm::{project_rbm, rbm_kl, rbm_kl_grad, rbm_visible, RbmModel, RbmParams};
pub use submodel::{check_projection_in_submodel, SubmodelReport};
pub use union::{
    divergence_from_umpd, divergence_from_union_partitions, UmpdModel, UnionPartitionsModel,
};

use serde::{Deserialize, Serialize};

use crate::dist::{Dist, ExtReal};
use crate::error::Result;
use crate::space::StateSpace;

/// Outcome of an rI-projection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProjResult {
    pub q_star: Dist,
    pub divergence: ExtReal,
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
}

impl ProjResult {
    /// A closed-form projection: exact, no iteration.
    pub(crate) fn closed_form(q_star: Dist, divergence: f64) -> Self {
        ProjResult {
            q_star,
            divergence: ExtReal::finite(divergence),
            iterations: 0,
            converged: true,
            restarts: 0,
        }
    }
}

/// A statistical model over a fixed state space. `divergence` must agree
/// with `project` but may skip materializing the projection.
pub trait Model {
    fn space(&self) -> &StateSpace;
    fn project(&self, p: &Dist) -> Result<ProjResult>;
    fn divergence(&self, p: &Dist) -> Result<f64> {
        Ok(self.project(p)?.divergence.value())
    }
    /// True when projections are iterative (local optima, seeded restarts).
    fn iterative(&self) -> bool {
        false
    }
    fn name(&self) -> &'static str;
}

/// Stable per-restart seed derivation (splitmix64 step).
pub(crate) fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9e3779b97f4a7c15)
        .wrapping_add(index.wrapping_mul(0xbf58476d1ce4e5b9));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
