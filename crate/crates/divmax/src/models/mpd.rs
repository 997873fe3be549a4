//! MPD models: mixtures of product distributions whose supports are the
//! blocks of a fixed cubical partition. The projection factorizes block by
//! block: keep each block's mass, replace the within-block conditional by
//! the product of its marginals.

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::{Model, ProjResult};
use crate::partition::CubicalPartition;
use crate::space::StateSpace;

/// Per-block layout precomputed for fast repeated evaluation.
#[derive(Debug, Clone)]
struct BlockLayout {
    /// Member state indices, ascending.
    indices: Vec<usize>,
    /// Axis sizes |Y_i| of the block.
    axis_sizes: Vec<usize>,
    /// For each member (outer) and axis (inner): slot of the state's
    /// coordinate within Y_axis. Flattened with stride = arity.
    slots: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct MpdModel {
    rho: CubicalPartition,
    layouts: Vec<BlockLayout>,
    /// Total marginal accumulator length, sum over blocks and axes of |Y_i|.
    scratch_len: usize,
}

impl MpdModel {
    pub fn new(rho: CubicalPartition) -> Self {
        let n = rho.space().arity();
        let mut layouts = Vec::with_capacity(rho.len());
        let mut scratch_len = 0;
        let mut state = vec![0usize; n];
        for set in rho.blocks() {
            let indices = set.state_indices(rho.space());
            let mut slots = Vec::with_capacity(indices.len() * n);
            for &idx in &indices {
                rho.space().state_into(idx, &mut state);
                for (axis, &x) in state.iter().enumerate() {
                    let slot = set.axes()[axis]
                        .binary_search(&x)
                        .expect("member coordinate is in the axis set");
                    slots.push(slot);
                }
            }
            let axis_sizes: Vec<usize> = set.axes().iter().map(Vec::len).collect();
            scratch_len += axis_sizes.iter().sum::<usize>();
            layouts.push(BlockLayout {
                indices,
                axis_sizes,
                slots,
            });
        }
        MpdModel {
            rho,
            layouts,
            scratch_len,
        }
    }

    pub fn partition(&self) -> &CubicalPartition {
        &self.rho
    }

    /// Block masses and within-block axis marginals of p, flattened into
    /// `marg`; returns per-block masses.
    fn accumulate(&self, p: &Dist, marg: &mut [f64]) -> Vec<f64> {
        let n = self.rho.space().arity();
        marg.fill(0.0);
        let mut masses = Vec::with_capacity(self.layouts.len());
        let mut base = 0;
        for layout in &self.layouts {
            let mut m = 0.0;
            for (pos, &idx) in layout.indices.iter().enumerate() {
                let v = p.prob(idx);
                if v > 0.0 {
                    m += v;
                    let mut offset = base;
                    for axis in 0..n {
                        marg[offset + layout.slots[pos * n + axis]] += v;
                        offset += layout.axis_sizes[axis];
                    }
                }
            }
            masses.push(m);
            base += layout.axis_sizes.iter().sum::<usize>();
        }
        masses
    }
}

impl Model for MpdModel {
    fn space(&self) -> &StateSpace {
        self.rho.space()
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        if p.space() != self.rho.space() {
            return Err(Error::SpaceMismatch);
        }
        let n = self.rho.space().arity();
        let mut marg = vec![0.0; self.scratch_len];
        let masses = self.accumulate(p, &mut marg);
        let mut probs = vec![0.0; p.probs().len()];
        let mut base = 0;
        for (layout, &m) in self.layouts.iter().zip(&masses) {
            if m > 0.0 {
                for (pos, &idx) in layout.indices.iter().enumerate() {
                    // q(x) = m * prod_axis (w_axis / m)
                    let mut q = m;
                    let mut offset = base;
                    for axis in 0..n {
                        q *= marg[offset + layout.slots[pos * n + axis]] / m;
                        offset += layout.axis_sizes[axis];
                    }
                    probs[idx] = q;
                }
            }
            base += layout.axis_sizes.iter().sum::<usize>();
        }
        // within-block products can drift a hair from the block mass
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            for v in &mut probs {
                *v /= total;
            }
        }
        let q_star = Dist::from_normalized(p.space().clone(), probs);
        let divergence = self.divergence(p)?;
        Ok(ProjResult::closed_form(q_star, divergence))
    }

    fn divergence(&self, p: &Dist) -> Result<f64> {
        if p.space() != self.rho.space() {
            return Err(Error::SpaceMismatch);
        }
        let n = self.rho.space().arity();
        let mut marg = vec![0.0; self.scratch_len];
        let masses = self.accumulate(p, &mut marg);
        // per block: sum_x p ln p + (n-1) m ln m - sum_axis sum_slot w ln w
        let mut d = 0.0;
        for (layout, &m) in self.layouts.iter().zip(&masses) {
            if m <= 0.0 {
                continue;
            }
            for &idx in &layout.indices {
                let v = p.prob(idx);
                if v > 0.0 {
                    d += v * v.ln();
                }
            }
            d += (n as f64 - 1.0) * m * m.ln();
        }
        for &w in marg.iter() {
            if w > 0.0 {
                d -= w * w.ln();
            }
        }
        Ok(d.max(0.0))
    }

    fn name(&self) -> &'static str {
        "mpd"
    }
}

/// Project onto the MPD model of a cubical partition: blockwise product of
/// within-block marginals, weighted by block mass. The divergence is
/// sum_i p(A_i) * multi_information(p(.|A_i)).
pub fn project_mpd(p: &Dist, rho: &CubicalPartition) -> Result<ProjResult> {
    MpdModel::new(rho.clone()).project(p)
}
