//! Partition models: distributions whose conditional on every block of a
//! fixed partition is uniform. The projection spreads each block's mass
//! uniformly over the block.

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::{Model, ProjResult};
use crate::partition::Partition;
use crate::space::StateSpace;

#[derive(Debug, Clone)]
pub struct PartitionModel {
    rho: Partition,
}

impl PartitionModel {
    pub fn new(rho: Partition) -> Self {
        PartitionModel { rho }
    }

    pub fn partition(&self) -> &Partition {
        &self.rho
    }
}

impl Model for PartitionModel {
    fn space(&self) -> &StateSpace {
        self.rho.space()
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        project_partition(p, &self.rho)
    }

    fn divergence(&self, p: &Dist) -> Result<f64> {
        if p.space() != self.rho.space() {
            return Err(Error::SpaceMismatch);
        }
        // sum_x p(x) ln(p(x) |A_i| / m_i), grouped per block so the
        // singleton case cancels exactly; 0 ln 0 = 0.
        let mut d = 0.0;
        for block in self.rho.blocks() {
            let m: f64 = block.iter().map(|&x| p.prob(x)).sum();
            if m <= 0.0 {
                continue;
            }
            let size = block.len() as f64;
            for &x in block {
                let v = p.prob(x);
                if v > 0.0 {
                    d += v * (v * size / m).ln();
                }
            }
        }
        Ok(d.max(0.0))
    }

    fn name(&self) -> &'static str {
        "partition"
    }
}

/// Project onto the partition model of `rho`: q_star(x) = p(A_i)/|A_i| for
/// x in A_i. The divergence is sum_i p(A_i) (log|A_i| - H(p(.|A_i))).
pub fn project_partition(p: &Dist, rho: &Partition) -> Result<ProjResult> {
    if p.space() != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    let mut probs = vec![0.0; p.probs().len()];
    for block in rho.blocks() {
        let m: f64 = block.iter().map(|&x| p.prob(x)).sum();
        if m > 0.0 {
            let share = m / block.len() as f64;
            for &x in block {
                probs[x] = share;
            }
        }
    }
    let q_star = Dist::from_normalized(p.space().clone(), probs);
    let divergence = PartitionModel::new(rho.clone()).divergence(p)?;
    Ok(ProjResult::closed_form(q_star, divergence))
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn space(cards: &[usize]) -> StateSpace {
        StateSpace::new(cards.to_vec()).unwrap()
    }

    #[test]
    fn singleton_partition_is_the_full_simplex() {
        let s = space(&[2, 2]);
        let p = Dist::new(s.clone(), vec![0.5, 0.3, 0.1, 0.1]).unwrap();
        let r = project_partition(&p, &Partition::singletons(s)).unwrap();
        assert!(r.divergence.value() < 1e-12);
        assert!(p.linf(&r.q_star).unwrap() < 1e-12);
    }

    #[test]
    fn two_block_example_achieves_log_coarseness() {
        let s = space(&[2, 2]);
        let rho = Partition::new(s.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let p = Dist::new(s, vec![0.6, 0.0, 0.4, 0.0]).unwrap();
        let r = project_partition(&p, &rho).unwrap();
        assert_eq!(r.q_star.probs(), &[0.3, 0.3, 0.2, 0.2]);
        assert!((r.divergence.value() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn single_block_gives_log_n_minus_entropy() {
        let s = space(&[2, 2]);
        let p = Dist::new(s.clone(), vec![0.5, 0.25, 0.25, 0.0]).unwrap();
        let r = project_partition(&p, &Partition::single_block(s)).unwrap();
        let expect = 4f64.ln() - p.entropy();
        assert!((r.divergence.value() - expect).abs() < 1e-12);
        for &q in r.q_star.probs() {
            assert!((q - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_matches_direct_kl() {
        let s = space(&[2, 3]);
        let rho = Partition::new(s.clone(), vec![vec![0, 4], vec![1, 2], vec![3, 5]]).unwrap();
        let p = Dist::new(s, vec![0.25, 0.05, 0.2, 0.1, 0.15, 0.25]).unwrap();
        let r = project_partition(&p, &rho).unwrap();
        let direct = p.kl(&r.q_star).unwrap().value();
        assert!((r.divergence.value() - direct).abs() < 1e-12);
    }

    #[test]
    fn zero_mass_blocks_get_zero_mass() {
        let s = space(&[2, 2]);
        let rho = Partition::new(s.clone(), vec![vec![0, 1], vec![2, 3]]).unwrap();
        let p = Dist::new(s, vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let r = project_partition(&p, &rho).unwrap();
        assert_eq!(r.q_star.probs(), &[0.5, 0.5, 0.0, 0.0]);
        assert!(r.divergence.value() < 1e-12);
    }
}
