//! Union models over all cubical partitions of the binary cube with a fixed
//! block count: UMPD (union of mixtures of products with disjoint cubical
//! supports) and the union of the corresponding partition models. The
//! divergence is the minimum over the enumerated partitions; ties go to the
//! first partition in canonical enumeration order.

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::mpd::MpdModel;
use crate::models::partition::PartitionModel;
use crate::models::{Model, ProjResult};
use crate::partition::CubicalPartition;
use crate::space::StateSpace;
use crate::subcubes::enumerate_subcube_partitions;

fn enumerate_models<M>(
    n: usize,
    k: usize,
    build: impl Fn(CubicalPartition) -> M,
) -> Result<(StateSpace, Vec<(M, CubicalPartition)>)> {
    let space = StateSpace::binary(n)?;
    if k < 1 || k > space.total() {
        return Err(Error::KOutOfRange {
            k,
            condition: format!("1 <= k <= {}", space.total()),
        });
    }
    let partitions = enumerate_subcube_partitions(n, k)?;
    let models = partitions
        .into_iter()
        .map(|rho| (build(rho.clone()), rho))
        .collect();
    Ok((space, models))
}

fn require_binary(p: &Dist) -> Result<usize> {
    if !p.space().is_binary() {
        return Err(Error::Unsupported(
            "union models are enumerated for binary spaces only".into(),
        ));
    }
    Ok(p.space().arity())
}

macro_rules! union_model {
    ($name:ident, $inner:ty, $build:expr, $label:literal) => {
        #[derive(Debug, Clone)]
        pub struct $name {
            space: StateSpace,
            k: usize,
            members: Vec<($inner, CubicalPartition)>,
        }

        impl $name {
            pub fn new(n: usize, k: usize) -> Result<Self> {
                let (space, members) = enumerate_models(n, k, $build)?;
                Ok($name { space, k, members })
            }

            pub fn k(&self) -> usize {
                self.k
            }

            /// Projection together with the partition achieving the minimum.
            pub fn project_with_witness(&self, p: &Dist) -> Result<(ProjResult, CubicalPartition)> {
                let mut best: Option<(f64, usize)> = None;
                for (i, (model, _)) in self.members.iter().enumerate() {
                    let d = model.divergence(p)?;
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, i));
                    }
                }
                let (_, i) = best.expect("every valid k has at least one partition");
                let (model, rho) = &self.members[i];
                Ok((model.project(p)?, rho.clone()))
            }
        }

        impl Model for $name {
            fn space(&self) -> &StateSpace {
                &self.space
            }

            fn project(&self, p: &Dist) -> Result<ProjResult> {
                Ok(self.project_with_witness(p)?.0)
            }

            fn divergence(&self, p: &Dist) -> Result<f64> {
                let mut best = f64::INFINITY;
                for (model, _) in &self.members {
                    let d = model.divergence(p)?;
                    if d < best {
                        best = d;
                    }
                }
                Ok(best)
            }

            fn name(&self) -> &'static str {
                $label
            }
        }
    };
}

union_model!(UmpdModel, MpdModel, MpdModel::new, "umpd");
union_model!(
    UnionPartitionsModel,
    PartitionModel,
    |rho: CubicalPartition| PartitionModel::new(rho.to_partition()),
    "union-partitions"
);

/// Divergence of p from UMPD_{n,k}, with the minimizing cubical partition.
pub fn divergence_from_umpd(p: &Dist, k: usize) -> Result<(ProjResult, CubicalPartition)> {
    let n = require_binary(p)?;
    UmpdModel::new(n, k)?.project_with_witness(p)
}

/// Divergence of p from the union of the partition models of all k-block
/// cubical partitions, with the minimizing partition.
pub fn divergence_from_union_partitions(
    p: &Dist,
    k: usize,
) -> Result<(ProjResult, CubicalPartition)> {
    let n = require_binary(p)?;
    UnionPartitionsModel::new(n, k)?.project_with_witness(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::project_mpd;

    const LN_2: f64 = std::f64::consts::LN_2;

    #[test]
    fn singleton_partition_count_gives_zero_divergence() {
        let p = Dist::new(
            StateSpace::binary(2).unwrap(),
            vec![0.4, 0.3, 0.2, 0.1],
        )
        .unwrap();
        let (r, rho) = divergence_from_umpd(&p, 4).unwrap();
        assert!(r.divergence.value() < 1e-12);
        assert_eq!(rho.len(), 4);
        let (r, _) = divergence_from_union_partitions(&p, 4).unwrap();
        assert!(r.divergence.value() < 1e-12);
    }

    #[test]
    fn two_blocks_on_two_bits_always_fit_exactly() {
        for probs in [
            vec![0.4, 0.3, 0.2, 0.1],
            vec![0.7, 0.0, 0.0, 0.3],
            vec![0.1, 0.2, 0.3, 0.4],
        ] {
            let p = Dist::new(StateSpace::binary(2).unwrap(), probs).unwrap();
            let (r, _) = divergence_from_umpd(&p, 2).unwrap();
            assert!(r.divergence.value() < 1e-12);
        }
    }

    #[test]
    fn three_bit_value_matches_brute_force_minimum() {
        let p = Dist::uniform_on(StateSpace::binary(3).unwrap(), &[0, 3, 5, 6]).unwrap();
        let (r, rho) = divergence_from_umpd(&p, 2).unwrap();
        let mut best = f64::INFINITY;
        let mut first: Option<CubicalPartition> = None;
        for cand in enumerate_subcube_partitions(3, 2).unwrap() {
            let d = project_mpd(&p, &cand).unwrap().divergence.value();
            if d < best {
                best = d;
                first = Some(cand);
            }
        }
        assert!((r.divergence.value() - best).abs() < 1e-12);
        // the even-parity distribution looks the same from every 2-block
        // split, so the tie must resolve to the first canonical partition
        assert_eq!(&rho, first.as_ref().unwrap());
        assert!((best - LN_2).abs() < 1e-12);
    }

    #[test]
    fn union_partition_divergence_can_exceed_umpd() {
        let p = Dist::new(
            StateSpace::binary(2).unwrap(),
            vec![0.6, 0.1, 0.1, 0.2],
        )
        .unwrap();
        let (mpd, _) = divergence_from_umpd(&p, 2).unwrap();
        let (part, _) = divergence_from_union_partitions(&p, 2).unwrap();
        assert!(part.divergence.value() >= mpd.divergence.value());
        assert!(part.divergence.value() > 1e-3);
    }

    #[test]
    fn k_bounds_are_enforced() {
        let p = Dist::uniform(StateSpace::binary(2).unwrap());
        assert!(matches!(
            divergence_from_umpd(&p, 0),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(matches!(
            divergence_from_umpd(&p, 5),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn more_blocks_never_hurt() {
        let p = Dist::new(
            StateSpace::binary(3).unwrap(),
            vec![0.2, 0.05, 0.15, 0.1, 0.1, 0.05, 0.05, 0.3],
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=8 {
            let (r, _) = divergence_from_umpd(&p, k).unwrap();
            assert!(r.divergence.value() <= prev + 1e-12);
            prev = r.divergence.value();
        }
    }
}
