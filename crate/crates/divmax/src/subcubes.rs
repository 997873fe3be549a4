//! Enumeration of the partitions of the binary cube {0,1}^n into a given
//! number of subcubes. The enumeration always covers the smallest uncovered
//! vertex next, so blocks come out ordered by their smallest state index and
//! no partition is produced twice.

use crate::error::{Error, Result};
use crate::partition::{is_cubical, CubicalPartition};
use crate::space::StateSpace;

/// Limits for the subcube enumeration.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationConfig {
    /// Largest number of binary axes accepted.
    pub max_n: usize,
    /// Largest block count accepted.
    pub max_blocks: usize,
    /// Sort the result lexicographically by block signature.
    pub canonical_order: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            max_n: 4,
            max_blocks: 16,
            canonical_order: true,
        }
    }
}

/// All partitions of {0,1}^n into exactly `k` subcubes, canonically ordered:
/// blocks by smallest contained state index, partitions lexicographically by
/// their block signature.
pub fn enumerate_subcube_partitions(n: usize, k: usize) -> Result<Vec<CubicalPartition>> {
    enumerate_subcube_partitions_with(EnumerationConfig::default(), n, k)
}

pub fn enumerate_subcube_partitions_with(
    cfg: EnumerationConfig,
    n: usize,
    k: usize,
) -> Result<Vec<CubicalPartition>> {
    if n == 0 {
        return Err(Error::BadCards);
    }
    if n > cfg.max_n {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: cfg.max_n,
        });
    }
    if k > cfg.max_blocks {
        return Err(Error::KOutOfRange {
            k,
            condition: format!("k <= {}", cfg.max_blocks),
        });
    }
    let space = StateSpace::binary(n)?;
    let full: u32 = if space.total() == 32 {
        u32::MAX
    } else {
        (1u32 << space.total()) - 1
    };
    let mut masks = Vec::with_capacity(k);
    let mut found: Vec<Vec<u32>> = Vec::new();
    cover(n, full, k, &mut masks, &mut found);

    let mut keyed: Vec<(Vec<Vec<usize>>, CubicalPartition)> = found
        .into_iter()
        .map(|blocks| {
            let signature: Vec<Vec<usize>> = blocks.iter().map(|&m| mask_states(m)).collect();
            let sets = signature
                .iter()
                .map(|states| is_cubical(&space, states).expect("blocks are subcubes"))
                .collect();
            let partition =
                CubicalPartition::new(space.clone(), sets).expect("disjoint cover by construction");
            (signature, partition)
        })
        .collect();
    if cfg.canonical_order {
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
    }
    Ok(keyed.into_iter().map(|(_, p)| p).collect())
}

fn mask_states(mask: u32) -> Vec<usize> {
    (0..32).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Extend the partial partition `masks` to cover `uncovered` with exactly
/// `left` more subcubes, always handling the smallest uncovered vertex.
fn cover(n: usize, uncovered: u32, left: usize, masks: &mut Vec<u32>, found: &mut Vec<Vec<u32>>) {
    if uncovered == 0 {
        if left == 0 {
            found.push(masks.clone());
        }
        return;
    }
    if left == 0 || (uncovered.count_ones() as usize) < left {
        return;
    }
    let v = uncovered.trailing_zeros() as usize;
    // every choice of free axes gives one subcube through v
    for fmask in 0..(1u32 << n) {
        let cube = subcube_mask(n, v, fmask);
        if cube & uncovered == cube {
            masks.push(cube);
            cover(n, uncovered & !cube, left - 1, masks, found);
            masks.pop();
        }
    }
}

/// Bitmask of the subcube through vertex `v` whose free axes are the set
/// bits of `fmask` (axis i <-> state-index bit n-1-i).
fn subcube_mask(n: usize, v: usize, fmask: u32) -> u32 {
    let bits: Vec<usize> = (0..n).filter(|&axis| fmask >> axis & 1 == 1).collect();
    let base = v & !bits.iter().fold(0usize, |m, &axis| m | 1 << (n - 1 - axis));
    let mut mask = 0u32;
    for combo in 0..(1usize << bits.len()) {
        let mut state = base;
        for (j, &axis) in bits.iter().enumerate() {
            if combo >> j & 1 == 1 {
                state |= 1 << (n - 1 - axis);
            }
        }
        mask |= 1 << state;
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_partition_counts() {
        let counts: Vec<usize> = (1..=4)
            .map(|k| enumerate_subcube_partitions(2, k).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 2, 4, 1]);
    }

    #[test]
    fn square_into_two_edges() {
        let parts = enumerate_subcube_partitions(2, 2).unwrap();
        let signatures: Vec<Vec<Vec<usize>>> = parts
            .iter()
            .map(|p| p.to_partition().blocks().to_vec())
            .collect();
        assert_eq!(
            signatures,
            vec![
                vec![vec![0, 1], vec![2, 3]], // first axis splits
                vec![vec![0, 2], vec![1, 3]], // second axis splits
            ]
        );
    }

    #[test]
    fn blocks_are_disjoint_cubical_covers() {
        for k in 1..=8 {
            for rho in enumerate_subcube_partitions(3, k).unwrap() {
                let flat = rho.to_partition();
                assert_eq!(flat.len(), k);
                for block in flat.blocks() {
                    assert!(is_cubical(rho.space(), block).is_some());
                }
            }
        }
    }

    #[test]
    fn canonical_order_is_sorted_and_duplicate_free() {
        let parts = enumerate_subcube_partitions(3, 3).unwrap();
        let sigs: Vec<Vec<Vec<usize>>> = parts
            .iter()
            .map(|p| p.to_partition().blocks().to_vec())
            .collect();
        let mut sorted = sigs.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sigs, sorted);
    }

    #[test]
    fn extreme_block_counts() {
        assert_eq!(enumerate_subcube_partitions(3, 1).unwrap().len(), 1);
        assert_eq!(enumerate_subcube_partitions(3, 8).unwrap().len(), 1);
        assert_eq!(enumerate_subcube_partitions(3, 2).unwrap().len(), 3);
        assert!(enumerate_subcube_partitions(2, 5).unwrap().is_empty());
        assert!(enumerate_subcube_partitions(2, 0).unwrap().is_empty());
    }

    #[test]
    fn limits_are_enforced() {
        assert!(matches!(
            enumerate_subcube_partitions(5, 2),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            enumerate_subcube_partitions(2, 17),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(enumerate_subcube_partitions(0, 1).is_err());
    }
}
