//! Closed-form bounds on the maximal divergence from the model families in
//! this crate, each returned as a report carrying the value in nats, whether
//! it is an upper bound, a lower bound, or exact, and a witness of the
//! structure that attains the minimum inside the formula.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model_spec::ModelSpec;
use crate::partition::CubicalPartition;

/// Most subset minimizations are over axis sets; keep enumeration sane.
const MAX_BOUND_AXES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
    Exact,
}

/// The structure attaining the minimum inside a bound formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "witness")]
pub enum Witness {
    /// Axis subset A in a subset-minimization bound.
    Subset { axes: Vec<usize> },
    /// Layer count m and skip depth s in the layered-network bound.
    LayerSplit { m: usize, s: usize },
    /// Index of the block attaining the maximum.
    Block { index: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub kind: BoundKind,
    pub witness: Option<Witness>,
    pub formula: String,
}

impl BoundReport {
    fn new(value: f64, kind: BoundKind, witness: Option<Witness>, formula: &str) -> Self {
        BoundReport {
            value,
            kind,
            witness,
            formula: formula.to_string(),
        }
    }
}

fn checked_product(cards: &[usize]) -> Result<u128> {
    let mut acc: u128 = 1;
    for &c in cards {
        acc = acc.checked_mul(c as u128).ok_or(Error::BadCards)?;
    }
    Ok(acc)
}

fn validate_cards(cards: &[usize]) -> Result<()> {
    if cards.is_empty() || cards.iter().any(|&c| c == 0) {
        return Err(Error::BadCards);
    }
    Ok(())
}

/// ln(prod(cards) / max(cards)), written so the homogeneous case is the
/// exact product form (n-1) ln q.
fn ln_cards_over_max(cards: &[usize]) -> f64 {
    debug_assert!(!cards.is_empty());
    let q = cards[0];
    if cards.iter().all(|&c| c == q) {
        return (cards.len() as f64 - 1.0) * (q as f64).ln();
    }
    let max = *cards.iter().max().unwrap();
    let prod: u128 = cards.iter().map(|&c| c as u128).product();
    // max divides prod, so the ratio is an exact integer.
    ((prod / max as u128) as f64).ln()
}

/// Upper bound on the divergence from the independence model with the given
/// axis cardinalities.
pub fn bound_independence(cards: &[usize]) -> Result<BoundReport> {
    validate_cards(cards)?;
    checked_product(cards)?;
    Ok(BoundReport::new(
        ln_cards_over_max(cards),
        BoundKind::Upper,
        None,
        "ind-lemma",
    ))
}

/// The maximal divergence from the independence model on n homogeneous
/// axes of cardinality q; here the bound is attained.
pub fn exact_independence(n: usize, q: usize) -> Result<BoundReport> {
    if n == 0 || q == 0 {
        return Err(Error::BadCards);
    }
    Ok(BoundReport::new(
        (n as f64 - 1.0) * (q as f64).ln(),
        BoundKind::Exact,
        None,
        "ind-lemma",
    ))
}

/// Minimize ln(N_A / max_{i in A} N_i) over axis subsets A whose complement
/// satisfies k >= prod_{i not in A} N_i. Returns the best value and subset.
fn min_subset_bound(cards: &[usize], k: u128) -> Result<(f64, Vec<usize>)> {
    let n = cards.len();
    if n > MAX_BOUND_AXES {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: MAX_BOUND_AXES,
        });
    }
    let mut best = f64::INFINITY;
    let mut best_axes = Vec::new();
    let mut sub = Vec::with_capacity(n);
    for mask in 0u64..(1u64 << n) {
        let mut comp: u128 = 1;
        sub.clear();
        for (i, &c) in cards.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sub.push(c);
            } else {
                comp = comp.saturating_mul(c as u128);
            }
        }
        if k < comp {
            continue;
        }
        let value = if sub.is_empty() {
            0.0
        } else {
            ln_cards_over_max(&sub)
        };
        if value < best {
            best = value;
            best_axes = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        }
    }
    debug_assert!(best.is_finite(), "A = [n] is always feasible");
    Ok((best, best_axes))
}

/// (n - floor(log2 k) - k / 2^floor(log2 k)) ln 2, the sharper binary form.
/// `extra` shifts the leading term: 0 for cubical unions, 1 for partitions.
fn binary_union_value(n: usize, k: u64, extra: usize) -> f64 {
    debug_assert!(k >= 1);
    let j = 63 - k.leading_zeros() as usize;
    ((n + extra - j) as f64 - k as f64 / (1u64 << j) as f64) * LN_2
}

/// Upper bound on the divergence from mixtures of k product distributions.
pub fn bound_mixture(cards: &[usize], k: usize) -> Result<BoundReport> {
    validate_cards(cards)?;
    checked_product(cards)?;
    if k < 1 {
        return Err(Error::KOutOfRange {
            k,
            condition: "k >= 1".into(),
        });
    }
    if k == 1 {
        return bound_independence(cards);
    }
    let n = cards.len();
    let (general, axes) = min_subset_bound(cards, k as u128)?;
    let binary_applies = cards.iter().all(|&c| c == 2) && (k as u128) <= (1u128 << (n - 1));
    if binary_applies {
        let refined = binary_union_value(n, k as u64, 0);
        if refined < general {
            return Ok(BoundReport::new(refined, BoundKind::Upper, None, "mix-thm"));
        }
    }
    Ok(BoundReport::new(
        general,
        BoundKind::Upper,
        Some(Witness::Subset { axes }),
        "mix-thm",
    ))
}

/// Upper bound on the divergence from a restricted Boltzmann machine with
/// the given visible cardinalities and hidden unit cardinalities. The
/// machine's visible marginals form a subset of mixtures of
/// k = 1 + sum_j (M_j - 1) product distributions.
pub fn bound_rbm(cards: &[usize], hidden_cards: &[usize]) -> Result<BoundReport> {
    validate_cards(cards)?;
    checked_product(cards)?;
    if hidden_cards.iter().any(|&m| m == 0) {
        return Err(Error::BadCards);
    }
    let k_eff: u128 = 1 + hidden_cards.iter().map(|&m| (m - 1) as u128).sum::<u128>();
    if k_eff == 1 {
        let mut report = bound_independence(cards)?;
        report.formula = "ind-lemma".to_string();
        return Ok(report);
    }
    let n = cards.len();
    let (general, axes) = min_subset_bound(cards, k_eff)?;
    let binary_applies = cards.iter().all(|&c| c == 2)
        && hidden_cards.iter().all(|&m| m == 2)
        && k_eff <= (1u128 << (n - 1));
    if binary_applies {
        let refined = binary_union_value(n, k_eff as u64, 0);
        if refined < general {
            return Ok(BoundReport::new(refined, BoundKind::Upper, None, "rbm-thm"));
        }
    }
    Ok(BoundReport::new(
        general,
        BoundKind::Upper,
        Some(Witness::Subset { axes }),
        "rbm-thm",
    ))
}

/// Geometric sum 1 + q + ... + q^(s-1), saturating so the comparison with
/// the layer count stays safe.
fn geo_sum(q: u128, s: usize) -> u128 {
    if q == 1 {
        return s as u128;
    }
    let mut acc: u128 = 0;
    let mut pow: u128 = 1;
    for _ in 0..s {
        acc = acc.saturating_add(pow);
        pow = pow.saturating_mul(q);
    }
    acc
}

/// Upper bound on the divergence from a deep layered network whose visible
/// layer has the given cardinalities, with `layers` layers in total. The
/// bound minimizes ln prod of the m-s largest visible cardinalities over
/// splits (m, s) that the width and depth of the network can support.
pub fn bound_dbn(layer_cards: &[usize], layers: usize) -> Result<BoundReport> {
    validate_cards(layer_cards)?;
    let total = checked_product(layer_cards)?;
    let n = layer_cards.len();
    let mut sorted = layer_cards.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let q1 = sorted[0] as u128;
    let homogeneous = sorted.iter().all(|&c| c == sorted[0]);
    let prefix_value = |t: usize| -> f64 {
        if homogeneous {
            t as f64 * (sorted[0] as f64).ln()
        } else {
            let prod: u128 = sorted[..t].iter().map(|&c| c as u128).product();
            (prod as f64).ln()
        }
    };
    // Largest s the depth supports: layers >= 2 + (q1^s - 1)/(q1 - 1).
    let mut s_cap: usize = 0;
    while s_cap < n && geo_sum(q1, s_cap + 1) <= (layers as u128).saturating_sub(2) {
        s_cap += 1;
    }
    let depth_ok = layers >= 2;
    let mut best: Option<(f64, usize, usize)> = None;
    if depth_ok {
        for m in 1..=n {
            let tail: u128 = sorted[(m + 1).min(n)..].iter().map(|&c| c as u128).product();
            if tail > m as u128 {
                continue;
            }
            for s in 0..=s_cap.min(m) {
                let value = prefix_value(m - s);
                if best.map_or(true, |(b, _, _)| value < b) {
                    best = Some((value, m, s));
                }
            }
        }
    }
    match best {
        Some((value, m, s)) => Ok(BoundReport::new(
            value,
            BoundKind::Upper,
            Some(Witness::LayerSplit { m, s }),
            "dbn-thm",
        )),
        None => Ok(BoundReport::new(
            (total as f64).ln(),
            BoundKind::Upper,
            None,
            "dbn-thm",
        )),
    }
}

/// Lower bound on the maximal divergence from any exponential family of the
/// given dimension on a space with `n_states` states.
pub fn lower_bound_expfam(n_states: usize, dim: usize) -> Result<BoundReport> {
    if n_states == 0 {
        return Err(Error::BadCards);
    }
    let value = ((n_states as f64).ln() - ((dim + 1) as f64).ln()).max(0.0);
    Ok(BoundReport::new(value, BoundKind::Lower, None, "optifam"))
}

/// Upper bound on the divergence from the union of k-block cubical-partition
/// product models on the binary n-cube.
pub fn bound_umpd(n: usize, k: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::BadCards);
    }
    if k < 1 || (n <= 64 && (k as u128) > (1u128 << (n - 1))) {
        return Err(Error::KOutOfRange {
            k,
            condition: "1 <= k <= 2^(n-1)".into(),
        });
    }
    Ok(BoundReport::new(
        binary_union_value(n, k as u64, 0),
        BoundKind::Upper,
        None,
        "umpd-thm",
    ))
}

/// Upper bound on the divergence from the union of k-block partition models
/// on the binary n-cube.
pub fn bound_union_partitions(n: usize, k: usize) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::BadCards);
    }
    if k < 1 || (n <= 64 && (k as u128) > (1u128 << n)) {
        return Err(Error::KOutOfRange {
            k,
            condition: "1 <= k <= 2^n".into(),
        });
    }
    Ok(BoundReport::new(
        binary_union_value(n, k as u64, 1),
        BoundKind::Upper,
        None,
        "umpd-thm",
    ))
}

/// Divergence bound for the product model of a cubical partition:
/// max over blocks of ln(|A_i| / q_i), where q_i is the largest axis factor
/// of block i. Exact when every block is homogeneous (all non-singleton
/// axis factors equal), otherwise an upper bound.
pub fn mpd_exact(rho: &CubicalPartition) -> BoundReport {
    let mut best = f64::NEG_INFINITY;
    let mut best_block = 0;
    let mut all_homogeneous = true;
    for (i, block) in rho.blocks().iter().enumerate() {
        let sizes: Vec<usize> = block.axes().iter().map(|vals| vals.len()).collect();
        let q = sizes.iter().copied().max().unwrap_or(1);
        let free: Vec<usize> = sizes.iter().copied().filter(|&s| s > 1).collect();
        let homogeneous = free.iter().all(|&s| s == q);
        if !homogeneous {
            all_homogeneous = false;
        }
        let value = if homogeneous {
            if free.is_empty() {
                0.0
            } else {
                (free.len() as f64 - 1.0) * (q as f64).ln()
            }
        } else {
            let size: u128 = sizes.iter().map(|&s| s as u128).product();
            // q divides the block size, so the ratio is an exact integer.
            ((size / q as u128) as f64).ln()
        };
        if value > best {
            best = value;
            best_block = i;
        }
    }
    BoundReport::new(
        best.max(0.0),
        if all_homogeneous {
            BoundKind::Exact
        } else {
            BoundKind::Upper
        },
        Some(Witness::Block { index: best_block }),
        "mpd-cor",
    )
}

/// Number of free parameters of the model a spec describes.
pub fn param_count(spec: &ModelSpec) -> Result<usize> {
    let axis_sum = |cards: &[usize]| -> Result<usize> {
        validate_cards(cards)?;
        Ok(cards.iter().map(|&c| c - 1).sum())
    };
    match spec {
        ModelSpec::Independence { cards } => axis_sum(cards),
        ModelSpec::Mixture { cards, k } => {
            if *k < 1 {
                return Err(Error::KOutOfRange {
                    k: *k,
                    condition: "k >= 1".into(),
                });
            }
            Ok(k * axis_sum(cards)? + (k - 1))
        }
        ModelSpec::Partition { blocks, .. } => {
            if blocks.is_empty() {
                return Err(Error::BadPartition("no blocks".into()));
            }
            Ok(blocks.len() - 1)
        }
        ModelSpec::Rbm { n, m } => Ok(n * m + n + m),
        ModelSpec::Dbn { widths } => {
            if widths.len() < 2 {
                return Err(Error::BadParamShape(
                    "a layered network needs at least two layers".into(),
                ));
            }
            let pairs: usize = widths.windows(2).map(|w| w[0] * w[1]).sum();
            Ok(pairs + widths.iter().sum::<usize>())
        }
        other => Err(Error::Unsupported(format!(
            "no parameter count for model kind {:?}",
            kind_name(other)
        ))),
    }
}

fn kind_name(spec: &ModelSpec) -> &'static str {
    match spec {
        ModelSpec::Independence { .. } => "independence",
        ModelSpec::Partition { .. } => "partition",
        ModelSpec::Mpd { .. } => "mpd",
        ModelSpec::Mixture { .. } => "mixture",
        ModelSpec::Multinomial { .. } => "multinomial",
        ModelSpec::Rbm { .. } => "rbm",
        ModelSpec::Dbn { .. } => "dbn",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::CubicalSet;
    use crate::space::StateSpace;

    #[test]
    fn independence_examples() {
        let r = bound_independence(&[2, 2]).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(r.kind, BoundKind::Upper);
        assert_eq!(r.formula, "ind-lemma");
        let r = bound_independence(&[2, 3]).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        let r = bound_independence(&[5]).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(bound_independence(&[]).is_err());
        assert!(bound_independence(&[2, 0]).is_err());
    }

    #[test]
    fn exact_independence_matches_product_form() {
        let r = exact_independence(3, 2).unwrap();
        assert!((r.value - 2.0 * LN_2).abs() < 1e-15);
        assert_eq!(r.kind, BoundKind::Exact);
        // Same expression as the homogeneous upper bound.
        assert_eq!(r.value, bound_independence(&[2, 2, 2]).unwrap().value);
    }

    #[test]
    fn mixture_examples() {
        let r = bound_mixture(&[2, 2, 2, 2], 3).unwrap();
        assert!((r.value - 1.5 * LN_2).abs() < 1e-15);
        assert_eq!(r.witness, None);
        let r = bound_mixture(&[2, 2, 2], 4).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.kind, BoundKind::Upper);
        assert!(matches!(
            bound_mixture(&[2, 2], 0),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn mixture_with_one_component_is_the_independence_bound() {
        for cards in [vec![2, 2], vec![3, 4, 2], vec![5], vec![2, 2, 2, 2]] {
            let a = bound_mixture(&cards, 1).unwrap();
            let b = bound_independence(&cards).unwrap();
            assert_eq!(a.value, b.value);
            assert_eq!(a.formula, b.formula);
            assert_eq!(a.witness, b.witness);
        }
    }

    #[test]
    fn mixture_bound_is_monotone_in_k() {
        let mut last = f64::INFINITY;
        for k in 1..=16 {
            let v = bound_mixture(&[2, 2, 2, 2], k).unwrap().value;
            assert!(v <= last + 1e-15, "k={k}: {v} > {last}");
            last = v;
        }
        assert_eq!(bound_mixture(&[2, 2, 2, 2], 16).unwrap().value, 0.0);
    }

    #[test]
    fn mixture_beyond_state_count_is_zero_with_empty_subset() {
        let r = bound_mixture(&[2, 2], 4).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness, Some(Witness::Subset { axes: vec![] }));
    }

    #[test]
    fn rbm_examples() {
        let r = bound_rbm(&[2, 2, 2, 2], &[2, 2, 2]).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(r.formula, "rbm-thm");
        let r = bound_rbm(&[2, 2, 2], &[2, 2, 2]).unwrap();
        assert_eq!(r.value, 0.0);
        let r = bound_rbm(&[2, 2], &[]).unwrap();
        let ind = bound_independence(&[2, 2]).unwrap();
        assert_eq!(r.value, ind.value);
        assert_eq!(r.formula, "ind-lemma");
    }

    #[test]
    fn rbm_with_wide_hidden_units_uses_the_subset_form() {
        // One 3-state hidden unit: k_eff = 3, no binary refinement.
        let r = bound_rbm(&[2, 2, 2], &[3]).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        assert!(matches!(r.witness, Some(Witness::Subset { .. })));
    }

    #[test]
    fn rbm_bound_is_monotone_in_hidden_units() {
        let mut last = f64::INFINITY;
        for m in 0..=8 {
            let v = bound_rbm(&[2, 2, 2, 2], &vec![2; m]).unwrap().value;
            assert!(v <= last + 1e-15);
            last = v;
        }
    }

    #[test]
    fn dbn_examples() {
        let r = bound_dbn(&[2, 2], 3).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness, Some(Witness::LayerSplit { m: 1, s: 1 }));
        let r = bound_dbn(&[2, 2, 2, 2], 2).unwrap();
        assert!((r.value - 2.0 * LN_2).abs() < 1e-15);
        assert_eq!(r.witness, Some(Witness::LayerSplit { m: 2, s: 0 }));
        let r = bound_dbn(&[2, 2, 2, 2], 5).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.witness, Some(Witness::LayerSplit { m: 2, s: 2 }));
    }

    #[test]
    fn dbn_too_shallow_falls_back_to_the_trivial_bound() {
        let r = bound_dbn(&[2, 2], 1).unwrap();
        assert!((r.value - 2.0 * LN_2).abs() < 1e-15);
        assert_eq!(r.witness, None);
    }

    #[test]
    fn dbn_minimization_recovers_the_binary_closed_form() {
        // Binary visible layer of width 2^(k-1) + k, depth 1 + 2^s.
        for k in [2usize, 3] {
            let m = 1usize << (k - 1);
            let n = m + k;
            for s in 0..=2usize {
                let layers = 1 + (1usize << s);
                let r = bound_dbn(&vec![2; n], layers).unwrap();
                let expect = (m - s) as f64 * LN_2;
                assert!(
                    (r.value - expect).abs() < 1e-12,
                    "k={k} s={s}: {} vs {}",
                    r.value,
                    expect
                );
                assert_eq!(r.witness, Some(Witness::LayerSplit { m, s }));
            }
        }
    }

    #[test]
    fn dbn_sorts_cards_before_minimizing() {
        let a = bound_dbn(&[3, 2, 2], 2).unwrap();
        let b = bound_dbn(&[2, 2, 3], 2).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn expfam_examples() {
        let r = lower_bound_expfam(4, 1).unwrap();
        assert!((r.value - LN_2).abs() < 1e-12);
        assert_eq!(r.kind, BoundKind::Lower);
        assert_eq!(r.formula, "optifam");
        assert_eq!(lower_bound_expfam(4, 3).unwrap().value, 0.0);
        let r = lower_bound_expfam(8, 1).unwrap();
        assert!((r.value - 2.0 * LN_2).abs() < 1e-12);
        assert_eq!(lower_bound_expfam(2, 5).unwrap().value, 0.0);
        assert!(lower_bound_expfam(0, 1).is_err());
    }

    #[test]
    fn umpd_examples() {
        let r = bound_umpd(3, 2).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(r.formula, "umpd-thm");
        for n in 1..=6usize {
            let k = 1usize << (n - 1);
            assert_eq!(bound_umpd(n, k).unwrap().value, 0.0);
        }
        assert!(bound_umpd(3, 0).is_err());
        assert!(bound_umpd(3, 5).is_err());
    }

    #[test]
    fn union_partition_examples() {
        let r = bound_union_partitions(3, 4).unwrap();
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(bound_union_partitions(3, 8).unwrap().value, 0.0);
        assert!(bound_union_partitions(3, 9).is_err());
        // Products within blocks buy exactly one factor of 2 per block count.
        for k in 1..=4usize {
            let a = bound_umpd(3, k).unwrap().value;
            let b = bound_union_partitions(3, k).unwrap().value;
            assert!((b - a - LN_2).abs() < 1e-15);
        }
    }

    fn cubical(cards: &[usize], blocks: &[&[&[usize]]]) -> CubicalPartition {
        let space = StateSpace::new(cards.to_vec()).unwrap();
        let sets = blocks
            .iter()
            .map(|axes| {
                CubicalSet::new(&space, axes.iter().map(|a| a.to_vec()).collect()).unwrap()
            })
            .collect();
        CubicalPartition::new(space, sets).unwrap()
    }

    #[test]
    fn mpd_exact_examples() {
        // Singleton blocks: the model is everything, value 0, exact.
        let rho = cubical(
            &[2, 2],
            &[
                &[&[0], &[0]],
                &[&[0], &[1]],
                &[&[1], &[0]],
                &[&[1], &[1]],
            ],
        );
        let r = mpd_exact(&rho);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.kind, BoundKind::Exact);

        // Two half-cubes of the 3-cube: each block is 1 x 2 x 2.
        let rho = cubical(
            &[2, 2, 2],
            &[&[&[0], &[0, 1], &[0, 1]], &[&[1], &[0, 1], &[0, 1]]],
        );
        let r = mpd_exact(&rho);
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(r.kind, BoundKind::Exact);
        assert_eq!(r.witness, Some(Witness::Block { index: 0 }));

        // Two parallel edges of the square: blocks are 1 x 2, value 0.
        let rho = cubical(&[2, 2], &[&[&[0], &[0, 1]], &[&[1], &[0, 1]]]);
        let r = mpd_exact(&rho);
        assert_eq!(r.value, 0.0);
        assert_eq!(r.kind, BoundKind::Exact);

        // Inhomogeneous block (2 x 3): upper bound, not exact.
        let rho = cubical(&[2, 3], &[&[&[0, 1], &[0, 1, 2]]]);
        let r = mpd_exact(&rho);
        assert!((r.value - LN_2).abs() < 1e-15);
        assert_eq!(r.kind, BoundKind::Upper);
    }

    #[test]
    fn param_counts() {
        assert_eq!(
            param_count(&ModelSpec::Independence {
                cards: vec![2, 2, 2]
            })
            .unwrap(),
            3
        );
        assert_eq!(param_count(&ModelSpec::Rbm { n: 3, m: 2 }).unwrap(), 11);
        assert_eq!(
            param_count(&ModelSpec::Mixture {
                cards: vec![2, 2, 2],
                k: 2
            })
            .unwrap(),
            7
        );
        assert_eq!(
            param_count(&ModelSpec::Partition {
                cards: vec![2, 2],
                blocks: vec![vec![0, 1], vec![2, 3]]
            })
            .unwrap(),
            1
        );
        assert_eq!(
            param_count(&ModelSpec::Dbn {
                widths: vec![2, 2, 2]
            })
            .unwrap(),
            14
        );
        assert!(param_count(&ModelSpec::Multinomial { n: 2, q: 2 }).is_err());
        assert!(param_count(&ModelSpec::Mpd {
            cards: vec![2, 2],
            blocks: vec![]
        })
        .is_err());
    }

    #[test]
    fn reports_serialize_round_trip() {
        let r = bound_dbn(&[2, 2, 2, 2], 2).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: BoundReport = serde_json::from_str(&text).unwrap();
        assert_eq!(r, back);
        assert!(text.contains("\"layer-split\""));
    }
}
