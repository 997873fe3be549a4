//! Exact distributions over a [`StateSpace`], with divergence, entropy,
//! marginalization, conditioning, products, and mixtures. All logarithms are
//! natural; callers that want bits divide by ln 2 at display time.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::StateSpace;

/// Inputs whose mass differs from 1 by at most this much are renormalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A nonnegative real extended with +infinity, the codomain of KL divergence.
/// Infinity arises exactly when the support of p is not contained in the
/// support of q.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Wrap a finite nonnegative value; tiny negative rounding residue is
    /// clamped to zero.
    pub fn finite(v: f64) -> ExtReal {
        debug_assert!(v.is_finite() && v > -1e-9, "not a divergence value: {v}");
        ExtReal(v.max(0.0))
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The value as an f64, +infinity included.
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) if v >= 0.0 => Ok(ExtReal(v)),
            Repr::Num(v) => Err(D::Error::custom(format!("negative divergence {v}"))),
            Repr::Str(s) if s == "inf" => Ok(ExtReal::INFINITY),
            Repr::Str(s) => Err(D::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// A dense probability vector over a [`StateSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    space: StateSpace,
    probs: Vec<f64>,
}

impl Dist {
    /// Validate and normalize: entries must be nonnegative and sum to 1
    /// within [`NORMALIZATION_TOL`]; the stored vector is rescaled to sum
    /// to 1 exactly up to rounding.
    pub fn new(space: StateSpace, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.total() {
            return Err(Error::ProbLenMismatch {
                got: probs.len(),
                want: space.total(),
            });
        }
        for (index, &value) in probs.iter().enumerate() {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(Error::NegativeProb { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        let mut probs = probs;
        if sum != 1.0 {
            for v in &mut probs {
                *v /= sum;
            }
        }
        Ok(Dist { space, probs })
    }

    /// Construct from a vector already known to be a probability vector.
    pub(crate) fn from_normalized(space: StateSpace, probs: Vec<f64>) -> Self {
        debug_assert_eq!(probs.len(), space.total());
        debug_assert!(probs.iter().all(|&v| v >= 0.0));
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() <= 1e-6);
        Dist { space, probs }
    }

    pub fn uniform(space: StateSpace) -> Self {
        let n = space.total();
        Dist {
            space,
            probs: vec![1.0 / n as f64; n],
        }
    }

    pub fn point_mass(space: StateSpace, index: usize) -> Result<Self> {
        if index >= space.total() {
            return Err(Error::IndexOutOfRange {
                index,
                total: space.total(),
            });
        }
        let mut probs = vec![0.0; space.total()];
        probs[index] = 1.0;
        Ok(Dist { space, probs })
    }

    /// Uniform distribution on the given support (state indices).
    pub fn uniform_on(space: StateSpace, support: &[usize]) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::ZeroMassBlock);
        }
        let mut probs = vec![0.0; space.total()];
        let w = 1.0 / support.len() as f64;
        for &index in support {
            if index >= space.total() {
                return Err(Error::IndexOutOfRange {
                    index,
                    total: space.total(),
                });
            }
            probs[index] += w;
        }
        Ok(Dist { space, probs })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Overwrite the probability vector in place. Hot path for grid search;
    /// the caller guarantees `src` is a probability vector of the right size.
    pub(crate) fn set_probs(&mut self, src: &[f64]) {
        debug_assert_eq!(src.len(), self.probs.len());
        self.probs.copy_from_slice(src);
    }

    /// State indices with strictly positive probability.
    pub fn support(&self) -> Vec<usize> {
        (0..self.probs.len()).filter(|&i| self.probs[i] > 0.0).collect()
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for &p in &self.probs {
            if p > 0.0 {
                h -= p * p.ln();
            }
        }
        h
    }

    /// KL divergence D(self || q) in nats; +infinity iff some state has
    /// self-mass but no q-mass.
    pub fn kl(&self, q: &Dist) -> Result<ExtReal> {
        if self.space != q.space {
            return Err(Error::SpaceMismatch);
        }
        let mut sum = 0.0;
        for (&p, &qv) in self.probs.iter().zip(&q.probs) {
            if p > 0.0 {
                if qv <= 0.0 {
                    return Ok(ExtReal::INFINITY);
                }
                sum += p * (p / qv).ln();
            }
        }
        Ok(ExtReal::finite(sum))
    }

    /// Marginal onto the given axes (distinct, in the requested order).
    pub fn marginal(&self, axes: &[usize]) -> Result<Dist> {
        let n = self.space.arity();
        let mut seen = vec![false; n];
        for &a in axes {
            if a >= n || seen[a] {
                return Err(Error::BadAxes { arity: n });
            }
            seen[a] = true;
        }
        if axes.is_empty() {
            return Err(Error::BadAxes { arity: n });
        }
        let sub = StateSpace::new(axes.iter().map(|&a| self.space.cards()[a]).collect())?;
        let mut probs = vec![0.0; sub.total()];
        let mut state = vec![0usize; n];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            self.space.state_into(idx, &mut state);
            let mut sub_idx = 0usize;
            for &a in axes {
                sub_idx = sub_idx * self.space.cards()[a] + state[a];
            }
            probs[sub_idx] += p;
        }
        Ok(Dist { space: sub, probs })
    }

    /// Per-axis marginals in one pass; probs[axis][value].
    pub fn axis_marginals(&self) -> Vec<Vec<f64>> {
        let cards = self.space.cards();
        let mut margs: Vec<Vec<f64>> = cards.iter().map(|&c| vec![0.0; c]).collect();
        let mut state = vec![0usize; cards.len()];
        for (idx, &p) in self.probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            self.space.state_into(idx, &mut state);
            for (axis, &x) in state.iter().enumerate() {
                margs[axis][x] += p;
            }
        }
        margs
    }

    /// Condition on a set of states: restrict and renormalize.
    pub fn condition_on(&self, block: &[usize]) -> Result<Dist> {
        let mut probs = vec![0.0; self.probs.len()];
        let mut mass = 0.0;
        for &index in block {
            if index >= self.probs.len() {
                return Err(Error::IndexOutOfRange {
                    index,
                    total: self.probs.len(),
                });
            }
            probs[index] = self.probs[index];
            mass += self.probs[index];
        }
        if mass <= 0.0 {
            return Err(Error::ZeroMassBlock);
        }
        for v in &mut probs {
            *v /= mass;
        }
        Ok(Dist {
            space: self.space.clone(),
            probs,
        })
    }

    /// Product distribution of one factor per axis.
    pub fn product(factors: &[Dist]) -> Result<Dist> {
        if factors.is_empty() {
            return Err(Error::BadCards);
        }
        let mut cards = Vec::with_capacity(factors.len());
        for f in factors {
            if f.space.arity() != 1 {
                return Err(Error::BadAxes {
                    arity: f.space.arity(),
                });
            }
            cards.push(f.space.cards()[0]);
        }
        let space = StateSpace::new(cards)?;
        let mut probs = vec![0.0; space.total()];
        let mut state = vec![0usize; factors.len()];
        for (idx, slot) in probs.iter_mut().enumerate() {
            space.state_into(idx, &mut state);
            *slot = state
                .iter()
                .zip(factors)
                .map(|(&x, f)| f.probs[x])
                .product();
        }
        Ok(Dist { space, probs })
    }

    /// Convex combination sum_i weights[i] * comps[i].
    pub fn mix(weights: &[f64], comps: &[Dist]) -> Result<Dist> {
        if weights.len() != comps.len() || comps.is_empty() {
            return Err(Error::BadWeights);
        }
        if weights.iter().any(|&w| !(w >= 0.0))
            || (weights.iter().sum::<f64>() - 1.0).abs() > NORMALIZATION_TOL
        {
            return Err(Error::BadWeights);
        }
        let space = comps[0].space.clone();
        if comps.iter().any(|c| c.space != space) {
            return Err(Error::SpaceMismatch);
        }
        let mut probs = vec![0.0; space.total()];
        for (&w, c) in weights.iter().zip(comps) {
            for (slot, &p) in probs.iter_mut().zip(&c.probs) {
                *slot += w * p;
            }
        }
        Ok(Dist { space, probs })
    }

    /// Multi-information: sum of marginal entropies minus joint entropy.
    /// Equals the divergence from the independence model.
    pub fn multi_information(&self) -> f64 {
        let margs = self.axis_marginals();
        let marg_h: f64 = margs
            .iter()
            .map(|m| m.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum::<f64>())
            .sum();
        (marg_h - self.entropy()).max(0.0)
    }

    /// Max-norm distance to another distribution on the same space.
    pub fn linf(&self, other: &Dist) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Dist", 2)?;
        st.serialize_field("cards", self.space.cards())?;
        st.serialize_field("probs", &self.probs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Repr {
            cards: Vec<usize>,
            #[serde(default)]
            probs: Option<Vec<f64>>,
            #[serde(default)]
            support: Option<Vec<(Vec<usize>, f64)>>,
        }
        let repr = Repr::deserialize(d)?;
        let space = StateSpace::new(repr.cards).map_err(D::Error::custom)?;
        match (repr.probs, repr.support) {
            (Some(probs), None) => Dist::new(space, probs).map_err(D::Error::custom),
            (None, Some(support)) => {
                let mut probs = vec![0.0; space.total()];
                for (state, p) in &support {
                    let idx = space.index_of(state).map_err(D::Error::custom)?;
                    probs[idx] += p;
                }
                Dist::new(space, probs).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom(
                "expected exactly one of the fields `probs` and `support`",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_2: f64 = std::f64::consts::LN_2;

    fn space(cards: &[usize]) -> StateSpace {
        StateSpace::new(cards.to_vec()).unwrap()
    }

    fn dist(cards: &[usize], probs: &[f64]) -> Dist {
        Dist::new(space(cards), probs.to_vec()).unwrap()
    }

    #[test]
    fn kl_of_identical_distributions_is_zero() {
        let u = Dist::uniform(space(&[4]));
        assert_eq!(u.kl(&u).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn kl_point_mass_against_uniform_pair() {
        let p = dist(&[2], &[1.0, 0.0]);
        let q = dist(&[2], &[0.5, 0.5]);
        assert!((p.kl(&q).unwrap().value() - LN_2).abs() < 1e-15);
    }

    #[test]
    fn kl_is_infinite_on_support_violation() {
        let p = dist(&[2], &[0.5, 0.5]);
        let q = dist(&[2], &[1.0, 0.0]);
        assert!(p.kl(&q).unwrap().is_infinite());
    }

    #[test]
    fn kl_rejects_mismatched_spaces() {
        let p = Dist::uniform(space(&[4]));
        let q = Dist::uniform(space(&[2, 2]));
        assert_eq!(p.kl(&q), Err(Error::SpaceMismatch));
    }

    #[test]
    fn entropy_of_uniform_is_log_n() {
        for n in 1..16 {
            let u = Dist::uniform(space(&[n]));
            assert!((u.entropy() - (n as f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_of_product_recovers_factor() {
        let f1 = dist(&[2], &[0.3, 0.7]);
        let f2 = dist(&[3], &[0.2, 0.5, 0.3]);
        let prod = Dist::product(&[f1.clone(), f2.clone()]).unwrap();
        let m1 = prod.marginal(&[0]).unwrap();
        let m2 = prod.marginal(&[1]).unwrap();
        for (a, b) in m1.probs().iter().zip(f1.probs()) {
            assert!((a - b).abs() < 1e-14);
        }
        for (a, b) in m2.probs().iter().zip(f2.probs()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn condition_on_renormalizes_block() {
        let p = dist(&[2, 2], &[0.6, 0.0, 0.4, 0.0]);
        let c = p.condition_on(&[0, 1]).unwrap();
        assert_eq!(c.probs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(p.condition_on(&[1]), Err(Error::ZeroMassBlock));
    }

    #[test]
    fn product_of_fair_coins_is_uniform() {
        let coin = dist(&[2], &[0.5, 0.5]);
        let prod = Dist::product(&[coin.clone(), coin]).unwrap();
        assert_eq!(prod.probs(), &[0.25, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn mix_identity_and_two_point() {
        let p = dist(&[3], &[0.2, 0.3, 0.5]);
        let m = Dist::mix(&[1.0], &[p.clone()]).unwrap();
        assert_eq!(m.probs(), p.probs());

        let s = space(&[2, 2]);
        let d00 = Dist::point_mass(s.clone(), 0).unwrap();
        let d11 = Dist::point_mass(s.clone(), 3).unwrap();
        let m = Dist::mix(&[0.5, 0.5], &[d00, d11]).unwrap();
        assert_eq!(m.probs(), &[0.5, 0.0, 0.0, 0.5]);
    }

    #[test]
    fn multi_information_of_antipodal_supports() {
        let p = Dist::uniform_on(space(&[2, 2]), &[0, 3]).unwrap();
        assert!((p.multi_information() - LN_2).abs() < 1e-12);
        let p = Dist::uniform_on(space(&[2, 2, 2]), &[0, 7]).unwrap();
        assert!((p.multi_information() - 2.0 * LN_2).abs() < 1e-12);
        let prod = Dist::product(&[dist(&[2], &[0.3, 0.7]), dist(&[2], &[0.9, 0.1])]).unwrap();
        assert!(prod.multi_information().abs() < 1e-12);
    }

    #[test]
    fn constructor_validates_and_renormalizes() {
        let s = space(&[2]);
        assert!(matches!(
            Dist::new(s.clone(), vec![0.5]),
            Err(Error::ProbLenMismatch { .. })
        ));
        assert!(matches!(
            Dist::new(s.clone(), vec![-0.1, 1.1]),
            Err(Error::NegativeProb { .. })
        ));
        assert!(matches!(
            Dist::new(s.clone(), vec![0.6, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        let d = Dist::new(s, vec![0.5 + 4e-10, 0.5 + 4e-10]).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip_dense_and_sparse() {
        let p = dist(&[2, 2], &[0.5, 0.0, 0.0, 0.5]);
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(text, r#"{"cards":[2,2],"probs":[0.5,0.0,0.0,0.5]}"#);
        let back: Dist = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);

        let sparse = r#"{"cards":[2,2],"support":[[[0,0],0.5],[[1,1],0.5]]}"#;
        let from_sparse: Dist = serde_json::from_str(sparse).unwrap();
        assert_eq!(from_sparse, p);

        assert!(serde_json::from_str::<Dist>(r#"{"cards":[2,2]}"#).is_err());
    }

    #[test]
    fn ext_real_serializes_infinity_as_string() {
        assert_eq!(serde_json::to_string(&ExtReal::INFINITY).unwrap(), "\"inf\"");
        assert_eq!(serde_json::to_string(&ExtReal::finite(0.5)).unwrap(), "0.5");
        let back: ExtReal = serde_json::from_str("\"inf\"").unwrap();
        assert!(back.is_infinite());
    }
}
