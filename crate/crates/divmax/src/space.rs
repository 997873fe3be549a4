//! Finite product state spaces with mixed-radix joint-state indexing.

use crate::error::{Error, Result};

/// Dense representations hold one f64 per joint state; reject anything larger.
pub const MAX_STATES: usize = 1 << 20;

/// The product space X_1 x ... x X_n where axis i ranges over 0..cards[i].
///
/// Joint states are numbered lexicographically with the first axis most
/// significant: index = ((x_1 * N_2) + x_2) * N_3 + ...
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateSpace {
    cards: Vec<usize>,
    total: usize,
}

impl StateSpace {
    pub fn new(cards: Vec<usize>) -> Result<Self> {
        if cards.is_empty() || cards.contains(&0) {
            return Err(Error::BadCards);
        }
        let mut total: u128 = 1;
        for &c in &cards {
            total *= c as u128;
            if total > MAX_STATES as u128 {
                return Err(Error::TooManyStates {
                    states: total,
                    limit: MAX_STATES,
                });
            }
        }
        Ok(StateSpace {
            cards,
            total: total as usize,
        })
    }

    pub fn binary(n: usize) -> Result<Self> {
        Self::new(vec![2; n])
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    /// Number of axes n.
    pub fn arity(&self) -> usize {
        self.cards.len()
    }

    /// Number of joint states N.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn is_binary(&self) -> bool {
        self.cards.iter().all(|&c| c == 2)
    }

    pub fn index_of(&self, state: &[usize]) -> Result<usize> {
        if state.len() != self.cards.len() {
            return Err(Error::ArityMismatch {
                got: state.len(),
                want: self.cards.len(),
            });
        }
        let mut idx = 0usize;
        for (axis, (&x, &card)) in state.iter().zip(&self.cards).enumerate() {
            if x >= card {
                return Err(Error::CoordOutOfRange {
                    axis,
                    value: x,
                    card,
                });
            }
            idx = idx * card + x;
        }
        Ok(idx)
    }

    pub fn state_of(&self, index: usize) -> Result<Vec<usize>> {
        if index >= self.total {
            return Err(Error::IndexOutOfRange {
                index,
                total: self.total,
            });
        }
        let mut state = vec![0; self.cards.len()];
        self.state_into(index, &mut state);
        Ok(state)
    }

    /// Decode `index` into `out` without allocating. `out` must have length n.
    pub fn state_into(&self, index: usize, out: &mut [usize]) {
        debug_assert!(index < self.total && out.len() == self.cards.len());
        let mut rest = index;
        for (slot, &card) in out.iter_mut().zip(&self.cards).rev() {
            *slot = rest % card;
            rest /= card;
        }
    }

    /// Coordinate of axis `axis` in the joint state `index`.
    pub fn coord(&self, index: usize, axis: usize) -> usize {
        debug_assert!(index < self.total && axis < self.cards.len());
        let mut rest = index;
        for &card in self.cards[axis + 1..].iter().rev() {
            rest /= card;
        }
        rest % self.cards[axis]
    }

    /// All joint states in index order.
    pub fn states(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.total).map(|i| self.state_of(i).expect("index in range"))
    }

    /// N_A: the number of joint states of the axes in A.
    pub fn sub_card(&self, axes: &[usize]) -> Result<usize> {
        let mut seen = vec![false; self.cards.len()];
        let mut prod = 1usize;
        for &a in axes {
            if a >= self.cards.len() || seen[a] {
                return Err(Error::BadAxes {
                    arity: self.cards.len(),
                });
            }
            seen[a] = true;
            prod *= self.cards[a];
        }
        Ok(prod)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_of_is_mixed_radix_with_first_axis_most_significant() {
        let s = StateSpace::new(vec![2, 2]).unwrap();
        assert_eq!(s.index_of(&[1, 0]).unwrap(), 2);
        let s = StateSpace::new(vec![2, 3]).unwrap();
        assert_eq!(s.index_of(&[1, 2]).unwrap(), 5);
    }

    #[test]
    fn state_of_round_trips() {
        let s = StateSpace::new(vec![2, 2]).unwrap();
        assert_eq!(s.state_of(3).unwrap(), vec![1, 1]);
        let s = StateSpace::new(vec![3, 2, 4]).unwrap();
        for i in 0..s.total() {
            assert_eq!(s.index_of(&s.state_of(i).unwrap()).unwrap(), i);
        }
    }

    #[test]
    fn coord_matches_state_of() {
        let s = StateSpace::new(vec![3, 2, 4]).unwrap();
        for i in 0..s.total() {
            let st = s.state_of(i).unwrap();
            for a in 0..s.arity() {
                assert_eq!(s.coord(i, a), st[a]);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(StateSpace::new(vec![]), Err(Error::BadCards));
        assert_eq!(StateSpace::new(vec![2, 0]), Err(Error::BadCards));
        assert!(matches!(
            StateSpace::new(vec![2; 21]),
            Err(Error::TooManyStates { .. })
        ));
        let s = StateSpace::new(vec![2, 2]).unwrap();
        assert!(matches!(
            s.index_of(&[0, 2]),
            Err(Error::CoordOutOfRange { axis: 1, .. })
        ));
        assert!(matches!(s.index_of(&[0]), Err(Error::ArityMismatch { .. })));
        assert!(matches!(
            s.state_of(4),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn sub_card_multiplies_selected_axes() {
        let s = StateSpace::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.sub_card(&[0, 2]).unwrap(), 8);
        assert_eq!(s.sub_card(&[]).unwrap(), 1);
        assert!(s.sub_card(&[0, 0]).is_err());
    }
}
