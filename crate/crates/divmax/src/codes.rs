//! q-ary block codes, just enough for the maximizer constructions: Hamming
//! distance, minimum distance, and the diagonal (repetition) code that
//! achieves cardinality q with minimum distance n.

use crate::error::{Error, Result};

/// A q-ary code: distinct words of a common length over [0, q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Code {
    n: usize,
    q: usize,
    words: Vec<Vec<usize>>,
}

impl Code {
    pub fn new(n: usize, q: usize, words: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 || q < 2 || words.is_empty() {
            return Err(Error::BadCards);
        }
        for word in &words {
            if word.len() != n {
                return Err(Error::ArityMismatch {
                    got: word.len(),
                    want: n,
                });
            }
            for (axis, &value) in word.iter().enumerate() {
                if value >= q {
                    return Err(Error::CoordOutOfRange {
                        axis,
                        value,
                        card: q,
                    });
                }
            }
        }
        let mut sorted = words.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadPartition("duplicate codeword".into()));
        }
        Ok(Code { n, q, words })
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> usize {
        self.q
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    /// Minimum Hamming distance over distinct word pairs; None when the code
    /// has a single word.
    pub fn min_distance(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for i in 0..self.words.len() {
            for j in i + 1..self.words.len() {
                let d = hamming(&self.words[i], &self.words[j]).expect("equal lengths");
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }
}

/// Number of coordinates where the two words differ.
pub fn hamming(u: &[usize], v: &[usize]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::ArityMismatch {
            got: v.len(),
            want: u.len(),
        });
    }
    Ok(u.iter().zip(v).filter(|(a, b)| a != b).count())
}

/// The code {(j,j,...,j) : j in [0,q)}: cardinality q, minimum distance n.
pub fn diagonal_code(n: usize, q: usize) -> Result<Code> {
    let words = (0..q).map(|j| vec![j; n]).collect();
    Code::new(n, q, words)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hamming_counts_differing_coordinates() {
        assert_eq!(hamming(&[0, 0, 0], &[1, 1, 1]).unwrap(), 3);
        assert_eq!(hamming(&[0, 1, 2], &[0, 1, 2]).unwrap(), 0);
        assert_eq!(hamming(&[0, 1], &[1, 1]).unwrap(), 1);
        assert!(hamming(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn min_distance_over_all_pairs() {
        let code = Code::new(
            3,
            2,
            vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]],
        )
        .unwrap();
        assert_eq!(code.min_distance(), Some(2));

        let single = Code::new(3, 2, vec![vec![0, 1, 0]]).unwrap();
        assert_eq!(single.min_distance(), None);
    }

    #[test]
    fn diagonal_code_examples() {
        let c = diagonal_code(3, 2).unwrap();
        assert_eq!(c.words(), &[vec![0, 0, 0], vec![1, 1, 1]]);
        assert_eq!(c.min_distance(), Some(3));

        let c = diagonal_code(2, 3).unwrap();
        assert_eq!(c.words(), &[vec![0, 0], vec![1, 1], vec![2, 2]]);
        assert_eq!(c.min_distance(), Some(2));

        for (n, q) in [(1, 2), (4, 2), (3, 5), (2, 4)] {
            let c = diagonal_code(n, q).unwrap();
            assert_eq!(c.words().len(), q);
            assert_eq!(c.min_distance(), (q >= 2).then_some(n));
        }
    }

    #[test]
    fn code_validation() {
        assert!(Code::new(2, 2, vec![vec![0, 0], vec![0, 0]]).is_err());
        assert!(Code::new(2, 2, vec![vec![0, 2]]).is_err());
        assert!(Code::new(2, 2, vec![vec![0]]).is_err());
        assert!(Code::new(2, 2, vec![]).is_err());
        assert!(Code::new(2, 1, vec![vec![0, 0]]).is_err());
    }
}
