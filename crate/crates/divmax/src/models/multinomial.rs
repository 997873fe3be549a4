//! The multinomial model: distributions of the count vector of n exchangeable
//! q-ary variables. Projection is moment matching of the mean counts.

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::models::{Model, ProjResult};
use crate::space::StateSpace;

/// The space of count vectors (c_1,...,c_q) with sum n, enumerated with the
/// first coordinate decreasing, as a single-axis state space.
#[derive(Debug, Clone, PartialEq)]
pub struct CountSpace {
    n: usize,
    q: usize,
    vectors: Vec<Vec<usize>>,
    space: StateSpace,
}

impl CountSpace {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        if n == 0 || q < 2 {
            return Err(Error::BadCards);
        }
        let mut vectors = Vec::new();
        let mut cur = vec![0usize; q];
        fill(&mut vectors, &mut cur, 0, n, q);
        let space = StateSpace::new(vec![vectors.len()])?;
        Ok(CountSpace {
            n,
            q,
            vectors,
            space,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn vectors(&self) -> &[Vec<usize>] {
        &self.vectors
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn index_of(&self, counts: &[usize]) -> Result<usize> {
        self.vectors
            .iter()
            .position(|v| v == counts)
            .ok_or_else(|| Error::BadCountSpace {
                n: self.n,
                q: self.q,
                want: self.vectors.len(),
                got: 0,
            })
    }
}

fn fill(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, axis: usize, left: usize, q: usize) {
    if axis == q - 1 {
        cur[axis] = left;
        out.push(cur.clone());
        return;
    }
    for c in (0..=left).rev() {
        cur[axis] = c;
        fill(out, cur, axis + 1, left - c, q);
    }
}

/// The multinomial distribution with the given cell probabilities, as a
/// distribution over the count space.
pub fn multinomial_dist(cs: &CountSpace, theta: &[f64]) -> Result<Dist> {
    if theta.len() != cs.q {
        return Err(Error::BadParamShape(format!(
            "theta has {} entries, want {}",
            theta.len(),
            cs.q
        )));
    }
    if theta.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
        return Err(Error::BadWeights);
    }
    let sum: f64 = theta.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::BadWeights);
    }
    let lnf = ln_factorials(cs.n);
    let mut probs = Vec::with_capacity(cs.vectors.len());
    for counts in &cs.vectors {
        let mut ln_p = lnf[cs.n];
        let mut zero = false;
        for (&c, &t) in counts.iter().zip(theta) {
            ln_p -= lnf[c];
            if c > 0 {
                if t == 0.0 {
                    zero = true;
                    break;
                }
                ln_p += c as f64 * t.ln();
            }
        }
        probs.push(if zero { 0.0 } else { ln_p.exp() });
    }
    let total: f64 = probs.iter().sum();
    for v in &mut probs {
        *v /= total;
    }
    Ok(Dist::from_normalized(cs.space.clone(), probs))
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut lnf = vec![0.0; n + 1];
    for k in 2..=n {
        lnf[k] = lnf[k - 1] + (k as f64).ln();
    }
    lnf
}

/// Project a distribution of count vectors onto the multinomial model by
/// matching mean counts: theta_i = E_p[c_i] / n.
pub fn project_multinomial(p: &Dist, n: usize, q: usize) -> Result<ProjResult> {
    let cs = CountSpace::new(n, q)?;
    project_onto(&cs, p)
}

fn project_onto(cs: &CountSpace, p: &Dist) -> Result<ProjResult> {
    if p.space() != cs.space() {
        return Err(Error::BadCountSpace {
            n: cs.n,
            q: cs.q,
            want: cs.space.total(),
            got: p.space().total(),
        });
    }
    let mut theta = vec![0.0; cs.q];
    for (counts, &mass) in cs.vectors.iter().zip(p.probs()) {
        for (t, &c) in theta.iter_mut().zip(counts) {
            *t += mass * c as f64;
        }
    }
    for t in &mut theta {
        *t /= cs.n as f64;
    }
    let q_star = multinomial_dist(cs, &theta)?;
    let divergence = p.kl(&q_star)?;
    Ok(ProjResult {
        q_star,
        divergence,
        iterations: 0,
        converged: true,
        restarts: 0,
    })
}

#[derive(Debug, Clone)]
pub struct MultinomialModel {
    cs: CountSpace,
}

impl MultinomialModel {
    pub fn new(n: usize, q: usize) -> Result<Self> {
        Ok(MultinomialModel {
            cs: CountSpace::new(n, q)?,
        })
    }

    pub fn count_space(&self) -> &CountSpace {
        &self.cs
    }
}

impl Model for MultinomialModel {
    fn space(&self) -> &StateSpace {
        self.cs.space()
    }

    fn project(&self, p: &Dist) -> Result<ProjResult> {
        project_onto(&self.cs, p)
    }

    fn name(&self) -> &'static str {
        "multinomial"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_2: f64 = std::f64::consts::LN_2;

    #[test]
    fn count_vectors_enumerate_first_coordinate_decreasing() {
        let cs = CountSpace::new(2, 2).unwrap();
        assert_eq!(cs.vectors(), &[vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(cs.index_of(&[1, 1]).unwrap(), 1);

        let cs = CountSpace::new(2, 3).unwrap();
        assert_eq!(cs.vectors().len(), 6); // C(4,2)
        assert_eq!(cs.vectors()[0], vec![2, 0, 0]);
    }

    #[test]
    fn multinomial_distribution_projects_to_itself() {
        let cs = CountSpace::new(4, 3).unwrap();
        let p = multinomial_dist(&cs, &[0.5, 0.2, 0.3]).unwrap();
        let r = project_multinomial(&p, 4, 3).unwrap();
        assert!(r.divergence.value() < 1e-12);
        assert!(p.linf(&r.q_star).unwrap() < 1e-12);
    }

    #[test]
    fn uniform_on_extreme_counts_two_trials() {
        let cs = CountSpace::new(2, 2).unwrap();
        let i20 = cs.index_of(&[2, 0]).unwrap();
        let i02 = cs.index_of(&[0, 2]).unwrap();
        let p = Dist::uniform_on(cs.space().clone(), &[i20, i02]).unwrap();
        let r = project_multinomial(&p, 2, 2).unwrap();
        assert!((r.divergence.value() - LN_2).abs() < 1e-12);
        // matched theta = (1/2, 1/2): counts (2,0),(1,1),(0,2) get (1/4,1/2,1/4)
        assert!((r.q_star.prob(1) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn uniform_on_extreme_counts_three_trials() {
        let cs = CountSpace::new(3, 2).unwrap();
        let i30 = cs.index_of(&[3, 0]).unwrap();
        let i03 = cs.index_of(&[0, 3]).unwrap();
        let p = Dist::uniform_on(cs.space().clone(), &[i30, i03]).unwrap();
        let r = project_multinomial(&p, 3, 2).unwrap();
        assert!((r.divergence.value() - 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_count_space() {
        let p = Dist::uniform(StateSpace::new(vec![4]).unwrap());
        assert!(matches!(
            project_multinomial(&p, 2, 2),
            Err(Error::BadCountSpace { .. })
        ));
    }

    #[test]
    fn degenerate_theta_keeps_support_inclusion() {
        let cs = CountSpace::new(2, 2).unwrap();
        let i20 = cs.index_of(&[2, 0]).unwrap();
        let p = Dist::point_mass(cs.space().clone(), i20).unwrap();
        let r = project_multinomial(&p, 2, 2).unwrap();
        // theta = (1,0): the model reproduces the point mass exactly
        assert!(r.divergence.value() < 1e-12);
    }
}
