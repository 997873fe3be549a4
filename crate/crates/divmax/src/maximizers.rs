//! Closed-form constructions of divergence maximizers: uniform distributions
//! on maximum-distance codes for the independence model, and single-point
//! supports in maximal blocks for partition models.

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::space::StateSpace;

/// A batch of maximizing distributions, possibly cut off at a caller limit.
#[derive(Debug, Clone)]
pub struct Maximizers {
    pub dists: Vec<Dist>,
    /// True when more maximizers exist than were returned.
    pub truncated: bool,
}

/// Maximizers of divergence from the independence model on a homogeneous
/// q-ary space: uniform distributions on codes of cardinality q and minimum
/// distance n. Every such code is given by per-coordinate permutations, and
/// sorting its words by the first coordinate makes the first permutation the
/// identity; the remaining n-1 permutations are enumerated lexicographically.
pub fn independence_maximizers(n: usize, q: usize, limit: usize) -> Result<Maximizers> {
    if n == 0 || q < 2 {
        return Err(Error::BadCards);
    }
    let space = StateSpace::new(vec![q; n])?;
    let perms = permutations(q);
    let mut dists = Vec::new();
    let mut truncated = false;
    // choice[i] picks the permutation for coordinate i+1
    let mut choice = vec![0usize; n - 1];
    'outer: loop {
        if dists.len() == limit {
            truncated = true;
            break;
        }
        let mut support = Vec::with_capacity(q);
        for j in 0..q {
            let mut word = Vec::with_capacity(n);
            word.push(j);
            for &c in &choice {
                word.push(perms[c][j]);
            }
            support.push(space.index_of(&word)?);
        }
        dists.push(Dist::uniform_on(space.clone(), &support)?);
        let mut axis = choice.len();
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            choice[axis] += 1;
            if choice[axis] < perms.len() {
                break;
            }
            choice[axis] = 0;
        }
    }
    Ok(Maximizers { dists, truncated })
}

/// All permutations of [0, q) in lexicographic order.
fn permutations(q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = (0..q).collect::<Vec<_>>();
    heap_sorted(&mut out, &mut cur, q);
    out.sort_unstable();
    out
}

fn heap_sorted(out: &mut Vec<Vec<usize>>, cur: &mut Vec<usize>, k: usize) {
    if k == 1 {
        out.push(cur.clone());
        return;
    }
    for i in 0..k {
        heap_sorted(out, cur, k - 1);
        if k % 2 == 0 {
            cur.swap(i, k - 1);
        } else {
            cur.swap(0, k - 1);
        }
    }
}

/// Representative maximizers of divergence from a partition model: point
/// masses on states in blocks of maximal size, in ascending state order.
/// (The full maximizer set is a union of faces; any distribution with at
/// most one support point per block and all mass in maximal blocks works.)
pub fn partition_maximizers(rho: &Partition, limit: usize) -> Result<Maximizers> {
    let c = rho.coarseness();
    let mut states: Vec<usize> = rho
        .blocks()
        .iter()
        .filter(|b| b.len() == c)
        .flat_map(|b| b.iter().copied())
        .collect();
    states.sort_unstable();
    let truncated = states.len() > limit;
    states.truncate(limit);
    let dists = states
        .into_iter()
        .map(|x| Dist::point_mass(rho.space().clone(), x))
        .collect::<Result<Vec<_>>>()?;
    Ok(Maximizers { dists, truncated })
}

/// Whether `p` maximizes divergence from the partition model of `rho`:
/// at most one support point per block and support only in blocks of
/// maximal size. Mass below `tol` does not count as support.
pub fn is_partition_maximizer(p: &Dist, rho: &Partition, tol: f64) -> Result<bool> {
    if p.space() != rho.space() {
        return Err(Error::SpaceMismatch);
    }
    let c = rho.coarseness();
    for block in rho.blocks() {
        let points = block.iter().filter(|&&x| p.prob(x) > tol).count();
        if points > 1 || (points == 1 && block.len() < c) {
            return Ok(false);
        }
    }
    Ok(true)
}
