//! Partitions of a state space: general ones given by state-index blocks,
//! and cubical ones whose blocks are axis-aligned products Y_1 x ... x Y_n.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::space::StateSpace;

/// A partition of the state indices [0, N) into disjoint nonempty blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    space: StateSpace,
    blocks: Vec<Vec<usize>>,
    /// assignment[state] = index of the block containing it.
    assignment: Vec<usize>,
}

impl Partition {
    pub fn new(space: StateSpace, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let total = space.total();
        let mut assignment = vec![usize::MAX; total];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::BadPartition("empty block".into()));
            }
            for &state in block {
                if state >= total {
                    return Err(Error::IndexOutOfRange {
                        index: state,
                        total,
                    });
                }
                if assignment[state] != usize::MAX {
                    return Err(Error::BadPartition(format!(
                        "state {state} appears in more than one block"
                    )));
                }
                assignment[state] = b;
            }
        }
        if let Some(state) = assignment.iter().position(|&b| b == usize::MAX) {
            return Err(Error::BadPartition(format!("state {state} is not covered")));
        }
        let mut blocks = blocks;
        for block in &mut blocks {
            block.sort_unstable();
        }
        Ok(Partition {
            space,
            blocks,
            assignment,
        })
    }

    /// The partition into singletons; its model is the full simplex.
    pub fn singletons(space: StateSpace) -> Self {
        let blocks: Vec<Vec<usize>> = (0..space.total()).map(|i| vec![i]).collect();
        let assignment = (0..space.total()).collect();
        Partition {
            space,
            blocks,
            assignment,
        }
    }

    /// The one-block partition; its model is {uniform}.
    pub fn single_block(space: StateSpace) -> Self {
        let blocks = vec![(0..space.total()).collect()];
        let assignment = vec![0; space.total()];
        Partition {
            space,
            blocks,
            assignment,
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false // a valid partition always has at least one block
    }

    pub fn block_of(&self, state: usize) -> usize {
        self.assignment[state]
    }

    /// Coarseness c: the largest block size.
    pub fn coarseness(&self) -> usize {
        self.blocks.iter().map(Vec::len).max().unwrap()
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Partition", 2)?;
        st.serialize_field("cards", self.space.cards())?;
        st.serialize_field("blocks", &self.blocks)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            cards: Vec<usize>,
            blocks: Vec<Vec<usize>>,
        }
        let repr = Repr::deserialize(d)?;
        let space = StateSpace::new(repr.cards).map_err(D::Error::custom)?;
        Partition::new(space, repr.blocks).map_err(D::Error::custom)
    }
}

/// An axis-aligned product set Y_1 x ... x Y_n with nonempty Y_i per axis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CubicalSet {
    axes: Vec<Vec<usize>>,
}

impl CubicalSet {
    pub fn new(space: &StateSpace, axes: Vec<Vec<usize>>) -> Result<Self> {
        if axes.len() != space.arity() {
            return Err(Error::ArityMismatch {
                got: axes.len(),
                want: space.arity(),
            });
        }
        let mut axes = axes;
        for (axis, values) in axes.iter_mut().enumerate() {
            values.sort_unstable();
            values.dedup();
            if values.is_empty() {
                return Err(Error::BadCubicalBlock(format!("axis {axis} is empty")));
            }
            if *values.last().unwrap() >= space.cards()[axis] {
                return Err(Error::CoordOutOfRange {
                    axis,
                    value: *values.last().unwrap(),
                    card: space.cards()[axis],
                });
            }
        }
        Ok(CubicalSet { axes })
    }

    pub fn axes(&self) -> &[Vec<usize>] {
        &self.axes
    }

    /// Number of states in the set: the product of the axis sizes.
    pub fn size(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn contains(&self, state: &[usize]) -> bool {
        state
            .iter()
            .zip(&self.axes)
            .all(|(x, values)| values.binary_search(x).is_ok())
    }

    /// All member state indices, ascending.
    pub fn state_indices(&self, space: &StateSpace) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.size());
        let mut choice = vec![0usize; self.axes.len()];
        loop {
            let state: Vec<usize> = choice
                .iter()
                .zip(&self.axes)
                .map(|(&c, values)| values[c])
                .collect();
            out.push(space.index_of(&state).expect("validated against space"));
            // odometer over the per-axis choices, last axis fastest
            let mut axis = self.axes.len();
            loop {
                if axis == 0 {
                    out.sort_unstable();
                    return out;
                }
                axis -= 1;
                choice[axis] += 1;
                if choice[axis] < self.axes[axis].len() {
                    break;
                }
                choice[axis] = 0;
            }
        }
    }
}

/// A partition of the state space into cubical blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalPartition {
    space: StateSpace,
    blocks: Vec<CubicalSet>,
}

impl CubicalPartition {
    pub fn new(space: StateSpace, blocks: Vec<CubicalSet>) -> Result<Self> {
        let mut covered = vec![false; space.total()];
        let mut seen = 0usize;
        for set in &blocks {
            if set.axes().len() != space.arity() {
                return Err(Error::ArityMismatch {
                    got: set.axes().len(),
                    want: space.arity(),
                });
            }
            for index in set.state_indices(&space) {
                if covered[index] {
                    return Err(Error::BadPartition(format!(
                        "state {index} covered by more than one block"
                    )));
                }
                covered[index] = true;
                seen += 1;
            }
        }
        if seen != space.total() {
            return Err(Error::BadPartition(format!(
                "blocks cover {seen} of {} states",
                space.total()
            )));
        }
        Ok(CubicalPartition { space, blocks })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[CubicalSet] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Forget the cubical structure, keeping only state-index blocks.
    pub fn to_partition(&self) -> Partition {
        let blocks = self
            .blocks
            .iter()
            .map(|set| set.state_indices(&self.space))
            .collect();
        Partition::new(self.space.clone(), blocks).expect("validated on construction")
    }
}

impl Serialize for CubicalPartition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("CubicalPartition", 2)?;
        st.serialize_field("cards", self.space.cards())?;
        st.serialize_field("blocks", &self.blocks)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CubicalPartition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            cards: Vec<usize>,
            blocks: Vec<Vec<Vec<usize>>>,
        }
        let repr = Repr::deserialize(d)?;
        let space = StateSpace::new(repr.cards).map_err(D::Error::custom)?;
        let blocks = repr
            .blocks
            .into_iter()
            .map(|axes| CubicalSet::new(&space, axes))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        CubicalPartition::new(space, blocks).map_err(D::Error::custom)
    }
}

/// Decide whether a set of states is cubical, i.e. equals the product of its
/// per-axis value sets. Returns the product description if so.
pub fn is_cubical(space: &StateSpace, states: &[usize]) -> Option<CubicalSet> {
    if states.is_empty() {
        return None;
    }
    let n = space.arity();
    let mut axes: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut member = vec![false; space.total()];
    let mut count = 0usize;
    let mut state = vec![0usize; n];
    for &index in states {
        if index >= space.total() || member[index] {
            return None;
        }
        member[index] = true;
        count += 1;
        space.state_into(index, &mut state);
        for (axis, &x) in state.iter().enumerate() {
            if !axes[axis].contains(&x) {
                axes[axis].push(x);
            }
        }
    }
    let product: usize = axes.iter().map(Vec::len).product();
    if product != count {
        return None;
    }
    // |set| = prod |Y_i| and set ⊆ Y_1 x ... x Y_n forces equality.
    Some(CubicalSet::new(space, axes).expect("values came from valid states"))
}
