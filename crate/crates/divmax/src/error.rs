//! Error type shared by the whole crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("cards must be a nonempty list of positive integers")]
    BadCards,
    #[error("state space has {states} states, dense limit is {limit}")]
    TooManyStates { states: u128, limit: usize },
    #[error("state has {got} coordinates, space has {want} axes")]
    ArityMismatch { got: usize, want: usize },
    #[error("coordinate {value} out of range on axis {axis} (cardinality {card})")]
    CoordOutOfRange { axis: usize, value: usize, card: usize },
    #[error("state index {index} out of range ({total} states)")]
    IndexOutOfRange { index: usize, total: usize },
    #[error("probs has {got} entries, state space has {want} states")]
    ProbLenMismatch { got: usize, want: usize },
    #[error("probs[{index}] = {value} is negative")]
    NegativeProb { index: usize, value: f64 },
    #[error("probs sum to {sum}, outside the normalization tolerance")]
    NotNormalized { sum: f64 },
    #[error("distributions live on different state spaces")]
    SpaceMismatch,
    #[error("axes must be distinct indices below {arity}")]
    BadAxes { arity: usize },
    #[error("conditioning block has zero probability")]
    ZeroMassBlock,
    #[error("weights must be a probability vector matching the component count")]
    BadWeights,
    #[error("invalid partition: {0}")]
    BadPartition(String),
    #[error("invalid cubical block: {0}")]
    BadCubicalBlock(String),
    #[error("component count k must be at least 1")]
    BadComponentCount,
    #[error("expected a distribution over the {want} count vectors of {n} trials in {q} categories, got {got} states")]
    BadCountSpace {
        n: usize,
        q: usize,
        want: usize,
        got: usize,
    },
    #[error("network has {units} units, exact enumeration limit is {limit}")]
    TooManyUnits { units: usize, limit: usize },
    #[error("parameter shape mismatch: {0}")]
    BadParamShape(String),
    #[error("subcube enumeration supports binary spaces with at most {limit} axes, got {n}")]
    EnumerationTooLarge { n: usize, limit: usize },
    #[error("k = {k} out of range: requires {condition}")]
    KOutOfRange { k: usize, condition: String },
    #[error("grid needs {evals} evaluations, budget is {budget}")]
    GridTooLarge { evals: u128, budget: u64 },
    #[error("{0}")]
    Unsupported(String),
}
