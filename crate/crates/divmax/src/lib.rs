//! Information divergence from discrete statistical models.
//!
//! Tools for measuring how far a distribution on a finite product space can
//! lie from a model: exact rI-projections where they exist in closed form,
//! iterative fits where they do not, explicit families of maximizing
//! distributions, and upper/lower bounds on the maximal divergence with
//! checkable witnesses.

pub mod bounds;
pub mod codes;
pub mod dist;
pub mod error;
pub mod maximize;
pub mod maximizers;
pub mod model_spec;
pub mod models;
pub mod partition;
pub mod space;
pub mod subcubes;

pub use dist::{Dist, ExtReal};
pub use error::{Error, Result};
pub use space::StateSpace;
