//! Exact computations with towers of matrix potentials of the commutativity
//! equation `dM ∧ dM = 0`.

pub mod error;
pub mod series;

pub use error::{Error, Result};
pub mod report;
pub mod tower;
pub mod actions;
pub mod rng;
pub mod corpus;
pub mod loopspace;
pub mod normalize;
pub mod kp;
pub mod json;
