//! Exact-arithmetic fair division of indivisible chores: approximate-EFX and
//! transfer-EFX constructions, each output checked by brute force.

pub mod allocation;
pub mod chores;
pub mod envy_graph;
pub mod error;
pub mod fairness;
pub mod ido;
pub mod instance;
pub mod oracles;
pub mod rational;
pub mod round_robin;
pub mod tefx;
pub mod three_agent;
pub mod verify;

pub use allocation::Allocation;
pub use chores::ChoreSet;
pub use error::{Error, Result};
pub use fairness::{Criterion, FairnessReport, Witness};
pub use instance::{CostTable, CostView, Instance};
pub use oracles::CostOracle;
pub use rational::Rational;
