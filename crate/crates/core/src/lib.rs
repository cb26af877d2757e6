//! Solver library for the weighted k-set packing problem.
//!
//! The solver runs squared-weight local search over the conflict graph of an
//! instance: bounded-size improvements, claw-shaped improvements, circular
//! improvements built from short cycles in an auxiliary multigraph, and a
//! black-box stage that strips weights from near-uniform sub-instances and
//! feeds them to a pluggable unweighted independent-set engine.
//!
//! Alongside the solver live an exact branch-and-bound oracle, generators
//! for two adversarial instance families, and an analysis toolkit that
//! evaluates the structural quantities behind the approximation bound
//! (charges, contributions, missing/special/support classifications) on
//! concrete instances. All of it runs on exact rational arithmetic.

pub mod analysis;
pub mod conflict;
pub mod generate;
pub mod improve;
pub mod instance;
pub mod mis;
pub mod oracle;
pub mod report;
pub mod solver;
pub mod weight;

pub use conflict::{ConflictGraph, Solution};
pub use instance::{Instance, LabeledInstance, SetDef};
pub use solver::{solve, SolverConfig};
pub use weight::{Rat, Weight};
