//! Local-improvement searches over a solution snapshot.
//!
//! `basic` holds the squared-weight improvement predicate, the bounded-size
//! and claw-shaped searches, and the charge/contribution calculus. `circular`
//! adds the auxiliary-multigraph machinery for logarithmic-size cycles, and
//! `unweighted` the helpful-vertex classification plus the black-box sweep.

pub mod basic;
pub mod circular;
pub mod unweighted;

use serde::Serialize;

use crate::weight::Rat;

/// What kind of search produced an improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImprovementKind {
    Small,
    Claw,
    Circular,
    BlackBox,
}

/// A candidate replacement set X with its displaced neighborhood and exact
/// squared-weight gain. `is_improvement` iff `gain > 0` strictly.
#[derive(Debug, Clone)]
pub struct ImprovementCandidate {
    /// X, sorted ascending. Always disjoint from the solution it was built
    /// against (searches range over V \ A).
    pub vertices: Vec<usize>,
    /// N(X, A), sorted ascending.
    pub displaced: Vec<usize>,
    /// w^2(X) - w^2(N(X, A)), exact.
    pub gain: Rat,
    pub kind: ImprovementKind,
}

impl ImprovementCandidate {
    pub fn is_improvement(&self) -> bool {
        use num::Zero;
        self.gain > Rat::zero()
    }
}
