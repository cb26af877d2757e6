//! Squared-weight local improvements: the improvement predicate, exhaustive
//! bounded-size search, claw-shaped search, and charges/contributions.

use std::collections::BTreeMap;

use num::Zero;
use thiserror::Error;

use crate::conflict::{ConflictGraph, Solution};
use crate::improve::{ImprovementCandidate, ImprovementKind};
use crate::weight::Rat;

#[derive(Debug, Error)]
pub enum ImproveError {
    #[error("candidate set is not independent: {a} conflicts with {b}")]
    NotIndependent { a: usize, b: usize },
    #[error("vertex {0} has no neighbor in the solution; solution is not maximal")]
    EmptyNeighborhood(usize),
}

fn sq_sum(graph: &ConflictGraph, vs: &[usize]) -> Rat {
    vs.iter().map(|&v| graph.weight(v).sq()).sum()
}

/// Evaluates X against A: displaced set N(X, A) and exact gain
/// w^2(X) - w^2(N(X, A)). Errors if X is not independent.
pub fn evaluate(
    graph: &ConflictGraph,
    xs: &[usize],
    sol: &Solution,
    kind: ImprovementKind,
) -> Result<ImprovementCandidate, ImproveError> {
    for (i, &a) in xs.iter().enumerate() {
        for &b in &xs[i + 1..] {
            if a == b || graph.adjacent(a, b) {
                return Err(ImproveError::NotIndependent { a, b });
            }
        }
    }
    let mut vertices: Vec<usize> = xs.to_vec();
    vertices.sort_unstable();
    let displaced = graph.neighborhood(&vertices, sol);
    let gain = sq_sum(graph, &vertices) - sq_sum(graph, &displaced);
    Ok(ImprovementCandidate {
        vertices,
        displaced,
        gain,
        kind,
    })
}

/// Exact strict test w^2(X) > w^2(N(X, A)), with the gain.
pub fn is_local_improvement(
    graph: &ConflictGraph,
    xs: &[usize],
    sol: &Solution,
) -> Result<(bool, Rat), ImproveError> {
    let cand = evaluate(graph, xs, sol, ImprovementKind::Small)?;
    Ok((cand.is_improvement(), cand.gain))
}

/// Exhaustive search for an improving independent X ⊆ V \ A with
/// |X| <= max_size. Deterministic: depth-first over ascending vertex
/// indices, first hit returned.
pub fn find_small_improvement(
    graph: &ConflictGraph,
    sol: &Solution,
    max_size: usize,
) -> Option<ImprovementCandidate> {
    let candidates: Vec<usize> = (0..graph.len()).filter(|&v| !sol.contains(v)).collect();

    struct Dfs<'a> {
        graph: &'a ConflictGraph,
        sol: &'a Solution,
        candidates: &'a [usize],
        max_size: usize,
        chosen: Vec<usize>,
    }
    impl Dfs<'_> {
        fn run(&mut self, start: usize) -> Option<Vec<usize>> {
            for i in start..self.candidates.len() {
                let v = self.candidates[i];
                if self.chosen.iter().any(|&u| self.graph.adjacent(u, v)) {
                    continue;
                }
                self.chosen.push(v);
                let displaced = self.graph.neighborhood(&self.chosen, self.sol);
                let gain = sq_sum(self.graph, &self.chosen) - sq_sum(self.graph, &displaced);
                if gain > Rat::zero() {
                    return Some(self.chosen.clone());
                }
                if self.chosen.len() < self.max_size {
                    if let Some(hit) = self.run(i + 1) {
                        return Some(hit);
                    }
                }
                self.chosen.pop();
            }
            None
        }
    }

    let mut dfs = Dfs {
        graph,
        sol,
        candidates: &candidates,
        max_size,
        chosen: Vec::new(),
    };
    let xs = dfs.run(0)?;
    Some(evaluate(graph, &xs, sol, ImprovementKind::Small).expect("chosen set is independent"))
}

/// Complete search for a claw-shaped improvement: either a single vertex with
/// no neighbors in A, or the talon set of a claw centered at some v in A with
/// w^2(T) > w^2(N(T, A)).
///
/// For each center the search enumerates independent talon subsets of the
/// center's out-of-solution neighborhood (at most k by claw-freeness),
/// candidates ordered by decreasing per-talon margin
/// w^2(u) - w^2(N(u, A) \ {v}); a branch is cut when even collecting every
/// remaining squared weight cannot make the gain positive.
pub fn find_claw_shaped_improvement(
    graph: &ConflictGraph,
    sol: &Solution,
) -> Option<ImprovementCandidate> {
    // Lone unblocked vertex.
    for v in 0..graph.len() {
        if !sol.contains(v) && !graph.neighbors(v).iter().any(|&u| sol.contains(u)) {
            return Some(
                evaluate(graph, &[v], sol, ImprovementKind::Claw).expect("singleton independent"),
            );
        }
    }

    for center in sol.iter() {
        let mut cands: Vec<usize> = graph
            .neighbors(center)
            .iter()
            .copied()
            .filter(|&u| !sol.contains(u))
            .collect();
        if cands.is_empty() {
            continue;
        }
        // Margin of u at this center: w^2(u) - w^2(N(u, A) \ {center}).
        let margins: BTreeMap<usize, Rat> = cands
            .iter()
            .map(|&u| {
                let nu = graph.neighborhood(&[u], sol);
                let rest: Rat = nu
                    .iter()
                    .filter(|&&x| x != center)
                    .map(|&x| graph.weight(x).sq())
                    .sum();
                (u, graph.weight(u).sq() - rest)
            })
            .collect();
        cands.sort_by(|a, b| margins[b].cmp(&margins[a]).then(a.cmp(b)));

        // Suffix sums of squared weights for the pruning bound.
        let mut suffix = vec![Rat::zero(); cands.len() + 1];
        for i in (0..cands.len()).rev() {
            suffix[i] = &suffix[i + 1] + graph.weight(cands[i]).sq();
        }

        struct Dfs<'a> {
            graph: &'a ConflictGraph,
            sol: &'a Solution,
            cands: &'a [usize],
            suffix: &'a [Rat],
            talons: Vec<usize>,
        }
        impl Dfs<'_> {
            fn run(&mut self, start: usize, current_gain: &Rat) -> Option<Vec<usize>> {
                for i in start..self.cands.len() {
                    // Even taking every remaining talon for free cannot help.
                    if current_gain + &self.suffix[i] <= Rat::zero() {
                        return None;
                    }
                    let t = self.cands[i];
                    if self.talons.iter().any(|&x| self.graph.adjacent(x, t)) {
                        continue;
                    }
                    self.talons.push(t);
                    let displaced = self.graph.neighborhood(&self.talons, self.sol);
                    let gain = sq_sum(self.graph, &self.talons) - sq_sum(self.graph, &displaced);
                    if gain > Rat::zero() {
                        return Some(self.talons.clone());
                    }
                    if let Some(hit) = self.run(i + 1, &gain) {
                        return Some(hit);
                    }
                    self.talons.pop();
                }
                None
            }
        }
        let mut dfs = Dfs {
            graph,
            sol,
            cands: &cands,
            suffix: &suffix,
            talons: Vec::new(),
        };
        if let Some(xs) = dfs.run(0, &Rat::zero()) {
            return Some(
                evaluate(graph, &xs, sol, ImprovementKind::Claw).expect("talons independent"),
            );
        }
    }
    None
}

/// Heaviest solution-neighbor n(u); ties broken by smallest vertex index.
/// For u in A this is u itself (N(u, A) = {u} for independent A).
pub fn heaviest_neighbor(graph: &ConflictGraph, sol: &Solution, u: usize) -> Option<usize> {
    graph.neighborhood(&[u], sol).into_iter().max_by(|a, b| {
        graph.weight(*a).cmp(graph.weight(*b)).then(b.cmp(a)) // prefer the smaller index on weight ties
    })
}

/// Second-heaviest solution-neighbor n2(u), under the same tie rule,
/// defined when |N(u, A)| >= 2.
pub fn second_heaviest_neighbor(graph: &ConflictGraph, sol: &Solution, u: usize) -> Option<usize> {
    let first = heaviest_neighbor(graph, sol, u)?;
    graph
        .neighborhood(&[u], sol)
        .into_iter()
        .filter(|&v| v != first)
        .max_by(|a, b| graph.weight(*a).cmp(graph.weight(*b)).then(b.cmp(a)))
}

/// contr(u, v): 0 if v ∉ N(u, A), else
/// max{0, (w^2(u) - w^2(N(u, A) \ {v})) / w(v)}.
pub fn contribution(graph: &ConflictGraph, sol: &Solution, u: usize, v: usize) -> Rat {
    let nu = graph.neighborhood(&[u], sol);
    if nu.binary_search(&v).is_err() {
        return Rat::zero();
    }
    let rest: Rat = nu
        .iter()
        .filter(|&&x| x != v)
        .map(|&x| graph.weight(x).sq())
        .sum();
    let raw = (graph.weight(u).sq() - rest) / graph.weight(v).rat();
    raw.max(Rat::zero())
}

/// The charge bookkeeping of the weight-distribution argument: each u in the
/// reference solution sends w(u) - w(N(u, A))/2 to its heaviest neighbor
/// n(u) and nothing elsewhere.
#[derive(Debug, Clone)]
pub struct ChargeMap {
    /// u -> n(u)
    pub heaviest: BTreeMap<usize, usize>,
    /// u -> charge(u, n(u)), may be negative.
    pub charge: BTreeMap<usize, Rat>,
}

impl ChargeMap {
    pub fn charge_at(&self, u: usize, v: usize) -> Rat {
        match self.heaviest.get(&u) {
            Some(&n) if n == v => self.charge[&u].clone(),
            _ => Rat::zero(),
        }
    }
}

/// Computes charges of an independent reference set against A. Errors if some
/// reference vertex has no neighbor in A (A not maximal).
pub fn compute_charges(
    graph: &ConflictGraph,
    sol: &Solution,
    reference: &[usize],
) -> Result<ChargeMap, ImproveError> {
    let mut heaviest = BTreeMap::new();
    let mut charge = BTreeMap::new();
    for &u in reference {
        let nu = graph.neighborhood(&[u], sol);
        if nu.is_empty() {
            return Err(ImproveError::EmptyNeighborhood(u));
        }
        let n = heaviest_neighbor(graph, sol, u).expect("nonempty neighborhood");
        let total: Rat = nu.iter().map(|&x| graph.weight(x).rat().clone()).sum();
        let c = graph.weight(u).rat().clone() - total / Rat::from_integer(2.into());
        heaviest.insert(u, n);
        charge.insert(u, c);
    }
    Ok(ChargeMap { heaviest, charge })
}
