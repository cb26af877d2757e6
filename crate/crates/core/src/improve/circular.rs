//! Circular improvements: cycles in the auxiliary multigraph of
//! heaviest-neighbor pairs, extended by per-node talon sets.

use std::collections::{BTreeMap, BTreeSet};

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::conflict::{ConflictGraph, Solution};
use crate::improve::basic::{
    evaluate, heaviest_neighbor, is_local_improvement, second_heaviest_neighbor,
};
use crate::improve::{ImprovementCandidate, ImprovementKind};
use crate::weight::Rat;

#[derive(Debug, Error)]
pub enum CircularError {
    #[error("kappa must satisfy 0 < kappa < 1 with 1/kappa integral, got {0}")]
    InvalidKappa(String),
    #[error("candidate references vertex {0} outside the graph")]
    OutOfRange(usize),
    #[error("candidate lists vertex {0} twice")]
    DuplicateVertex(usize),
    #[error("candidate talon map keys a vertex ({0}) outside the solution")]
    TalonKeyOutsideSolution(usize),
    #[error("candidate inducer {0} lies in the solution")]
    InducerInSolution(usize),
}

/// Multigraph on solution vertices: every u outside the solution with at
/// least two solution-neighbors induces the edge {n(u), n2(u)}. Parallel
/// edges are kept and count as a length-2 cycle.
#[derive(Debug, Clone)]
pub struct AuxiliaryGraph {
    pub edges: Vec<AuxEdge>,
    /// node -> indices into `edges`, sorted.
    pub incident: BTreeMap<usize, Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuxEdge {
    /// The vertex u in V \ A inducing this edge.
    pub inducer: usize,
    /// n(u)
    pub a: usize,
    /// n2(u)
    pub b: usize,
}

impl AuxEdge {
    pub fn other(&self, node: usize) -> usize {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

impl AuxiliaryGraph {
    pub fn node_count(&self) -> usize {
        self.incident.len()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.incident.get(&node).map_or(0, |v| v.len())
    }
}

/// Builds the auxiliary multigraph for the current solution. Deterministic:
/// vertices are scanned in ascending order and the n/n2 tie rule is
/// max weight then min index.
pub fn build_auxiliary(graph: &ConflictGraph, sol: &Solution) -> AuxiliaryGraph {
    let mut edges = Vec::new();
    let mut incident: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for u in 0..graph.len() {
        if sol.contains(u) {
            continue;
        }
        let nu = graph.neighborhood(&[u], sol);
        if nu.len() < 2 {
            continue;
        }
        let a = heaviest_neighbor(graph, sol, u).expect(">= 2 neighbors");
        let b = second_heaviest_neighbor(graph, sol, u).expect(">= 2 neighbors");
        let idx = edges.len();
        edges.push(AuxEdge { inducer: u, a, b });
        incident.entry(a).or_default().push(idx);
        incident.entry(b).or_default().push(idx);
    }
    AuxiliaryGraph { edges, incident }
}

/// A candidate circular improvement: the cycle-inducing vertices U plus the
/// talon sets Y_v attached to the cycle nodes.
#[derive(Debug, Clone)]
pub struct CircularCandidate {
    /// U in cycle order; e_u = {n(u), n2(u)} must form a single cycle.
    pub inducers: Vec<usize>,
    /// v in V(C) -> Y_v (possibly absent for empty Y_v).
    pub talons: BTreeMap<usize, Vec<usize>>,
    /// 1/kappa must be a positive integer.
    pub kappa: Rat,
}

impl CircularCandidate {
    /// X = U ∪ ⋃_v Y_v, sorted.
    pub fn vertex_set(&self) -> Vec<usize> {
        let mut xs: Vec<usize> = self.inducers.clone();
        for ys in self.talons.values() {
            xs.extend(ys.iter().copied());
        }
        xs.sort_unstable();
        xs
    }
}

pub fn kappa_valid(kappa: &Rat) -> bool {
    kappa > &Rat::zero() && kappa < &Rat::one() && (Rat::one() / kappa).is_integer()
}

/// Cycle-length budget floor((8/kappa) * ln|V|); natural logarithm.
pub fn length_bound(kappa: &Rat, num_vertices: usize) -> usize {
    use num::ToPrimitive;
    if num_vertices <= 1 {
        return 0;
    }
    let factor = 8.0 / kappa.to_f64().expect("kappa in (0, 1)");
    (factor * (num_vertices as f64).ln()).floor() as usize
}

/// Checks the three circular-improvement conditions exactly.
///
/// Returns `Ok(false)` whenever a condition fails (the edge multiset is not a
/// cycle, the length budget is exceeded, X is not independent, some talon is
/// not mapped to its heaviest neighbor, or a per-edge inequality fails);
/// errors are reserved for candidates that are not even well-formed.
pub fn verify_circular(
    graph: &ConflictGraph,
    sol: &Solution,
    cand: &CircularCandidate,
) -> Result<bool, CircularError> {
    if !kappa_valid(&cand.kappa) {
        return Err(CircularError::InvalidKappa(cand.kappa.to_string()));
    }
    let mut seen = BTreeSet::new();
    for &v in cand.inducers.iter().chain(cand.talons.values().flatten()) {
        if v >= graph.len() {
            return Err(CircularError::OutOfRange(v));
        }
        if !seen.insert(v) {
            return Err(CircularError::DuplicateVertex(v));
        }
    }
    for &u in &cand.inducers {
        if sol.contains(u) {
            return Err(CircularError::InducerInSolution(u));
        }
    }
    for &v in cand.talons.keys() {
        if !sol.contains(v) {
            return Err(CircularError::TalonKeyOutsideSolution(v));
        }
    }

    // Condition 1: the induced edges form a cycle (parallel pair allowed).
    if cand.inducers.is_empty() {
        return Ok(false);
    }
    let mut cycle_edges = Vec::new();
    for &u in &cand.inducers {
        let nu = graph.neighborhood(&[u], sol);
        if nu.len() < 2 {
            return Ok(false);
        }
        let a = heaviest_neighbor(graph, sol, u).expect(">= 2");
        let b = second_heaviest_neighbor(graph, sol, u).expect(">= 2");
        cycle_edges.push((u, a, b));
    }
    let nodes: BTreeSet<usize> = cycle_edges.iter().flat_map(|&(_, a, b)| [a, b]).collect();
    if cycle_edges.len() != nodes.len() || cycle_edges.len() < 2 {
        return Ok(false);
    }
    let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(_, a, b) in &cycle_edges {
        *degree.entry(a).or_insert(0) += 1;
        *degree.entry(b).or_insert(0) += 1;
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if degree.values().any(|&d| d != 2) {
        return Ok(false);
    }
    // Connectivity over the cycle's node set.
    let start = *nodes.iter().next().unwrap();
    let mut stack = vec![start];
    let mut reached = BTreeSet::from([start]);
    while let Some(x) = stack.pop() {
        for &y in &adj[&x] {
            if reached.insert(y) {
                stack.push(y);
            }
        }
    }
    if reached.len() != nodes.len() {
        return Ok(false);
    }

    // Length budget on |U|.
    if cand.inducers.len() > length_bound(&cand.kappa, graph.len()) {
        return Ok(false);
    }

    // Condition 2: X = U ⊎ ⨄ Y_v with Y_v = {x : n(x) = v} ⊆ V \ A, and all
    // talon owners lie on the cycle.
    let xs = cand.vertex_set();
    for (&v, ys) in &cand.talons {
        if !ys.is_empty() && !nodes.contains(&v) {
            return Ok(false);
        }
        for &x in ys {
            if sol.contains(x) {
                return Ok(false);
            }
            if heaviest_neighbor(graph, sol, x) != Some(v) {
                return Ok(false);
            }
        }
        if ys.len() > graph.k() {
            return Ok(false);
        }
    }
    if !graph.is_independent(&xs) {
        return Ok(false);
    }

    // Condition 3: the per-edge inequality, exactly.
    let two = Rat::from_integer(2.into());
    let sq_rest = |x: usize, excl: &[usize]| -> Rat {
        graph
            .neighborhood(&[x], sol)
            .iter()
            .filter(|v| !excl.contains(v))
            .map(|&v| graph.weight(v).sq())
            .sum()
    };
    let empty: Vec<usize> = Vec::new();
    for &(u, a, b) in &cycle_edges {
        let ya = cand.talons.get(&a).unwrap_or(&empty);
        let yb = cand.talons.get(&b).unwrap_or(&empty);
        let sq_of = |ys: &Vec<usize>| -> Rat { ys.iter().map(|&x| graph.weight(x).sq()).sum() };
        let lhs = graph.weight(u).sq() + (sq_of(ya) + sq_of(yb)) / &two;
        let mut rhs = (graph.weight(a).sq() + graph.weight(b).sq()) / &two + sq_rest(u, &[a, b]);
        for &x in ya {
            rhs += sq_rest(x, &[a]) / &two;
        }
        for &x in yb {
            rhs += sq_rest(x, &[b]) / &two;
        }
        if lhs <= rhs {
            return Ok(false);
        }
    }

    // The per-edge inequalities summed over the cycle guarantee a local
    // improvement; cross-check the global predicate as well.
    let (improves, gain) = is_local_improvement(graph, &xs, sol).expect("X independent");
    assert!(
        improves && gain.is_positive(),
        "per-edge inequalities held but X is not a local improvement"
    );
    Ok(true)
}

/// Searches for a verified circular improvement.
///
/// Sound: every returned candidate passes [`verify_circular`]. Complete up to
/// the exploration budget: simple cycles in the auxiliary multigraph are
/// enumerated from each start node in ascending order, depth-limited by the
/// kappa length budget, and each cycle is extended greedily by talon sets
/// (descending margin w^2(x) - w^2(N(x,A) \ {v}), positive margins only).
/// Candidates failing verification are discarded.
pub fn find_circular_improvement(
    graph: &ConflictGraph,
    sol: &Solution,
    kappa: &Rat,
) -> Result<Option<(CircularCandidate, ImprovementCandidate)>, CircularError> {
    if !kappa_valid(kappa) {
        return Err(CircularError::InvalidKappa(kappa.to_string()));
    }
    let aux = build_auxiliary(graph, sol);
    if aux.edges.is_empty() {
        return Ok(None);
    }
    let budget = length_bound(kappa, graph.len());
    if budget < 2 {
        return Ok(None);
    }

    // Exhaustive below this many DFS steps, best-effort beyond.
    const STEP_BUDGET: u64 = 5_000_000;
    let mut steps: u64 = 0;

    let nodes: Vec<usize> = aux.incident.keys().copied().collect();
    for &start in &nodes {
        let mut path_edges: Vec<usize> = Vec::new();
        let mut visited: BTreeSet<usize> = BTreeSet::from([start]);
        if let Some(hit) = dfs_cycles(
            graph,
            sol,
            &aux,
            kappa,
            start,
            start,
            budget,
            &mut path_edges,
            &mut visited,
            &mut steps,
            STEP_BUDGET,
        )? {
            return Ok(Some(hit));
        }
        if steps >= STEP_BUDGET {
            break;
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn dfs_cycles(
    graph: &ConflictGraph,
    sol: &Solution,
    aux: &AuxiliaryGraph,
    kappa: &Rat,
    start: usize,
    current: usize,
    budget: usize,
    path_edges: &mut Vec<usize>,
    visited: &mut BTreeSet<usize>,
    steps: &mut u64,
    step_budget: u64,
) -> Result<Option<(CircularCandidate, ImprovementCandidate)>, CircularError> {
    for (ei, edge) in aux.edges.iter().enumerate() {
        if *steps >= step_budget {
            return Ok(None);
        }
        *steps += 1;
        if edge.a != current && edge.b != current {
            continue;
        }
        if path_edges.contains(&ei) {
            continue;
        }
        let next = edge.other(current);
        if next == start {
            if !path_edges.is_empty() {
                path_edges.push(ei);
                let inducers: Vec<usize> =
                    path_edges.iter().map(|&e| aux.edges[e].inducer).collect();
                let result = try_candidate(graph, sol, kappa, &inducers)?;
                path_edges.pop();
                if result.is_some() {
                    return Ok(result);
                }
            }
            continue;
        }
        // Only descend to unvisited nodes with indices above the start so
        // each cycle is generated from its smallest node once.
        if next < start || visited.contains(&next) {
            continue;
        }
        if path_edges.len() + 1 >= budget {
            continue;
        }
        path_edges.push(ei);
        visited.insert(next);
        let hit = dfs_cycles(
            graph,
            sol,
            aux,
            kappa,
            start,
            next,
            budget,
            path_edges,
            visited,
            steps,
            step_budget,
        )?;
        visited.remove(&next);
        path_edges.pop();
        if hit.is_some() {
            return Ok(hit);
        }
    }
    Ok(None)
}

/// Attaches greedy talon sets to a cycle and verifies the result.
fn try_candidate(
    graph: &ConflictGraph,
    sol: &Solution,
    kappa: &Rat,
    inducers: &[usize],
) -> Result<Option<(CircularCandidate, ImprovementCandidate)>, CircularError> {
    let inducer_set: BTreeSet<usize> = inducers.iter().copied().collect();
    if inducer_set.len() != inducers.len() {
        return Ok(None);
    }
    let mut cycle_nodes = BTreeSet::new();
    for &u in inducers {
        cycle_nodes.insert(heaviest_neighbor(graph, sol, u).expect("inducer has neighbors"));
        cycle_nodes.insert(second_heaviest_neighbor(graph, sol, u).expect("inducer has >= 2"));
    }

    // Candidate talons per cycle node: x outside A and U with n(x) = v and
    // positive margin, by descending margin then index.
    let mut chosen: Vec<usize> = inducers.to_vec();
    let mut talons: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &v in &cycle_nodes {
        let mut options: Vec<(Rat, usize)> = Vec::new();
        for &x in graph.neighbors(v) {
            if sol.contains(x) || inducer_set.contains(&x) {
                continue;
            }
            if heaviest_neighbor(graph, sol, x) != Some(v) {
                continue;
            }
            let rest: Rat = graph
                .neighborhood(&[x], sol)
                .iter()
                .filter(|&&z| z != v)
                .map(|&z| graph.weight(z).sq())
                .sum();
            let margin = graph.weight(x).sq() - rest;
            if margin.is_positive() {
                options.push((margin, x));
            }
        }
        options.sort_by(|(ma, a), (mb, b)| mb.cmp(ma).then(a.cmp(b)));
        for (_, x) in options {
            if chosen.iter().all(|&c| !graph.adjacent(c, x)) {
                chosen.push(x);
                talons.entry(v).or_default().push(x);
            }
        }
    }

    let cand = CircularCandidate {
        inducers: inducers.to_vec(),
        talons,
        kappa: kappa.clone(),
    };
    if verify_circular(graph, sol, &cand)? {
        let xs = cand.vertex_set();
        let imp = evaluate(graph, &xs, sol, ImprovementKind::Circular).expect("verified X");
        Ok(Some((cand, imp)))
    } else {
        Ok(None)
    }
}
