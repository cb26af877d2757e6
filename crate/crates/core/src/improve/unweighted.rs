//! Helpful-vertex classification and the unweighted black-box stage.
//!
//! A vertex outside the solution is helpful for its heaviest neighbor(s) when
//! its weight profile matches the near-unit-weight pattern of the worst-case
//! instances; the sweep builds weight-thresholded sub-instances out of
//! helpful vertices, strips the weights, runs an engine, and tests the
//! upper-truncated prefixes of its answer for a squared-weight improvement.

use std::collections::BTreeSet;

use num::{One, Zero};

use crate::conflict::{ConflictGraph, Solution};
use crate::improve::basic::{evaluate, heaviest_neighbor, second_heaviest_neighbor};
use crate::improve::{ImprovementCandidate, ImprovementKind};
use crate::mis::{solve_checked, MisEngine, MisError, MisView};
use crate::weight::Rat;

/// Per-vertex helpfulness data for a fixed tolerance eps.
#[derive(Debug, Clone)]
pub struct HelpfulClassification {
    pub eps: Rat,
    /// n(u) for every vertex with a solution neighbor.
    pub n1: Vec<Option<usize>>,
    /// n2(u) where |N(u, A)| >= 2.
    pub n2: Vec<Option<usize>>,
    /// help(u) for u outside the solution: empty, {n1}, or {n1, n2}; sorted.
    pub help_of: Vec<Vec<usize>>,
    /// help(v) for v in the solution: all u with v in help(u); sorted.
    pub helped_by: Vec<Vec<usize>>,
    /// All u with help(u) nonempty, ascending.
    pub v_help: Vec<usize>,
}

/// Classifies every vertex outside the maximal solution `sol`.
///
/// Case 1 makes u helpful for n(u) alone: w(n(u)) <= (1+eps) w(u) and
/// w(N(u,A) \ {n(u)}) <= eps w(u). Case 2 makes it helpful for both n(u) and
/// n2(u): their weights fall within a (1+eps) factor of each other and of
/// w(u), and the rest of the neighborhood weighs at most eps w(u).
pub fn classify_helpful(graph: &ConflictGraph, sol: &Solution, eps: &Rat) -> HelpfulClassification {
    assert!(eps > &Rat::zero(), "eps must be positive");
    let n = graph.len();
    let one_plus = Rat::one() + eps;
    let mut n1 = vec![None; n];
    let mut n2 = vec![None; n];
    let mut help_of = vec![Vec::new(); n];
    let mut helped_by = vec![Vec::new(); n];
    let mut v_help = Vec::new();

    for u in 0..n {
        let first = heaviest_neighbor(graph, sol, u);
        let second = second_heaviest_neighbor(graph, sol, u);
        n1[u] = first;
        n2[u] = second;
        if sol.contains(u) {
            continue;
        }
        let Some(a) = first else { continue };
        let wu = graph.weight(u).rat();
        let nu = graph.neighborhood(&[u], sol);
        let total: Rat = nu.iter().map(|&x| graph.weight(x).rat().clone()).sum();
        let mut help = BTreeSet::new();

        // Case 1: heaviest neighbor close above, remainder negligible.
        let rest1 = &total - graph.weight(a).rat();
        if graph.weight(a).rat() <= &(&one_plus * wu) && rest1 <= eps * wu {
            help.insert(a);
        }
        // Case 2: two heaviest close to each other and to u.
        if let Some(b) = second {
            let wa = graph.weight(a).rat();
            let wb = graph.weight(b).rat();
            let rest2 = &total - wa - wb;
            if wa <= &(&one_plus * wu) && wb <= wa && wa <= &(&one_plus * wb) && rest2 <= eps * wu {
                help.insert(a);
                help.insert(b);
            }
        }
        if !help.is_empty() {
            v_help.push(u);
            for &v in &help {
                helped_by[v].push(u);
            }
            help_of[u] = help.into_iter().collect();
        }
    }
    HelpfulClassification {
        eps: eps.clone(),
        n1,
        n2,
        help_of,
        helped_by,
        v_help,
    }
}

/// The thresholded vertex sets of the sweep: A_{>=L} and
/// V_{>=L} = A_{>=L} ∪ {u helpful: w(u) >= L and help(u) ⊆ A_{>=L}}.
pub fn thresholded_sets(
    graph: &ConflictGraph,
    sol: &Solution,
    cls: &HelpfulClassification,
    level: &Rat,
) -> (Vec<usize>, Vec<usize>) {
    let a_geq: Vec<usize> = sol
        .iter()
        .filter(|&v| graph.weight(v).rat() >= level)
        .collect();
    let a_set: BTreeSet<usize> = a_geq.iter().copied().collect();
    let mut v_geq = a_geq.clone();
    for &u in &cls.v_help {
        if graph.weight(u).rat() >= level && cls.help_of[u].iter().all(|v| a_set.contains(v)) {
            v_geq.push(u);
        }
    }
    v_geq.sort_unstable();
    (a_geq, v_geq)
}

/// Distinct vertex weights, descending.
fn distinct_weights_desc(graph: &ConflictGraph) -> Vec<Rat> {
    let mut ws: Vec<Rat> = (0..graph.len())
        .map(|v| graph.weight(v).rat().clone())
        .collect();
    ws.sort();
    ws.dedup();
    ws.reverse();
    ws
}

/// The black-box stage of an iteration: for each lower threshold L
/// (descending) run the engine on the weight-stripped sub-instance V_{>=L},
/// drop solution members from its answer, and scan upper thresholds U
/// (ascending) for the first prefix X^{<=U} that improves against the full
/// solution. Engine failures propagate.
pub fn black_box_sweep(
    graph: &ConflictGraph,
    sol: &Solution,
    cls: &HelpfulClassification,
    engine: &dyn MisEngine,
) -> Result<Option<ImprovementCandidate>, MisError> {
    let weights = distinct_weights_desc(graph);
    for level in &weights {
        let (a_geq, v_geq) = thresholded_sets(graph, sol, cls, level);
        if v_geq.is_empty() {
            continue;
        }
        debug_assert!(check_thresholded_invariants(
            graph, sol, cls, &a_geq, &v_geq
        ));
        let (sub, back) = graph.induced_subgraph(&v_geq);
        let bar = solve_checked(engine, &MisView::of(&sub))?;
        let mut xs: Vec<usize> = bar
            .into_iter()
            .map(|v| back[v])
            .filter(|&v| !sol.contains(v))
            .collect();
        xs.sort_unstable();
        if xs.is_empty() {
            continue;
        }
        let mut last_len = usize::MAX;
        for upper in weights.iter().rev() {
            let prefix: Vec<usize> = xs
                .iter()
                .copied()
                .filter(|&v| graph.weight(v).rat() <= upper)
                .collect();
            if prefix.is_empty() || prefix.len() == last_len {
                continue;
            }
            last_len = prefix.len();
            let cand = evaluate(graph, &prefix, sol, ImprovementKind::BlackBox)
                .expect("subset of an independent set");
            if cand.is_improvement() {
                return Ok(Some(cand));
            }
        }
    }
    Ok(None)
}

/// Structural facts used by the analysis: inside V_{>=L}, every outside
/// vertex has all its solution-neighbors within a (1+eps) weight factor, and
/// its neighbors below the threshold weigh at most eps w(u) in total.
fn check_thresholded_invariants(
    graph: &ConflictGraph,
    sol: &Solution,
    cls: &HelpfulClassification,
    a_geq: &[usize],
    v_geq: &[usize],
) -> bool {
    let a_set: BTreeSet<usize> = a_geq.iter().copied().collect();
    let one_plus = Rat::one() + &cls.eps;
    for &u in v_geq {
        if sol.contains(u) {
            continue;
        }
        let wu = graph.weight(u).rat();
        let nu = graph.neighborhood(&[u], sol);
        for &v in &nu {
            if graph.weight(v).rat() > &(&one_plus * wu) {
                return false;
            }
        }
        let below: Rat = nu
            .iter()
            .filter(|v| !a_set.contains(v))
            .map(|&v| graph.weight(v).rat().clone())
            .sum();
        if below > &cls.eps * wu {
            return false;
        }
    }
    true
}
