//! Solver orchestration: scaling/truncation preprocessing, the iteration
//! loop, and per-iteration dispatch across the four improvement searches.

use num::{BigInt, One, Signed, Zero};
use thiserror::Error;

use crate::analysis::{eps_default, kappa_for};
use crate::conflict::{ConflictGraph, Solution, SolutionError};
use crate::improve::basic::{find_claw_shaped_improvement, find_small_improvement};
use crate::improve::circular::{find_circular_improvement, CircularError};
use crate::improve::unweighted::{black_box_sweep, classify_helpful};
use crate::improve::{ImprovementCandidate, ImprovementKind};
use crate::instance::{Instance, InstanceError, SetDef};
use crate::mis::{MisEngine, MisError};
use crate::weight::{Rat, Weight};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("cannot scale an empty instance")]
    EmptyInstance,
    #[error("delta must be positive, got {0}")]
    BadDelta(String),
    #[error(transparent)]
    Circular(#[from] CircularError),
    #[error(transparent)]
    Mis(#[from] MisError),
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(
        "iteration cap {cap} exceeded; the squared-weight potential must increase \
         strictly per iteration, so this signals a monotonicity bug"
    )]
    IterationCapExceeded { cap: u64 },
}

/// Solver parameters. `eps` and `kappa` default per instance k when `None`.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub eps: Option<Rat>,
    pub kappa: Option<Rat>,
    /// Scaling slack; the scaled run loses at most a (1+delta) factor.
    pub delta: Rat,
    /// Run the scale-and-truncate phase first (default). The exact phase
    /// always runs afterwards so the returned solution admits no improvement
    /// under the original weights.
    pub scaling: bool,
    /// Size cap for the bounded exhaustive search.
    pub max_small: usize,
    /// Safety cap; `None` picks 10x the scaled-phase iteration bound.
    pub iteration_cap: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            eps: None,
            kappa: None,
            delta: Rat::new(BigInt::from(1), BigInt::from(10)),
            scaling: true,
            max_small: 3,
            iteration_cap: None,
        }
    }
}

/// Concrete per-iteration parameters once the instance is known.
#[derive(Debug, Clone)]
pub struct IterationParams {
    pub eps: Rat,
    pub kappa: Rat,
    pub max_small: usize,
}

impl SolverConfig {
    pub fn params_for(&self, k: usize) -> IterationParams {
        let eps = self.eps.clone().unwrap_or_else(|| eps_default(k));
        let kappa = self.kappa.clone().unwrap_or_else(|| kappa_for(&eps));
        IterationParams {
            eps,
            kappa,
            max_small: self.max_small,
        }
    }

    /// Worst-case improving-iteration count of the scaled phase:
    /// k^2 (1/delta + 2)^2 |S|^2 + 1.
    pub fn scaled_iteration_bound(&self, k: usize, num_sets: usize) -> Rat {
        let k = Rat::from_integer(BigInt::from(k as u64));
        let s = Rat::from_integer(BigInt::from(num_sets as u64));
        let inner = Rat::one() / &self.delta + Rat::from_integer(BigInt::from(2));
        &k * &k * &inner * &inner * &s * &s + Rat::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Scaled,
    Exact,
}

/// One applied improvement (or the final no-op), with the potential after it.
#[derive(Debug, Clone, serde::Serialize)]
pub struct IterationRecord {
    pub phase: Phase,
    /// `None` marks the terminating iteration that found nothing.
    pub kind: Option<ImprovementKind>,
    pub size: usize,
    #[serde(serialize_with = "crate::report::ser_rat")]
    pub gain: Rat,
    #[serde(serialize_with = "crate::report::ser_rat")]
    pub weight: Rat,
    #[serde(serialize_with = "crate::report::ser_rat")]
    pub sq_weight: Rat,
}

#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
    /// Improving iterations in the scaled (truncated-weight) phase.
    pub scaled_iterations: u64,
    /// Improving iterations in the exact phase on original weights.
    pub exact_iterations: u64,
}

#[derive(Debug)]
pub struct SolveOutcome {
    /// Terminal solution as indices into the original instance.
    pub indices: Vec<usize>,
    pub ids: Vec<String>,
    /// Exact weight under the original weight function.
    pub weight: Rat,
    pub sq_weight: Rat,
    pub trace: RunTrace,
}

/// Metadata of a scale-and-truncate pass.
#[derive(Debug, Clone)]
pub struct ScaleInfo {
    /// Multiplier applied to every weight before truncation.
    pub factor: Rat,
    /// N = ceil(1/delta + 1).
    pub n_param: BigInt,
    /// Greedy solution weight under the original weights.
    pub greedy_weight: Rat,
    /// Original indices of the sets that survived truncation, in order.
    pub kept: Vec<usize>,
}

/// Greedy maximal solution in decreasing weight order (ties by index).
pub fn greedy_indices(graph: &ConflictGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..graph.len()).collect();
    order.sort_by(|&a, &b| graph.weight(b).cmp(graph.weight(a)).then(a.cmp(&b)));
    let mut sol = Solution::empty(graph);
    for v in order {
        let _ = sol.insert(graph, v);
    }
    sol.indices()
}

/// Rescales so the greedy solution weighs exactly N * |S| with
/// N = ceil(1/delta + 1), truncates every weight to its integer floor, and
/// drops zero-weight sets. The result has integral weights, so the squared
/// potential gains at least 1 per improving iteration.
pub fn scale_and_truncate(
    instance: &Instance,
    delta: &Rat,
) -> Result<(Instance, ScaleInfo), SolveError> {
    if instance.is_empty() {
        return Err(SolveError::EmptyInstance);
    }
    if !delta.is_positive() {
        return Err(SolveError::BadDelta(delta.to_string()));
    }
    let graph = ConflictGraph::build(instance);
    let greedy = greedy_indices(&graph);
    let greedy_weight: Rat = greedy.iter().map(|&v| graph.weight(v).rat().clone()).sum();
    let n_param = (Rat::one() / delta + Rat::one()).ceil().to_integer();
    let target = Rat::from_integer(&n_param * BigInt::from(instance.len() as u64));
    let factor = &target / &greedy_weight;

    let mut kept = Vec::new();
    let mut sets = Vec::new();
    for (i, set) in instance.sets().iter().enumerate() {
        let truncated = (set.weight.rat() * &factor).floor();
        if truncated.is_zero() {
            continue;
        }
        kept.push(i);
        sets.push(SetDef {
            id: set.id.clone(),
            elements: set.elements.clone(),
            weight: Weight::new(truncated).expect("positive after floor"),
        });
    }
    let truncated_instance = Instance::new(instance.k(), sets)?;
    Ok((
        truncated_instance,
        ScaleInfo {
            factor,
            n_param,
            greedy_weight,
            kept,
        },
    ))
}

/// One call of the iteration subroutine: tries, in order, the bounded
/// exhaustive search, the claw-shaped search, the circular search, and the
/// unweighted black-box sweep; applies the first hit as
/// A <- (A \ N(X, A)) ∪ X.
pub fn run_iteration(
    graph: &ConflictGraph,
    sol: &mut Solution,
    params: &IterationParams,
    engine: &dyn MisEngine,
) -> Result<Option<ImprovementCandidate>, SolveError> {
    let found = find_improvement(graph, sol, params, engine)?;
    if let Some(cand) = &found {
        debug_assert!(cand.is_improvement());
        sol.apply(graph, &cand.vertices)?;
    }
    Ok(found)
}

/// The search cascade of an iteration, without applying the result.
pub fn find_improvement(
    graph: &ConflictGraph,
    sol: &Solution,
    params: &IterationParams,
    engine: &dyn MisEngine,
) -> Result<Option<ImprovementCandidate>, SolveError> {
    if let Some(cand) = find_small_improvement(graph, sol, params.max_small) {
        return Ok(Some(cand));
    }
    if let Some(cand) = find_claw_shaped_improvement(graph, sol) {
        return Ok(Some(cand));
    }
    if let Some((_, cand)) = find_circular_improvement(graph, sol, &params.kappa)? {
        return Ok(Some(cand));
    }
    let cls = classify_helpful(graph, sol, &params.eps);
    if let Some(cand) = black_box_sweep(graph, sol, &cls, engine)? {
        return Ok(Some(cand));
    }
    Ok(None)
}

/// Full solve: optional scaled phase from the empty solution, then the exact
/// phase on original weights until no improvement survives. The terminal
/// solution is maximal and admits no claw-shaped improvement under the
/// original weight function.
pub fn solve(
    instance: &Instance,
    config: &SolverConfig,
    engine: &dyn MisEngine,
) -> Result<SolveOutcome, SolveError> {
    let graph = ConflictGraph::build(instance);
    let mut trace = RunTrace::default();
    if instance.is_empty() {
        return Ok(SolveOutcome {
            indices: Vec::new(),
            ids: Vec::new(),
            weight: Rat::zero(),
            sq_weight: Rat::zero(),
            trace,
        });
    }
    let params = config.params_for(instance.k());
    let cap = config.iteration_cap.unwrap_or_else(|| {
        let bound = config.scaled_iteration_bound(instance.k(), instance.len());
        let ten = Rat::from_integer(BigInt::from(10));
        (bound * ten)
            .ceil()
            .to_integer()
            .try_into()
            .unwrap_or(u64::MAX)
    });

    let mut seed: Vec<usize> = Vec::new();
    if config.scaling {
        let (truncated, info) = scale_and_truncate(instance, &config.delta)?;
        let tgraph = ConflictGraph::build(&truncated);
        let mut tsol = Solution::empty(&tgraph);
        trace.scaled_iterations = drive(
            &tgraph,
            &mut tsol,
            &params,
            engine,
            cap,
            Phase::Scaled,
            &mut trace.records,
        )?;
        // Carry the terminal truncated solution into the exact phase.
        seed = tsol.indices().into_iter().map(|v| info.kept[v]).collect();
    }

    let mut sol = Solution::from_indices(&graph, seed)?;
    trace.exact_iterations = drive(
        &graph,
        &mut sol,
        &params,
        engine,
        cap,
        Phase::Exact,
        &mut trace.records,
    )?;

    debug_assert!(sol.is_maximal(&graph));
    debug_assert!(sol.caches_consistent(&graph));
    Ok(SolveOutcome {
        indices: sol.indices(),
        ids: sol.ids(&graph),
        weight: sol.weight().clone(),
        sq_weight: sol.sq_weight().clone(),
        trace,
    })
}

fn drive(
    graph: &ConflictGraph,
    sol: &mut Solution,
    params: &IterationParams,
    engine: &dyn MisEngine,
    cap: u64,
    phase: Phase,
    records: &mut Vec<IterationRecord>,
) -> Result<u64, SolveError> {
    let mut applied: u64 = 0;
    loop {
        match run_iteration(graph, sol, params, engine)? {
            Some(cand) => {
                applied += 1;
                if applied > cap {
                    return Err(SolveError::IterationCapExceeded { cap });
                }
                records.push(IterationRecord {
                    phase,
                    kind: Some(cand.kind),
                    size: cand.vertices.len(),
                    gain: cand.gain,
                    weight: sol.weight().clone(),
                    sq_weight: sol.sq_weight().clone(),
                });
            }
            None => {
                records.push(IterationRecord {
                    phase,
                    kind: None,
                    size: 0,
                    gain: Rat::zero(),
                    weight: sol.weight().clone(),
                    sq_weight: sol.sq_weight().clone(),
                });
                return Ok(applied);
            }
        }
    }
}
