//! Pluggable unweighted independent-set engines.
//!
//! The black-box stage of the solver strips weights from a sub-instance and
//! asks an engine for a large independent set. Engines implement [`MisEngine`]
//! and are registered by name; the CLI selects one via `--mis-engine`.
//!
//! The bundled engines do not certify the (k+1+eps)/3 ratio of the
//! color-coding algorithm the role calls for; any approximation guarantee
//! stated in terms of the engine ratio is conditional on the plugged engine.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::conflict::ConflictGraph;

#[derive(Debug, Error)]
pub enum MisError {
    #[error("unknown engine {0:?} (known: {1})")]
    UnknownEngine(String, String),
    #[error("bad engine argument in {0:?}: {1}")]
    BadArgument(String, String),
    #[error("exact engine refuses {n} vertices (cap {cap}); raise the cap or pick another engine")]
    ExactTooLarge { n: usize, cap: usize },
    #[error("engine {0:?} returned a dependent or out-of-range vertex set")]
    InvalidOutput(String),
    #[error("engine \"planted\" needs a planted solution (labeled instance)")]
    MissingPlanted,
}

/// Weight-free view of a conflict (sub)graph: ids, adjacency, and the set
/// realization. Engines never see weights.
pub struct MisView<'a> {
    pub ids: &'a [String],
    pub adj: &'a [Vec<usize>],
    pub sets: &'a [Vec<u32>],
}

impl<'a> MisView<'a> {
    pub fn of(graph: &'a ConflictGraph) -> Self {
        MisView {
            ids: graph.ids(),
            adj: graph.adjacency(),
            sets: graph.set_realization(),
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn is_independent(&self, vs: &[usize]) -> bool {
        for (i, &a) in vs.iter().enumerate() {
            for &b in &vs[i + 1..] {
                if a == b || self.adjacent(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// An unweighted independent-set strategy. Implementations must be
/// deterministic; ties break toward the smaller vertex index.
pub trait MisEngine: Send + Sync {
    fn name(&self) -> String;
    fn solve(&self, view: &MisView<'_>) -> Result<Vec<usize>, MisError>;
}

/// Runs an engine and validates its output (independent, in range, sorted).
pub fn solve_checked(engine: &dyn MisEngine, view: &MisView<'_>) -> Result<Vec<usize>, MisError> {
    let mut out = engine.solve(view)?;
    out.sort_unstable();
    out.dedup();
    if out.iter().any(|&v| v >= view.len()) || !view.is_independent(&out) {
        return Err(MisError::InvalidOutput(engine.name()));
    }
    Ok(out)
}

/// Greedy minimum-degree: repeatedly take a vertex of minimum remaining
/// degree (smallest index on ties) and discard its neighborhood.
pub struct GreedyMinDegree;

impl MisEngine for GreedyMinDegree {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn solve(&self, view: &MisView<'_>) -> Result<Vec<usize>, MisError> {
        let n = view.len();
        let mut alive = vec![true; n];
        let mut degree: Vec<usize> = (0..n).map(|v| view.adj[v].len()).collect();
        let mut remaining = n;
        let mut out = Vec::new();
        while remaining > 0 {
            let v = (0..n)
                .filter(|&v| alive[v])
                .min_by_key(|&v| (degree[v], v))
                .expect("remaining > 0");
            out.push(v);
            let mut dead = vec![v];
            dead.extend(view.adj[v].iter().copied().filter(|&u| alive[u]));
            for &d in &dead {
                alive[d] = false;
                remaining -= 1;
                for &u in &view.adj[d] {
                    if alive[u] {
                        degree[u] -= 1;
                    }
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

/// Greedy seed plus t-swap local search: while some independent set Y outside
/// the solution with |Y| <= t + 1 displaces fewer than |Y| chosen vertices,
/// swap it in. At termination no replacement of <= t chosen vertices by t + 1
/// new ones exists.
pub struct TSwap {
    pub t: usize,
}

impl MisEngine for TSwap {
    fn name(&self) -> String {
        format!("swap:{}", self.t)
    }

    fn solve(&self, view: &MisView<'_>) -> Result<Vec<usize>, MisError> {
        let mut current: BTreeSet<usize> = GreedyMinDegree.solve(view)?.into_iter().collect();
        while let Some(ys) = find_swap(view, &current, self.t + 1) {
            let displaced: Vec<usize> = current
                .iter()
                .copied()
                .filter(|&a| ys.iter().any(|&y| view.adjacent(a, y)))
                .collect();
            debug_assert!(displaced.len() < ys.len());
            for d in displaced {
                current.remove(&d);
            }
            current.extend(ys);
        }
        Ok(current.into_iter().collect())
    }
}

fn find_swap(view: &MisView<'_>, current: &BTreeSet<usize>, max_size: usize) -> Option<Vec<usize>> {
    let outside: Vec<usize> = (0..view.len()).filter(|v| !current.contains(v)).collect();
    fn displaced_count(view: &MisView<'_>, current: &BTreeSet<usize>, ys: &[usize]) -> usize {
        current
            .iter()
            .filter(|&&a| ys.iter().any(|&y| view.adjacent(a, y)))
            .count()
    }
    fn dfs(
        view: &MisView<'_>,
        current: &BTreeSet<usize>,
        outside: &[usize],
        start: usize,
        chosen: &mut Vec<usize>,
        max_size: usize,
    ) -> Option<Vec<usize>> {
        for i in start..outside.len() {
            let y = outside[i];
            if chosen.iter().any(|&x| view.adjacent(x, y)) {
                continue;
            }
            chosen.push(y);
            if displaced_count(view, current, chosen) < chosen.len() {
                return Some(chosen.clone());
            }
            if chosen.len() < max_size {
                if let Some(hit) = dfs(view, current, outside, i + 1, chosen, max_size) {
                    return Some(hit);
                }
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = Vec::new();
    dfs(view, current, &outside, 0, &mut chosen, max_size)
}

/// Exact maximum independent set by branch and bound; refuses graphs above
/// the vertex cap.
pub struct ExactMis {
    pub cap: usize,
}

impl Default for ExactMis {
    fn default() -> Self {
        ExactMis { cap: 28 }
    }
}

impl MisEngine for ExactMis {
    fn name(&self) -> String {
        "exact".into()
    }

    fn solve(&self, view: &MisView<'_>) -> Result<Vec<usize>, MisError> {
        if view.len() > self.cap {
            return Err(MisError::ExactTooLarge {
                n: view.len(),
                cap: self.cap,
            });
        }
        fn branch(
            view: &MisView<'_>,
            order: &[usize],
            pos: usize,
            chosen: &mut Vec<usize>,
            best: &mut Vec<usize>,
        ) {
            if chosen.len() + (order.len() - pos) <= best.len() {
                return;
            }
            if pos == order.len() {
                if chosen.len() > best.len() {
                    *best = chosen.clone();
                }
                return;
            }
            let v = order[pos];
            if chosen.iter().all(|&u| !view.adjacent(u, v)) {
                chosen.push(v);
                branch(view, order, pos + 1, chosen, best);
                chosen.pop();
            }
            branch(view, order, pos + 1, chosen, best);
        }
        let order: Vec<usize> = (0..view.len()).collect();
        let mut best = Vec::new();
        branch(view, &order, 0, &mut Vec::new(), &mut best);
        best.sort_unstable();
        Ok(best)
    }
}

/// Test-oriented engine: returns a fixed vertex-id set intersected with the
/// subgraph it is given.
pub struct Planted {
    ids: BTreeSet<String>,
}

impl Planted {
    pub fn new(ids: impl IntoIterator<Item = String>) -> Self {
        Planted {
            ids: ids.into_iter().collect(),
        }
    }
}

impl MisEngine for Planted {
    fn name(&self) -> String {
        "planted".into()
    }

    fn solve(&self, view: &MisView<'_>) -> Result<Vec<usize>, MisError> {
        Ok((0..view.len())
            .filter(|&v| self.ids.contains(&view.ids[v]))
            .collect())
    }
}

type Builder = fn(&EngineContext, Option<&str>) -> Result<Box<dyn MisEngine>, MisError>;

/// Context handed to engine builders; carries whatever instance-level data a
/// strategy may need (currently the planted solution, if any).
#[derive(Default)]
pub struct EngineContext {
    pub planted: Option<Vec<String>>,
}

/// Name-keyed registry of engine builders. Specs look like `greedy`,
/// `swap:2`, `exact`, `exact:24`, or `planted`.
pub struct EngineRegistry {
    entries: Vec<(&'static str, Builder)>,
}

impl Default for EngineRegistry {
    fn default() -> Self {
        let mut reg = EngineRegistry {
            entries: Vec::new(),
        };
        reg.register("greedy", |_, arg| match arg {
            None => Ok(Box::new(GreedyMinDegree)),
            Some(a) => Err(MisError::BadArgument(
                format!("greedy:{a}"),
                "greedy takes no argument".into(),
            )),
        });
        reg.register("swap", |_, arg| {
            let t: usize = arg
                .unwrap_or("2")
                .parse()
                .map_err(|e| MisError::BadArgument(format!("swap:{arg:?}"), format!("{e}")))?;
            if t == 0 {
                return Err(MisError::BadArgument(
                    "swap:0".into(),
                    "t must be at least 1".into(),
                ));
            }
            Ok(Box::new(TSwap { t }))
        });
        reg.register("exact", |_, arg| {
            let cap = match arg {
                None => ExactMis::default().cap,
                Some(a) => a
                    .parse()
                    .map_err(|e| MisError::BadArgument(format!("exact:{a}"), format!("{e}")))?,
            };
            Ok(Box::new(ExactMis { cap }))
        });
        reg.register("planted", |ctx, _| {
            let ids = ctx.planted.clone().ok_or(MisError::MissingPlanted)?;
            Ok(Box::new(Planted::new(ids)))
        });
        reg
    }
}

impl EngineRegistry {
    pub fn register(&mut self, name: &'static str, builder: Builder) {
        self.entries.push((name, builder));
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    /// Builds an engine from a spec string `name` or `name:arg`.
    pub fn build(&self, spec: &str, ctx: &EngineContext) -> Result<Box<dyn MisEngine>, MisError> {
        let (name, arg) = match spec.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (spec, None),
        };
        for (known, builder) in &self.entries {
            if *known == name {
                return builder(ctx, arg);
            }
        }
        Err(MisError::UnknownEngine(
            spec.to_string(),
            self.names().join("|"),
        ))
    }
}

/// Builds an engine from a spec string with the default registry.
pub fn build_engine(spec: &str, ctx: &EngineContext) -> Result<Box<dyn MisEngine>, MisError> {
    EngineRegistry::default().build(spec, ctx)
}
