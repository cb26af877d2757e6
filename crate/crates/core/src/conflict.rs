//! Conflict graphs and solutions.
//!
//! Vertices are the sets of an instance (in file order), edges are nonempty
//! intersections. Solutions are independent vertex sets carrying exact cached
//! totals of `w` and `w^2`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::Zero;
use thiserror::Error;

use crate::instance::Instance;
use crate::weight::{Rat, Weight};

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("vertices {a} and {b} conflict (shared element)")]
    NotIndependent { a: usize, b: usize },
    #[error("vertex index {0} out of range")]
    OutOfRange(usize),
    #[error("unknown set id {0:?}")]
    UnknownId(String),
}

/// Immutable conflict graph of an instance. Safe to share across threads.
#[derive(Debug, Clone)]
pub struct ConflictGraph {
    k: usize,
    ids: Vec<String>,
    weights: Vec<Weight>,
    /// Sorted adjacency lists; edge iff the underlying sets intersect.
    adj: Vec<Vec<usize>>,
    /// Element realization of each vertex (interned element ids).
    sets: Vec<Vec<u32>>,
    elem_names: Vec<String>,
}

impl ConflictGraph {
    /// Builds the conflict graph via element incidence lists.
    pub fn build(instance: &Instance) -> Self {
        let n = instance.len();
        let mut intern: HashMap<&str, u32> = HashMap::new();
        let mut elem_names = Vec::new();
        let mut sets: Vec<Vec<u32>> = Vec::with_capacity(n);
        for set in instance.sets() {
            let mut elems = Vec::with_capacity(set.elements.len());
            for e in &set.elements {
                let id = *intern.entry(e.as_str()).or_insert_with(|| {
                    elem_names.push(e.clone());
                    (elem_names.len() - 1) as u32
                });
                elems.push(id);
            }
            sets.push(elems);
        }
        let mut incidence: Vec<Vec<usize>> = vec![Vec::new(); elem_names.len()];
        for (v, elems) in sets.iter().enumerate() {
            for &e in elems {
                incidence[e as usize].push(v);
            }
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for owners in &incidence {
            for (i, &a) in owners.iter().enumerate() {
                for &b in &owners[i + 1..] {
                    adj[a].insert(b);
                    adj[b].insert(a);
                }
            }
        }
        ConflictGraph {
            k: instance.k(),
            ids: instance.sets().iter().map(|s| s.id.clone()).collect(),
            weights: instance.sets().iter().map(|s| s.weight.clone()).collect(),
            adj: adj.into_iter().map(|s| s.into_iter().collect()).collect(),
            sets,
            elem_names,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn weight(&self, v: usize) -> &Weight {
        &self.weights[v]
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// All adjacency lists, sorted per vertex.
    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Element realization of every vertex (interned element ids).
    pub fn set_realization(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn elements(&self, v: usize) -> &[u32] {
        &self.sets[v]
    }

    pub fn element_name(&self, e: u32) -> &str {
        &self.elem_names[e as usize]
    }

    /// Checks that `vs` is pairwise non-adjacent.
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

    /// N(X, A) = (X ∩ A) ∪ {u ∈ A : some v ∈ X is adjacent to u},
    /// computed by scanning adjacency lists. Sorted, duplicate-free.
    pub fn neighborhood(&self, xs: &[usize], sol: &Solution) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &v in xs {
            if sol.contains(v) {
                out.insert(v);
            }
            for &u in self.neighbors(v) {
                if sol.contains(u) {
                    out.insert(u);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Same set as [`neighborhood`](Self::neighborhood) computed through the
    /// element->owner index of the solution instead of adjacency lists.
    pub fn neighborhood_via_elements(&self, xs: &[usize], sol: &Solution) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &v in xs {
            if sol.contains(v) {
                out.insert(v);
            }
            for &e in self.elements(v) {
                if let Some(&owner) = sol.owner_of(e) {
                    out.insert(owner);
                }
            }
        }
        out.into_iter().collect()
    }

    /// Induced subgraph on `keep` (indices into `self`), weights carried.
    /// Returns the subgraph and the map from new indices to old ones.
    pub fn induced_subgraph(&self, keep: &[usize]) -> (ConflictGraph, Vec<usize>) {
        let keep: Vec<usize> = {
            let mut v: Vec<usize> = keep.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let back: BTreeMap<usize, usize> = keep
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new))
            .collect();
        let ids = keep.iter().map(|&v| self.ids[v].clone()).collect();
        let weights = keep.iter().map(|&v| self.weights[v].clone()).collect();
        let sets: Vec<Vec<u32>> = keep.iter().map(|&v| self.sets[v].clone()).collect();
        let adj = keep
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter_map(|u| back.get(u).copied())
                    .collect()
            })
            .collect();
        (
            ConflictGraph {
                k: self.k,
                ids,
                weights,
                adj,
                sets,
                elem_names: self.elem_names.clone(),
            },
            keep,
        )
    }

    /// Searches for a d-claw: a vertex with d pairwise non-adjacent
    /// neighbors. Conflict graphs of k-set packing instances must admit none
    /// for d = k + 1. Enumeration; intended for tests and small instances.
    pub fn find_claw(&self, d: usize) -> Option<(usize, Vec<usize>)> {
        fn extend(
            g: &ConflictGraph,
            cands: &[usize],
            start: usize,
            talons: &mut Vec<usize>,
            d: usize,
        ) -> bool {
            if talons.len() == d {
                return true;
            }
            for i in start..cands.len() {
                let t = cands[i];
                if talons.iter().all(|&x| !g.adjacent(x, t)) {
                    talons.push(t);
                    if extend(g, cands, i + 1, talons, d) {
                        return true;
                    }
                    talons.pop();
                }
            }
            false
        }
        for center in 0..self.len() {
            let cands = self.neighbors(center);
            if cands.len() < d {
                continue;
            }
            let mut talons = Vec::new();
            if extend(self, cands, 0, &mut talons, d) {
                return Some((center, talons));
            }
        }
        None
    }

    pub fn indices_of(&self, ids: &[String]) -> Result<Vec<usize>, SolutionError> {
        ids.iter()
            .map(|id| {
                self.index_of(id)
                    .ok_or_else(|| SolutionError::UnknownId(id.clone()))
            })
            .collect()
    }
}

/// A mutable independent set with exact cached totals.
#[derive(Debug, Clone)]
pub struct Solution {
    members: Vec<bool>,
    list: BTreeSet<usize>,
    weight: Rat,
    sq_weight: Rat,
    /// element -> owning member, for O(|set|) disjointness checks.
    owner: HashMap<u32, usize>,
}

impl Solution {
    pub fn empty(graph: &ConflictGraph) -> Self {
        Solution {
            members: vec![false; graph.len()],
            list: BTreeSet::new(),
            weight: Rat::zero(),
            sq_weight: Rat::zero(),
            owner: HashMap::new(),
        }
    }

    pub fn from_indices(
        graph: &ConflictGraph,
        vs: impl IntoIterator<Item = usize>,
    ) -> Result<Self, SolutionError> {
        let mut sol = Solution::empty(graph);
        for v in vs {
            sol.insert(graph, v)?;
        }
        Ok(sol)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.get(v).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.list.iter().copied()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.list.iter().copied().collect()
    }

    pub fn ids(&self, graph: &ConflictGraph) -> Vec<String> {
        self.list.iter().map(|&v| graph.id(v).to_string()).collect()
    }

    pub fn weight(&self) -> &Rat {
        &self.weight
    }

    pub fn sq_weight(&self) -> &Rat {
        &self.sq_weight
    }

    fn owner_of(&self, e: u32) -> Option<&usize> {
        self.owner.get(&e)
    }

    /// Inserts `v`, failing if it conflicts with a member. The check walks
    /// the element->owner index, O(|set|).
    pub fn insert(&mut self, graph: &ConflictGraph, v: usize) -> Result<(), SolutionError> {
        if v >= graph.len() {
            return Err(SolutionError::OutOfRange(v));
        }
        if self.contains(v) {
            return Ok(());
        }
        for &e in graph.elements(v) {
            if let Some(&other) = self.owner.get(&e) {
                return Err(SolutionError::NotIndependent { a: other, b: v });
            }
        }
        self.members[v] = true;
        self.list.insert(v);
        self.weight += graph.weight(v).rat();
        self.sq_weight += graph.weight(v).sq();
        for &e in graph.elements(v) {
            self.owner.insert(e, v);
        }
        Ok(())
    }

    pub fn remove(&mut self, graph: &ConflictGraph, v: usize) {
        if !self.contains(v) {
            return;
        }
        self.members[v] = false;
        self.list.remove(&v);
        self.weight -= graph.weight(v).rat();
        self.sq_weight -= graph.weight(v).sq();
        for &e in graph.elements(v) {
            self.owner.remove(&e);
        }
    }

    /// Applies a local improvement: A <- (A \ N(X, A)) ∪ X.
    /// Returns the displaced vertices.
    pub fn apply(
        &mut self,
        graph: &ConflictGraph,
        xs: &[usize],
    ) -> Result<Vec<usize>, SolutionError> {
        let displaced = graph.neighborhood(xs, self);
        for &u in &displaced {
            self.remove(graph, u);
        }
        for &v in xs {
            self.insert(graph, v)?;
        }
        Ok(displaced)
    }

    /// Recomputes the cached totals from scratch and compares exactly.
    pub fn caches_consistent(&self, graph: &ConflictGraph) -> bool {
        let w: Rat = self
            .list
            .iter()
            .map(|&v| graph.weight(v).rat().clone())
            .sum();
        let sq: Rat = self.list.iter().map(|&v| graph.weight(v).sq()).sum();
        w == self.weight && sq == self.sq_weight
    }

    /// True if every vertex outside the solution has a neighbor inside.
    pub fn is_maximal(&self, graph: &ConflictGraph) -> bool {
        (0..graph.len())
            .all(|v| self.contains(v) || graph.neighbors(v).iter().any(|&u| self.contains(u)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::SetDef;
    use crate::weight::rat;

    fn inst(k: usize, sets: &[(&str, &[&str], i64)]) -> Instance {
        Instance::new(
            k,
            sets.iter()
                .map(|(id, es, w)| SetDef {
                    id: id.to_string(),
                    elements: es.iter().map(|e| e.to_string()).collect(),
                    weight: Weight::from_int(*w).unwrap(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn build_edges_from_intersections() {
        let g = ConflictGraph::build(&inst(
            3,
            &[
                ("s0", &["a", "b"], 1),
                ("s1", &["b", "c"], 1),
                ("s2", &["d"], 1),
            ],
        ));
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
        assert!(g.neighbors(2).is_empty());
    }

    #[test]
    fn disjoint_sets_give_edgeless_graph() {
        let g = ConflictGraph::build(&inst(2, &[("a", &["x"], 1), ("b", &["y"], 1)]));
        assert!((0..g.len()).all(|v| g.neighbors(v).is_empty()));
    }

    #[test]
    fn tight_example_is_claw_free() {
        let li = crate::generate::generate_tight_example(3, 4).unwrap();
        let g = ConflictGraph::build(&li.instance);
        assert!(g.find_claw(4).is_none());
        // 3-claws exist: every base set has 3 pairwise disjoint planted
        // neighbors among its k = 3.
        assert!(g.find_claw(3).is_some());
    }

    #[test]
    fn neighborhood_cases() {
        let g = ConflictGraph::build(&inst(
            3,
            &[
                ("u", &["a", "b", "c"], 1),
                ("v1", &["a", "p"], 1),
                ("v2", &["b", "q"], 1),
                ("v3", &["c", "r"], 1),
                ("w", &["z"], 1),
            ],
        ));
        let sol = Solution::from_indices(&g, [1, 2, 3, 4]).unwrap();
        assert!(g.neighborhood(&[], &sol).is_empty());
        // Single vertex with three members adjacent.
        assert_eq!(g.neighborhood(&[0], &sol), vec![1, 2, 3]);
        // X ⊆ A: the intersection term keeps X itself.
        assert_eq!(g.neighborhood(&[4], &sol), vec![4]);
        assert_eq!(
            g.neighborhood(&[0], &sol),
            g.neighborhood_via_elements(&[0], &sol)
        );
    }

    #[test]
    fn induced_subgraph_cases() {
        let li = crate::generate::generate_tight_example(3, 4).unwrap();
        let g = ConflictGraph::build(&li.instance);
        let all: Vec<usize> = (0..g.len()).collect();
        let (full, _) = g.induced_subgraph(&all);
        assert_eq!(full.len(), g.len());
        for v in 0..g.len() {
            assert_eq!(full.neighbors(v), g.neighbors(v));
        }
        let (empty, _) = g.induced_subgraph(&[]);
        assert_eq!(empty.len(), 0);
        let base = g
            .indices_of(li.adversarial_start.as_ref().unwrap())
            .unwrap();
        let (ind, _) = g.induced_subgraph(&base);
        assert!((0..ind.len()).all(|v| ind.neighbors(v).is_empty()));
    }

    #[test]
    fn solution_caches_and_application() {
        let g = ConflictGraph::build(&inst(
            3,
            &[("x", &["a"], 2), ("y", &["a", "b"], 3), ("z", &["c"], 1)],
        ));
        let mut sol = Solution::from_indices(&g, [1, 2]).unwrap();
        assert_eq!(sol.weight(), &rat(4, 1));
        assert_eq!(sol.sq_weight(), &rat(10, 1));
        assert!(sol.caches_consistent(&g));
        assert!(Solution::from_indices(&g, [0, 1]).is_err());
        // Apply X = {x}: displaces y.
        let displaced = sol.apply(&g, &[0]).unwrap();
        assert_eq!(displaced, vec![1]);
        assert_eq!(sol.indices(), vec![0, 2]);
        assert!(sol.caches_consistent(&g));
        assert!(sol.is_maximal(&g));
    }
}
