//! Exact maximum-weight disjoint sub-collection via branch and bound.
//!
//! Ground truth for desk-scale ratio checks. Branches on the heaviest
//! undecided set; the upper bound at a node is the current weight plus the
//! total weight of undecided sets compatible with the partial solution.

use num::Zero;
use thiserror::Error;

use crate::conflict::ConflictGraph;
use crate::instance::Instance;
use crate::weight::Rat;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {n} sets, above the cap of {cap}; raise the cap to force the search")]
    TooLarge { n: usize, cap: usize },
}

pub const DEFAULT_SIZE_CAP: usize = 30;

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Optimal collection as set ids, in instance order.
    pub ids: Vec<String>,
    /// Indices into the instance.
    pub indices: Vec<usize>,
    /// Exact optimal weight.
    pub weight: Rat,
    /// Search-tree nodes explored.
    pub nodes: u64,
}

pub fn solve_exact(instance: &Instance, size_cap: usize) -> Result<OracleResult, OracleError> {
    if instance.len() > size_cap {
        return Err(OracleError::TooLarge {
            n: instance.len(),
            cap: size_cap,
        });
    }
    let graph = ConflictGraph::build(instance);
    let n = graph.len();
    // Heaviest first; index order on ties keeps runs reproducible.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| graph.weight(b).cmp(graph.weight(a)).then(a.cmp(&b)));

    struct Search<'a> {
        graph: &'a ConflictGraph,
        order: &'a [usize],
        best: Vec<usize>,
        best_weight: Rat,
        nodes: u64,
    }

    impl Search<'_> {
        fn run(&mut self, pos: usize, chosen: &mut Vec<usize>, current: &Rat) {
            self.nodes += 1;
            if current > &self.best_weight {
                self.best_weight = current.clone();
                self.best = chosen.clone();
            }
            if pos == self.order.len() {
                return;
            }
            // Bound: everything still undecided and compatible, taken whole.
            let mut residual = Rat::zero();
            for &v in &self.order[pos..] {
                if chosen.iter().all(|&c| !self.graph.adjacent(c, v)) {
                    residual += self.graph.weight(v).rat();
                }
            }
            if current + &residual <= self.best_weight {
                return;
            }
            let v = self.order[pos];
            if chosen.iter().all(|&c| !self.graph.adjacent(c, v)) {
                chosen.push(v);
                let with = current + self.graph.weight(v).rat();
                self.run(pos + 1, chosen, &with);
                chosen.pop();
            }
            self.run(pos + 1, chosen, current);
        }
    }

    let mut search = Search {
        graph: &graph,
        order: &order,
        best: Vec::new(),
        best_weight: Rat::zero(),
        nodes: 0,
    };
    search.run(0, &mut Vec::new(), &Rat::zero());

    let mut indices = search.best;
    indices.sort_unstable();
    Ok(OracleResult {
        ids: indices.iter().map(|&v| graph.id(v).to_string()).collect(),
        indices,
        weight: search.best_weight,
        nodes: search.nodes,
    })
}
