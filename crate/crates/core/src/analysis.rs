//! Executable analysis objects: missing/special/support classification, the
//! approximation-bound decomposition, the guarantee formula, and the exact
//! validator for the constants table.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::conflict::{ConflictGraph, Solution, SolutionError};
use crate::improve::basic::{
    compute_charges, contribution, find_claw_shaped_improvement, heaviest_neighbor, ImproveError,
};
use crate::improve::unweighted::{classify_helpful, HelpfulClassification};
use crate::report::ser_rat;
use crate::weight::{parse_rational, rat, Rat};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Solution(#[from] SolutionError),
    #[error(transparent)]
    Improve(#[from] ImproveError),
    #[error("a claw-shaped improvement exists; the bound requires a terminal solution")]
    ClawExists,
    #[error("vertex {v} has special neighbors {a} and {b}; expected at most one (is the solution terminal?)")]
    MultipleSpecialNeighbors { v: usize, a: usize, b: usize },
    #[error("guarantee formula domain: {0}")]
    Domain(String),
}

// ---------------------------------------------------------------------------
// Constants table and derived parameters

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GuaranteeColumn {
    /// Rounded-up guarantee for a single k.
    #[serde(serialize_with = "ser_rat")]
    Fixed(Rat),
    /// Linear upper bound slope*(k+1) + intercept for a tail of k values.
    Linear {
        #[serde(serialize_with = "ser_rat")]
        slope: Rat,
        #[serde(serialize_with = "ser_rat")]
        intercept: Rat,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub k_lo: usize,
    /// `None` marks the open-ended tail row.
    pub k_hi: Option<usize>,
    #[serde(serialize_with = "ser_rat")]
    pub eps: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub xi: Rat,
    pub guarantee: GuaranteeColumn,
}

fn dec(s: &str) -> Rat {
    parse_rational(s).expect("table literal")
}

/// The published choices of eps and xi with their resulting guarantees.
pub fn constants_table() -> Vec<TableRow> {
    let fixed = [
        (4, "0.01422", "0.001764", "2.4998"),
        (5, "0.02674", "0.003298", "2.9990"),
        (6, "0.03466", "0.004258", "3.4980"),
        (7, "0.04013", "0.004917", "3.9968"),
        (8, "0.04415", "0.005399", "4.4955"),
        (9, "0.04723", "0.005767", "4.9941"),
        (10, "0.04966", "0.006057", "5.4928"),
        (11, "0.05164", "0.006292", "5.9914"),
        (12, "0.05328", "0.006487", "6.4899"),
        (13, "0.05465", "0.006649", "6.9885"),
    ];
    let mut rows: Vec<TableRow> = fixed
        .iter()
        .map(|(k, eps, xi, g)| TableRow {
            k_lo: *k,
            k_hi: Some(*k),
            eps: dec(eps),
            xi: dec(xi),
            guarantee: GuaranteeColumn::Fixed(dec(g)),
        })
        .collect();
    rows.push(TableRow {
        k_lo: 14,
        k_hi: None,
        eps: dec("0.084"),
        xi: dec("0.01"),
        guarantee: GuaranteeColumn::Linear {
            slope: dec("0.4986"),
            intercept: dec("0.0208"),
        },
    });
    rows
}

pub fn table_row_for(k: usize) -> Option<TableRow> {
    constants_table()
        .into_iter()
        .find(|r| k >= r.k_lo && r.k_hi.is_none_or(|hi| k <= hi))
}

/// Default eps per k. Values below k = 4 have no published row; the
/// asymptotic row's eps is used there (it only steers which sub-instances
/// the black-box stage builds, never correctness).
pub fn eps_default(k: usize) -> Rat {
    table_row_for(k.max(4)).expect("table covers k >= 4").eps
}

/// kappa = 1 / ceil(1/eps).
pub fn kappa_for(eps: &Rat) -> Rat {
    assert!(eps.is_positive());
    let inv = (Rat::one() / eps).ceil();
    Rat::one() / inv
}

/// The engine-ratio placeholder rho = (k + 1 + eps_tilde) / 3.
pub fn rho(k: usize, eps_tilde: &Rat) -> Rat {
    (Rat::from_integer(BigInt::from(k as u64 + 1)) + eps_tilde) / Rat::from_integer(3.into())
}

/// The approximation-guarantee formula
/// (k+1)/2 - xi * (k - 1 - (1/k)((2+kappa)(1+eps)^2/(2+eps))
///                  - ((k-1)/k)(2 rho (1+eps)^3 / (1-eps^2)))
/// with kappa = 1/ceil(1/eps) and rho = (k+1+eps)/3.
pub fn guarantee_formula(k: usize, eps: &Rat, xi: &Rat) -> Result<Rat, AnalysisError> {
    if k < 4 {
        return Err(AnalysisError::Domain(format!("k must be >= 4, got {k}")));
    }
    if !eps.is_positive() || eps >= &Rat::one() {
        return Err(AnalysisError::Domain(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    if xi.is_negative() {
        return Err(AnalysisError::Domain(format!(
            "xi must be nonnegative, got {xi}"
        )));
    }
    let kappa = kappa_for(eps);
    let rho = rho(k, eps);
    let kr = Rat::from_integer(BigInt::from(k as u64));
    let one = Rat::one();
    let two = Rat::from_integer(BigInt::from(2));
    let one_plus = &one + eps;
    let term_small = (&two + &kappa) * &one_plus * &one_plus / (&two + eps);
    let term_mis = &two * &rho * &one_plus * &one_plus * &one_plus / (&one - eps * eps);
    let deduction = (&kr - &one) - &term_small / &kr - (&kr - &one) / &kr * &term_mis;
    Ok((&kr + &one) / &two - xi * deduction)
}

// ---------------------------------------------------------------------------
// Constants validator

#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    #[serde(serialize_with = "ser_rat")]
    pub eps: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub xi: Rat,
    pub checks: Vec<InequalityCheck>,
    pub pass: bool,
}

/// Evaluates the seven inequality groups on (eps, xi), exactly. The group
/// with nested square roots is decided by sign tracking and squaring, so no
/// approximation enters the verdict.
pub fn validate_constants(eps: &Rat, xi: &Rat) -> ConstantsReport {
    let one = Rat::one();
    let two = rat(2, 1);
    let one_plus = &one + eps;
    let sq1p = &one_plus * &one_plus;
    let eps_sq = eps * eps;

    let mut checks = Vec::new();
    let mut push = |name: &'static str, pass: bool| checks.push(InequalityCheck { name, pass });

    // (3/8)(1+e)^2 + e^2 <= (11/16)(1+e)^2 + e^2 <= (3/4)(1+e)^2 + e^2 <= 1.
    let a = rat(3, 8) * &sq1p + &eps_sq;
    let b = rat(11, 16) * &sq1p + &eps_sq;
    let c = rat(3, 4) * &sq1p + &eps_sq;
    push("EqEps1", a <= b && b <= c && c <= one);

    // (1-e)/2 >= (1-e(1+e))/2 >= (1-2e(1+e))/2 >= xi.
    let x1a = (&one - eps) / &two;
    let x1b = (&one - eps * &one_plus) / &two;
    let x1c = (&one - &two * eps * &one_plus) / &two;
    push("EqXi1", x1a >= x1b && x1b >= x1c && &x1c >= xi);

    // (1 - s)^2 / (1 + e s) >= 2 xi for s = sqrt(5 / (8 (1 - e^2))),
    // rewritten as 1 + s^2 - 2 xi >= s (2 + 2 xi e) and squared.
    let xi2 = if eps >= &one || eps <= &Rat::zero() {
        false
    } else {
        let r = rat(5, 8) / (&one - &eps_sq);
        let lhs = &one + &r - &two * xi;
        if lhs.is_negative() {
            false
        } else {
            let coeff = &two + &two * xi * eps;
            &lhs * &lhs >= r * &coeff * &coeff
        }
    };
    push("EqXi2", xi2);

    // min{e/(2+e), 1/4, 1/(4(1+e)), e/(2(1+e)), e/(4+2e)} >= e/(4(2+e)) >= xi.
    let cands = [
        eps / (&two + eps),
        rat(1, 4),
        &one / (rat(4, 1) * &one_plus),
        eps / (&two * &one_plus),
        eps / (rat(4, 1) + &two * eps),
    ];
    let m = cands.iter().min().expect("nonempty").clone();
    let mid = eps / (rat(4, 1) * (&two + eps));
    push("EqXi3", m >= mid && &mid >= xi);

    // e/(2(1+e)(2+e)) >= e/(2(1+e)^2(2+e)) >= e/(2(1+e)^3(2+e)) >= xi.
    let d1 = eps / (&two * &one_plus * (&two + eps));
    let d2 = &d1 / &one_plus;
    let d3 = &d2 / &one_plus;
    push("EqXi4", d1 >= d2 && d2 >= d3 && &d3 >= xi);

    // ((1/3 - e)^2) / ((4/3 + 2e)(2+e)) >= xi.
    let third = rat(1, 3) - eps;
    let x5 = &third * &third / ((rat(4, 3) + &two * eps) * (&two + eps));
    push("EqXi5", &x5 >= xi);

    // e ((2 + (1+e)^{-1}) / (2+e) - (1+e)) >= 2 xi.
    let x6 = eps * ((&two + &one / &one_plus) / (&two + eps) - &one_plus);
    push("EqXi6", x6 >= &two * xi);

    let pass = checks.iter().all(|c| c.pass);
    ConstantsReport {
        eps: eps.clone(),
        xi: xi.clone(),
        checks,
        pass,
    }
}

// ---------------------------------------------------------------------------
// Structural classification (missing / special / support)

#[derive(Debug, Clone, Serialize)]
pub struct SolutionVertexReport {
    pub vertex: usize,
    pub id: String,
    /// k - |N(v, A*)|.
    pub missing: usize,
    /// |help(v) ∩ A*|.
    pub helpful_count: usize,
    /// The unique special neighbor t(v), for v in A'.
    pub special_neighbor: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceVertexReport {
    pub vertex: usize,
    pub id: String,
    /// n(u).
    pub heaviest: usize,
    /// help(u).
    pub help: Vec<usize>,
    /// The vertex u is special for, if any.
    pub special_for: Option<usize>,
    /// supp(u): neighbors u neither helps nor serves specially.
    pub support: Vec<usize>,
    #[serde(serialize_with = "ser_rat")]
    pub charge: Rat,
    /// Sum of contr(u, v) over v in A.
    #[serde(serialize_with = "ser_rat")]
    pub contr_sum: Rat,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub k: usize,
    #[serde(serialize_with = "ser_rat")]
    pub eps: Rat,
    pub solution: Vec<usize>,
    pub reference: Vec<usize>,
    #[serde(serialize_with = "ser_rat")]
    pub solution_weight: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub reference_weight: Rat,
    pub per_solution: Vec<SolutionVertexReport>,
    pub per_reference: Vec<ReferenceVertexReport>,
    /// Solution vertices outside the reference set owning a special neighbor.
    pub a_prime: Vec<usize>,
}

/// Classifies every vertex of a terminal solution A against an independent
/// reference solution A*: missing-neighbor counts, helpful neighbors,
/// special pairs, supports, charges, and contributions.
pub fn classify(
    graph: &ConflictGraph,
    sol: &Solution,
    reference: &[usize],
    eps: &Rat,
) -> Result<AnalysisReport, AnalysisError> {
    let ref_sol = Solution::from_indices(graph, reference.iter().copied())?;
    let cls: HelpfulClassification = classify_helpful(graph, sol, eps);
    let charges = compute_charges(graph, sol, reference)?;
    let five_eighth = rat(5, 8);

    let mut special_of_vertex: BTreeMap<usize, usize> = BTreeMap::new();
    let mut per_reference = Vec::new();
    for &u in reference {
        let nu = graph.neighborhood(&[u], sol);
        let n1 = heaviest_neighbor(graph, sol, u).expect("checked by compute_charges");
        let help = cls.help_of[u].clone();
        let contr_at_n1 = contribution(graph, sol, u, n1);
        let special_for =
            if !help.contains(&n1) && contr_at_n1 > &five_eighth * graph.weight(n1).rat() {
                if let Some(&other) = special_of_vertex.get(&n1) {
                    return Err(AnalysisError::MultipleSpecialNeighbors {
                        v: n1,
                        a: other,
                        b: u,
                    });
                }
                special_of_vertex.insert(n1, u);
                Some(n1)
            } else {
                None
            };
        let support: Vec<usize> = nu
            .iter()
            .copied()
            .filter(|v| !help.contains(v) && special_for != Some(*v))
            .collect();
        let contr_sum: Rat = nu.iter().map(|&v| contribution(graph, sol, u, v)).sum();
        per_reference.push(ReferenceVertexReport {
            vertex: u,
            id: graph.id(u).to_string(),
            heaviest: n1,
            help,
            special_for,
            support,
            charge: charges.charge[&u].clone(),
            contr_sum,
        });
    }

    let ref_set: BTreeMap<usize, ()> = reference.iter().map(|&u| (u, ())).collect();
    let mut per_solution = Vec::new();
    let mut a_prime = Vec::new();
    for v in sol.iter() {
        let in_ref = ref_set.contains_key(&v);
        let n_v_ref = graph.neighborhood(&[v], &ref_sol);
        assert!(
            n_v_ref.len() <= graph.k(),
            "claw-freeness violated at vertex {v}"
        );
        let helpful_count = cls.helped_by[v]
            .iter()
            .filter(|u| ref_set.contains_key(u))
            .count();
        let special_neighbor = special_of_vertex.get(&v).copied();
        if special_neighbor.is_some() && !in_ref {
            a_prime.push(v);
        }
        per_solution.push(SolutionVertexReport {
            vertex: v,
            id: graph.id(v).to_string(),
            missing: graph.k() - n_v_ref.len(),
            helpful_count,
            special_neighbor: if in_ref { None } else { special_neighbor },
        });
    }

    Ok(AnalysisReport {
        k: graph.k(),
        eps: eps.clone(),
        solution: sol.indices(),
        reference: reference.to_vec(),
        solution_weight: sol.weight().clone(),
        reference_weight: ref_sol.weight().clone(),
        per_solution,
        per_reference,
        a_prime,
    })
}

// ---------------------------------------------------------------------------
// The approximation bound

#[derive(Debug, Clone, Serialize)]
pub struct BoundDecomposition {
    /// (k+1)/2 * w(A).
    #[serde(serialize_with = "ser_rat")]
    pub base: Rat,
    /// sum over v in A of (k - |N(v, A*)|) w(v).
    #[serde(serialize_with = "ser_rat")]
    pub missing_sum: Rat,
    /// sum over u in A* of (sum_v contr(u, v) - 2 charge(u, n(u))).
    #[serde(serialize_with = "ser_rat")]
    pub slack_sum: Rat,
    /// base - missing_sum/2 - slack_sum/2.
    #[serde(serialize_with = "ser_rat")]
    pub bound: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub solution_weight: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub reference_weight: Rat,
}

/// Evaluates the exact upper bound on w(A*):
/// (k+1)/2 w(A) - 1/2 sum_v (k - |N(v,A*)|) w(v)
///              - 1/2 sum_u (sum_v contr(u,v) - 2 charge(u, n(u))).
/// Errors if a claw-shaped improvement exists (the bound needs terminality).
pub fn approximation_bound(
    graph: &ConflictGraph,
    sol: &Solution,
    reference: &[usize],
) -> Result<BoundDecomposition, AnalysisError> {
    if find_claw_shaped_improvement(graph, sol).is_some() {
        return Err(AnalysisError::ClawExists);
    }
    let ref_sol = Solution::from_indices(graph, reference.iter().copied())?;
    let charges = compute_charges(graph, sol, reference)?;
    let two = rat(2, 1);

    let mut missing_sum = Rat::zero();
    for v in sol.iter() {
        let deg = graph.neighborhood(&[v], &ref_sol).len();
        let missing = Rat::from_integer(BigInt::from((graph.k() - deg) as u64));
        missing_sum += missing * graph.weight(v).rat();
    }
    let mut slack_sum = Rat::zero();
    for &u in reference {
        let nu = graph.neighborhood(&[u], sol);
        let contr_sum: Rat = nu.iter().map(|&v| contribution(graph, sol, u, v)).sum();
        slack_sum += contr_sum - &two * &charges.charge[&u];
    }
    let k_plus = Rat::from_integer(BigInt::from(graph.k() as u64 + 1));
    let base = &k_plus / &two * sol.weight();
    let bound = &base - &missing_sum / &two - &slack_sum / &two;
    Ok(BoundDecomposition {
        base,
        missing_sum,
        slack_sum,
        bound,
        solution_weight: sol.weight().clone(),
        reference_weight: ref_sol.weight().clone(),
    })
}

// ---------------------------------------------------------------------------
// Helpful-neighbor weighted sums and their thresholds

#[derive(Debug, Clone, Serialize)]
pub struct HelpfulSums {
    /// sum over v in A of |help(v) ∩ A*| w(v).
    #[serde(serialize_with = "ser_rat")]
    pub sum_all: Rat,
    /// Same sum restricted to A'.
    #[serde(serialize_with = "ser_rat")]
    pub sum_a_prime: Rat,
    /// 2 rho (1+eps)^3 / (1-eps^2) * w(A).
    #[serde(serialize_with = "ser_rat")]
    pub threshold_all: Rat,
    /// (2+kappa)(1+eps)^2 / (2+eps) * w(A).
    #[serde(serialize_with = "ser_rat")]
    pub threshold_a_prime: Rat,
}

pub fn helpful_weighted_sums(graph: &ConflictGraph, report: &AnalysisReport) -> HelpfulSums {
    let eps = &report.eps;
    let one = Rat::one();
    let two = rat(2, 1);
    let one_plus = &one + eps;
    let rho = rho(report.k, eps);
    let kappa = kappa_for(eps);

    let mut sum_all = Rat::zero();
    let mut sum_a_prime = Rat::zero();
    for entry in &report.per_solution {
        let w = graph.weight(entry.vertex).rat();
        let term = Rat::from_integer(BigInt::from(entry.helpful_count as u64)) * w;
        if report.a_prime.contains(&entry.vertex) {
            sum_a_prime += &term;
        }
        sum_all += term;
    }
    let w_a = &report.solution_weight;
    let threshold_all = &two * &rho * &one_plus * &one_plus * &one_plus / (&one - eps * eps) * w_a;
    let threshold_a_prime = (&two + &kappa) * &one_plus * &one_plus / (&two + eps) * w_a;
    HelpfulSums {
        sum_all,
        sum_a_prime,
        threshold_all,
        threshold_a_prime,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_k3_hard, generate_tight_example};
    use crate::weight::rat;

    fn setup(li: &crate::instance::LabeledInstance) -> (ConflictGraph, Solution, Vec<usize>) {
        let g = ConflictGraph::build(&li.instance);
        let start = g
            .indices_of(li.adversarial_start.as_ref().unwrap())
            .unwrap();
        let planted = g.indices_of(li.planted_solution.as_ref().unwrap()).unwrap();
        let sol = Solution::from_indices(&g, start).unwrap();
        (g, sol, planted)
    }

    #[test]
    fn kappa_matches_ceiling_rule() {
        assert_eq!(kappa_for(&dec("0.01422")), rat(1, 71));
        assert_eq!(kappa_for(&dec("0.084")), rat(1, 12));
        assert_eq!(kappa_for(&rat(1, 3)), rat(1, 3));
    }

    #[test]
    fn tight_example_has_no_missing_neighbors() {
        let li = generate_tight_example(4, 4).unwrap();
        let (g, sol, planted) = setup(&li);
        let report = classify(&g, &sol, &planted, &eps_default(4)).unwrap();
        for entry in &report.per_solution {
            assert_eq!(entry.missing, 0);
            assert_eq!(entry.helpful_count, 4);
        }
        assert!(report.a_prime.is_empty());
    }

    #[test]
    fn reference_member_is_special_for_itself() {
        // A = A* = {s}: support empty, u special for itself.
        use crate::instance::{Instance, SetDef};
        use crate::weight::Weight;
        let inst = Instance::new(
            3,
            vec![SetDef {
                id: "s".into(),
                elements: vec!["x".into()],
                weight: Weight::from_int(2).unwrap(),
            }],
        )
        .unwrap();
        let g = ConflictGraph::build(&inst);
        let sol = Solution::from_indices(&g, [0]).unwrap();
        let report = classify(&g, &sol, &[0], &rat(1, 10)).unwrap();
        let u = &report.per_reference[0];
        assert_eq!(u.special_for, Some(0));
        assert!(u.support.is_empty());
        assert!(report.a_prime.is_empty());
    }

    #[test]
    fn k3_hard_a_prime_is_yellow_with_green_specials() {
        let eps = rat(1, 10);
        let li = generate_k3_hard(2, &eps).unwrap();
        let (g, sol, planted) = setup(&li);
        let report = classify(&g, &sol, &planted, &eps).unwrap();
        let yellows: Vec<usize> = sol.iter().filter(|&v| g.id(v).starts_with('y')).collect();
        assert_eq!(report.a_prime, yellows);
        for entry in &report.per_solution {
            if g.id(entry.vertex).starts_with('y') {
                let t = entry.special_neighbor.expect("yellow has its green");
                assert!(g.id(t).starts_with('g'));
                assert_eq!(entry.helpful_count, 2);
            } else {
                assert_eq!(entry.special_neighbor, None);
                assert_eq!(entry.helpful_count, 3);
            }
        }
    }

    #[test]
    fn bound_is_tight_on_tight_example() {
        for (k, n) in [(3, 4), (4, 4), (5, 6)] {
            let li = generate_tight_example(k, n).unwrap();
            let (g, sol, planted) = setup(&li);
            let dec = approximation_bound(&g, &sol, &planted).unwrap();
            assert!(dec.missing_sum.is_zero());
            assert!(dec.slack_sum.is_zero());
            assert_eq!(dec.bound, dec.reference_weight);
        }
    }

    #[test]
    fn bound_on_singleton_instance() {
        use crate::instance::{Instance, SetDef};
        use crate::weight::Weight;
        let inst = Instance::new(
            3,
            vec![SetDef {
                id: "s".into(),
                elements: vec!["x".into()],
                weight: Weight::from_int(2).unwrap(),
            }],
        )
        .unwrap();
        let g = ConflictGraph::build(&inst);
        let sol = Solution::from_indices(&g, [0]).unwrap();
        let dec = approximation_bound(&g, &sol, &[0]).unwrap();
        // (k+1)/2 w - (k-1)/2 w - 0 = w.
        assert_eq!(dec.bound, rat(2, 1));
    }

    #[test]
    fn bound_requires_terminality() {
        use crate::instance::{Instance, SetDef};
        use crate::weight::Weight;
        let inst = Instance::new(
            2,
            vec![
                SetDef {
                    id: "small".into(),
                    elements: vec!["x".into()],
                    weight: Weight::from_int(1).unwrap(),
                },
                SetDef {
                    id: "big".into(),
                    elements: vec!["x".into(), "y".into()],
                    weight: Weight::from_int(3).unwrap(),
                },
            ],
        )
        .unwrap();
        let g = ConflictGraph::build(&inst);
        let sol = Solution::from_indices(&g, [0]).unwrap();
        assert!(matches!(
            approximation_bound(&g, &sol, &[1]),
            Err(AnalysisError::ClawExists)
        ));
    }

    #[test]
    fn guarantee_formula_examples() {
        // Table row k = 4.
        let g4 = guarantee_formula(4, &dec("0.01422"), &dec("0.001764")).unwrap();
        assert!(g4 <= dec("2.4998"));
        assert!(g4 > dec("2.4993"));
        // Asymptotic row at k = 14.
        let g14 = guarantee_formula(14, &dec("0.084"), &dec("0.01")).unwrap();
        assert!(g14 <= dec("0.4986") * rat(15, 1) + dec("0.0208"));
        // xi = 0 collapses to (k+1)/2.
        let g0 = guarantee_formula(9, &dec("0.05"), &Rat::zero()).unwrap();
        assert_eq!(g0, rat(5, 1));
        // Domain errors.
        assert!(guarantee_formula(3, &dec("0.05"), &dec("0.01")).is_err());
        assert!(guarantee_formula(5, &rat(1, 1), &dec("0.01")).is_err());
    }

    #[test]
    fn table_rows_validate() {
        for row in constants_table() {
            let report = validate_constants(&row.eps, &row.xi);
            assert!(report.pass, "row k = {}: {report:?}", row.k_lo);
        }
    }

    #[test]
    fn bad_constants_fail() {
        // eps = 0.2, xi = 0.2 violates the xi cap eps/(4(2+eps)).
        let report = validate_constants(&rat(1, 5), &rat(1, 5));
        assert!(!report.pass);
        let xi3 = report.checks.iter().find(|c| c.name == "EqXi3").unwrap();
        assert!(!xi3.pass);
    }

    #[test]
    fn eps_boundary_one_seventh() {
        // The first group is equivalent to eps <= 1/7; equality holds.
        let ok = validate_constants(&rat(1, 7), &rat(1, 1000));
        assert!(ok.checks.iter().find(|c| c.name == "EqEps1").unwrap().pass);
        let bad = validate_constants(&dec("0.15"), &rat(1, 1000));
        assert!(!bad.checks.iter().find(|c| c.name == "EqEps1").unwrap().pass);
    }

    #[test]
    fn helpful_sums_on_k3_hard() {
        let eps = rat(1, 10);
        let li = generate_k3_hard(1, &eps).unwrap();
        let (g, sol, planted) = setup(&li);
        let report = classify(&g, &sol, &planted, &eps).unwrap();
        let sums = helpful_weighted_sums(&g, &report);
        // 2 yellows x 2 helpful + 2 reds x 3 helpful, unit weights.
        assert_eq!(sums.sum_all, rat(10, 1));
        assert_eq!(sums.sum_a_prime, rat(4, 1));
        assert!(sums.threshold_all.is_positive());
        assert!(sums.threshold_a_prime.is_positive());
    }

    #[test]
    fn helpful_sums_zero_when_solution_is_reference() {
        let li = generate_tight_example(3, 4).unwrap();
        let g = ConflictGraph::build(&li.instance);
        let planted = g.indices_of(li.planted_solution.as_ref().unwrap()).unwrap();
        let sol = Solution::from_indices(&g, planted.clone()).unwrap();
        let report = classify(&g, &sol, &planted, &eps_default(3)).unwrap();
        let sums = helpful_weighted_sums(&g, &report);
        assert!(sums.sum_all.is_zero());
        assert!(sums.sum_a_prime.is_zero());
        assert!(sums.threshold_all.is_positive());
    }
}
