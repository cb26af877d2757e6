//! Instance generators: the two adversarial constructions and a seeded
//! random family.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, InstanceError, LabeledInstance, SetDef};
use crate::weight::{rat, Rat, Weight};

/// The unit-weight worst-case family for claw-shaped local search,
/// realized globally.
///
/// The base solution `A` consists of `n` sets of size `k`. A (k-1)-regular
/// circulant graph `H` on their index set fixes the global topology: each
/// edge {i, j} of `H` yields a size-2 planted set sharing one private element
/// with set i and one with set j, and each set i additionally carries a
/// size-1 planted set on its remaining element. All weights are 1.
///
/// The result satisfies |N(v, A*)| = k for every v in A and
/// w(A*) = (k+1)/2 * w(A), and `adversarial_start = A` admits no claw-shaped
/// improvement.
pub fn generate_tight_example(k: usize, n: usize) -> Result<LabeledInstance, InstanceError> {
    if k < 3 {
        return Err(InstanceError::Parameter(format!(
            "tight example requires k >= 3, got {k}"
        )));
    }
    if n < k {
        return Err(InstanceError::Parameter(format!(
            "tight example requires n >= k, got n = {n}, k = {k}"
        )));
    }
    if !((k - 1) * n).is_multiple_of(2) {
        return Err(InstanceError::Parameter(format!(
            "(k-1)*n must be even for a (k-1)-regular graph, got k = {k}, n = {n}"
        )));
    }

    let edges = circulant_edges(n, k - 1);
    debug_assert_eq!(edges.len(), n * (k - 1) / 2);

    let mut sets = Vec::new();
    let mut base_elements: Vec<Vec<String>> = vec![Vec::new(); n];
    let mut planted = Vec::new();

    // One degree-2 planted set per edge of H.
    for &(i, j) in &edges {
        let ei = format!("x{i}_{j}");
        let ej = format!("x{j}_{i}");
        base_elements[i].push(ei.clone());
        base_elements[j].push(ej.clone());
        let id = format!("p{i}-{j}");
        planted.push(id.clone());
        sets.push(SetDef {
            id,
            elements: vec![ei, ej],
            weight: Weight::one(),
        });
    }
    // One degree-1 planted set per base set, on its remaining element.
    for (i, base) in base_elements.iter_mut().enumerate() {
        let e = format!("y{i}");
        base.push(e.clone());
        let id = format!("s{i}");
        planted.push(id.clone());
        sets.push(SetDef {
            id,
            elements: vec![e],
            weight: Weight::one(),
        });
    }
    let mut adversarial = Vec::new();
    for (i, elements) in base_elements.into_iter().enumerate() {
        debug_assert_eq!(elements.len(), k);
        let id = format!("a{i}");
        adversarial.push(id.clone());
        sets.push(SetDef {
            id,
            elements,
            weight: Weight::one(),
        });
    }

    let instance = Instance::new(k, sets)?;
    LabeledInstance::new(instance, Some(planted), Some(adversarial))
}

/// Edge list of the (degree)-regular circulant graph on n vertices:
/// offsets 1..=degree/2, plus the antipodal offset n/2 when degree is odd.
fn circulant_edges(n: usize, degree: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for d in 1..=degree / 2 {
        for i in 0..n {
            let j = (i + d) % n;
            edges.push((i.min(j), i.max(j)));
        }
    }
    if degree % 2 == 1 {
        debug_assert_eq!(n % 2, 0);
        for i in 0..n / 2 {
            edges.push((i, i + n / 2));
        }
    }
    edges.sort();
    edges.dedup();
    edges
}

/// The hard instance for k = 3: a cycle of length 8m colored
/// red/blue/yellow/blue, one extra blue vertex per opposite red pair, and one
/// green pendant of weight 1 - 2*eps per yellow vertex. Each graph vertex
/// becomes the set of its incident edges, so the conflict graph of the
/// instance is the source graph itself.
///
/// planted = blue and green vertices, adversarial = red and yellow ones;
/// no local improvement of size <= 3 exists from the adversarial start, and
/// w(A*)/w(A) = (7 - 4*eps)/4.
pub fn generate_k3_hard(m: usize, eps: &Rat) -> Result<LabeledInstance, InstanceError> {
    if m == 0 {
        return Err(InstanceError::Parameter("m must be positive".into()));
    }
    if *eps <= Rat::zero() || *eps >= rat(1, 2) {
        return Err(InstanceError::Parameter(format!(
            "eps must lie strictly between 0 and 1/2, got {eps}"
        )));
    }
    let len = 8 * m;
    let cycle_edge = |i: usize| format!("c{i}");
    let green_weight = Weight::new(Rat::one() - rat(2, 1) * eps).expect("eps < 1/2");

    let mut sets = Vec::new();
    let mut planted = Vec::new();
    let mut adversarial = Vec::new();
    for i in 0..len {
        let mut elements = vec![cycle_edge((i + len - 1) % len), cycle_edge(i)];
        let id = match i % 4 {
            0 => {
                // Red: one endpoint of a chord to the opposite red vertex.
                let pair = (i % (4 * m)) / 4;
                let end = if i < 4 * m { "a" } else { "b" };
                elements.push(format!("h{pair}{end}"));
                let id = format!("r{i}");
                adversarial.push(id.clone());
                id
            }
            2 => {
                // Yellow: carries the pendant edge to its green vertex.
                elements.push(format!("q{i}"));
                let id = format!("y{i}");
                adversarial.push(id.clone());
                id
            }
            _ => {
                let id = format!("b{i}");
                planted.push(id.clone());
                id
            }
        };
        sets.push(SetDef {
            id,
            elements,
            weight: Weight::one(),
        });
    }
    for pair in 0..m {
        let id = format!("xb{pair}");
        planted.push(id.clone());
        sets.push(SetDef {
            id,
            elements: vec![format!("h{pair}a"), format!("h{pair}b")],
            weight: Weight::one(),
        });
    }
    for i in (2..len).step_by(4) {
        let id = format!("g{i}");
        planted.push(id.clone());
        sets.push(SetDef {
            id,
            elements: vec![format!("q{i}")],
            weight: green_weight.clone(),
        });
    }

    let instance = Instance::new(3, sets)?;
    LabeledInstance::new(instance, Some(planted), Some(adversarial))
}

/// Seeded random instance: each set draws a uniform size in 1..=k, distinct
/// elements uniform over the universe, and a weight uniform on a rational
/// grid over `weight_range`.
pub fn generate_random(
    k: usize,
    num_sets: usize,
    universe_size: usize,
    weight_range: (&Rat, &Rat),
    seed: u64,
) -> Result<Instance, InstanceError> {
    if k == 0 {
        return Err(InstanceError::BadK(k));
    }
    if num_sets == 0 {
        return Err(InstanceError::Parameter("num_sets must be >= 1".into()));
    }
    if universe_size < k {
        return Err(InstanceError::Parameter(format!(
            "universe_size must be at least k, got {universe_size} < {k}"
        )));
    }
    let (lo, hi) = weight_range;
    if lo > hi {
        return Err(InstanceError::Parameter(format!(
            "empty weight range [{lo}, {hi}]"
        )));
    }
    if *lo <= Rat::zero() {
        return Err(InstanceError::Parameter(
            "weight range must be strictly positive".into(),
        ));
    }

    const GRID: i64 = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = hi - lo;
    let mut sets = Vec::with_capacity(num_sets);
    for s in 0..num_sets {
        let size = rng.gen_range(1..=k);
        let mut elements = Vec::with_capacity(size);
        while elements.len() < size {
            let e = format!("e{}", rng.gen_range(0..universe_size));
            if !elements.contains(&e) {
                elements.push(e);
            }
        }
        let weight = if span.is_zero() {
            Weight::new(lo.clone()).expect("positive range")
        } else {
            let t = rng.gen_range(0..=GRID);
            let value = lo + &span * rat(t, GRID);
            Weight::new(value).expect("positive range")
        };
        sets.push(SetDef {
            id: format!("t{s}"),
            elements,
            weight,
        });
    }
    Instance::new(k, sets)
}

/// Exact planted-over-adversarial weight ratio of a labeled instance.
pub fn label_ratio(li: &LabeledInstance) -> Option<Rat> {
    let planted = li.planted_solution.as_ref()?;
    let start = li.adversarial_start.as_ref()?;
    let weight_of = |ids: &[String]| -> Rat {
        ids.iter()
            .map(|id| {
                let idx = li.instance.index_of(id).expect("validated label");
                li.instance.sets()[idx].weight.rat().clone()
            })
            .fold(Rat::zero(), |a, b| a + b)
    };
    let denom = weight_of(start);
    if denom.is_zero() {
        return None;
    }
    Some(weight_of(planted) / denom)
}

/// Total weight of the named sets.
pub fn ids_weight(instance: &Instance, ids: &[String]) -> Rat {
    ids.iter()
        .map(|id| {
            let idx = instance.index_of(id).expect("known id");
            instance.sets()[idx].weight.rat().clone()
        })
        .fold(Rat::zero(), |a, b| a + b)
}
