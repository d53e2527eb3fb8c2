//! Products and generated subalgebras.

use std::collections::{BTreeSet, HashMap};

use crate::term::{BinaryOp, UnaryOp};

use super::{Elem, FiniteAlgebra, Homomorphism, JTables};

/// Builds an algebra whose carrier is `elems`, operations computed by `op`
/// and mapped back through `index`.
fn tabulate<T: Clone + Eq + std::hash::Hash>(
    name: String,
    elems: &[T],
    labels: Vec<String>,
    with_j: bool,
    zero: &T,
    one: &T,
    unary: impl Fn(UnaryOp, &T) -> T,
    binary: impl Fn(BinaryOp, &T, &T) -> T,
) -> FiniteAlgebra {
    let index: HashMap<&T, Elem> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let at = |e: &T| *index.get(e).expect("carrier closed under operations");
    let un = |op| elems.iter().map(|e| at(&unary(op, e))).collect::<Vec<_>>();
    let bin = |op| {
        let mut t = Vec::with_capacity(elems.len() * elems.len());
        for x in elems {
            for y in elems {
                t.push(at(&binary(op, x, y)));
            }
        }
        t
    };
    let j = match with_j {
        true => JTables::Full([un(UnaryOp::J0), un(UnaryOp::J1), un(UnaryOp::J2)]),
        false => JTables::None,
    };
    FiniteAlgebra::new(name, labels, at(zero), at(one), un(UnaryOp::Neg), bin(BinaryOp::Or), bin(BinaryOp::And), j)
        .expect("tabulated algebra is valid")
}

/// `A × B`; pair `(i, j)` has index `i * |B| + j`. J is kept only if both
/// factors have it.
pub fn direct_product(a: &FiniteAlgebra, b: &FiniteAlgebra) -> FiniteAlgebra {
    let pairs: Vec<(Elem, Elem)> = (0..a.size()).flat_map(|i| (0..b.size()).map(move |j| (i, j))).collect();
    let labels = pairs.iter().map(|&(i, j)| format!("({},{})", a.label(i), b.label(j))).collect();
    let with_j = a.has_j() && b.has_j();
    tabulate(
        format!("{}x{}", a.name(), b.name()),
        &pairs,
        labels,
        with_j,
        &(a.zero(), b.zero()),
        &(a.one(), b.one()),
        |op, &(x, y)| (a.unary(op, x), b.unary(op, y)),
        |op, &(x1, y1), &(x2, y2)| (a.binary(op, x1, x2), b.binary(op, y1, y2)),
    )
}

/// Subalgebra generated by `seed` (constants always included), in the
/// carrier order of `a`, with its inclusion map.
pub fn subalgebra_generated(a: &FiniteAlgebra, seed: &[Elem]) -> (FiniteAlgebra, Homomorphism) {
    let mut members = vec![false; a.size()];
    let mut queue: Vec<Elem> = Vec::new();
    for &x in seed.iter().chain(&[a.zero(), a.one()]) {
        if !members[x] {
            members[x] = true;
            queue.push(x);
        }
    }
    let mut done: Vec<Elem> = Vec::new();
    while let Some(x) = queue.pop() {
        let mut found = Vec::new();
        for &op in a.unary_ops() {
            found.push(a.unary(op, x));
        }
        for &y in done.iter().chain([&x]) {
            for op in BinaryOp::ALL {
                found.push(a.binary(op, x, y));
                found.push(a.binary(op, y, x));
            }
        }
        done.push(x);
        for z in found {
            if !members[z] {
                members[z] = true;
                queue.push(z);
            }
        }
    }
    let elems: Vec<Elem> = (0..a.size()).filter(|&x| members[x]).collect();
    let labels = elems.iter().map(|&x| a.label(x).to_string()).collect();
    let sub = tabulate(
        format!("sub({})", a.name()),
        &elems,
        labels,
        a.has_j(),
        &a.zero(),
        &a.one(),
        |op, &x| a.unary(op, x),
        |op, &x, &y| a.binary(op, x, y),
    );
    (sub, Homomorphism::new(elems))
}

/// A subalgebra of a finite power `G^P`, with each element's tuple.
#[derive(Clone, Debug)]
pub struct PowerSubalgebra {
    pub algebra: FiniteAlgebra,
    pub tuples: Vec<Vec<Elem>>,
}

impl PowerSubalgebra {
    /// Projection onto coordinate `p`.
    pub fn projection(&self, p: usize) -> Homomorphism {
        Homomorphism::new(self.tuples.iter().map(|t| t[p]).collect())
    }
}

/// Subalgebra of `G^P` generated by `generators` (each of length `P`).
/// Elements are listed in lexicographic tuple order and labelled by their
/// tuples.
pub fn power_subalgebra(g: &FiniteAlgebra, generators: &[Vec<Elem>], name: &str) -> PowerSubalgebra {
    let width = generators.first().map_or(0, Vec::len);
    assert!(generators.iter().all(|t| t.len() == width), "generator tuples differ in length");
    let zero = vec![g.zero(); width];
    let one = vec![g.one(); width];
    let mut members: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let mut queue: Vec<Vec<Elem>> = Vec::new();
    for t in generators.iter().chain([&zero, &one]) {
        if members.insert(t.clone()) {
            queue.push(t.clone());
        }
    }
    let un = |op, t: &[Elem]| t.iter().map(|&x| g.unary(op, x)).collect::<Vec<_>>();
    let bin = |op, s: &[Elem], t: &[Elem]| s.iter().zip(t).map(|(&x, &y)| g.binary(op, x, y)).collect::<Vec<_>>();
    let mut done: Vec<Vec<Elem>> = Vec::new();
    while let Some(x) = queue.pop() {
        let mut found = Vec::new();
        for &op in g.unary_ops() {
            found.push(un(op, &x));
        }
        for y in done.iter().chain([&x]) {
            for op in BinaryOp::ALL {
                found.push(bin(op, &x, y));
                found.push(bin(op, y, &x));
            }
        }
        done.push(x);
        for z in found {
            if members.insert(z.clone()) {
                queue.push(z);
            }
        }
    }
    let tuples: Vec<Vec<Elem>> = members.into_iter().collect();
    let labels = tuples
        .iter()
        .map(|t| format!("({})", t.iter().map(|&x| g.label(x)).collect::<Vec<_>>().join(",")))
        .collect();
    let algebra = tabulate(
        name.to_string(),
        &tuples,
        labels,
        g.has_j(),
        &zero,
        &one,
        |op, t| un(op, t),
        |op, s, t| bin(op, s, t),
    );
    PowerSubalgebra { algebra, tuples }
}
