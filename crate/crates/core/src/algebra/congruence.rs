//! Congruences by partition closure.

use std::collections::BTreeSet;

use crate::term::BinaryOp;

use super::{Elem, FiniteAlgebra, Homomorphism, JTables};

/// An equivalence on the carrier, stored as a block number per element.
/// Blocks are numbered in order of their least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence {
    block: Vec<usize>,
}

impl Congruence {
    pub fn identity(n: usize) -> Self {
        Congruence { block: (0..n).collect() }
    }

    pub fn total(n: usize) -> Self {
        Congruence { block: vec![0; n] }
    }

    /// Normalizes arbitrary block labels.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut seen: Vec<usize> = Vec::new();
        let block = labels
            .iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(i) => i,
                None => {
                    seen.push(*l);
                    seen.len() - 1
                }
            })
            .collect();
        Congruence { block }
    }

    pub fn block_of(&self, x: Elem) -> usize {
        self.block[x]
    }

    pub fn related(&self, x: Elem, y: Elem) -> bool {
        self.block[x] == self.block[y]
    }

    pub fn block_count(&self) -> usize {
        self.block.iter().max().map_or(0, |m| m + 1)
    }

    pub fn blocks(&self) -> Vec<Vec<Elem>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &b) in self.block.iter().enumerate() {
            out[b].push(x);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.block_count() == self.block.len()
    }

    pub fn is_total(&self) -> bool {
        self.block_count() == 1
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Congruence) -> bool {
        (0..self.block.len()).all(|x| (0..x).all(|y| !self.related(x, y) || other.related(x, y)))
    }

    /// Join as equivalence relations. The join of two congruences is again a
    /// congruence.
    pub fn join(&self, other: &Congruence) -> Congruence {
        let mut uf = UnionFind::new(self.block.len());
        for x in 0..self.block.len() {
            uf.union(x, self.first_in_block(x));
            uf.union(x, other.first_in_block(x));
        }
        uf.into_congruence()
    }

    fn first_in_block(&self, x: Elem) -> Elem {
        self.block.iter().position(|&b| b == self.block[x]).unwrap()
    }

    /// True if every operation of `a` respects the partition.
    pub fn is_compatible(&self, a: &FiniteAlgebra) -> bool {
        let n = a.size();
        for x in 0..n {
            let r = self.first_in_block(x);
            if r == x {
                continue;
            }
            for &op in a.unary_ops() {
                if !self.related(a.unary(op, x), a.unary(op, r)) {
                    return false;
                }
            }
            for z in 0..n {
                for op in BinaryOp::ALL {
                    if !self.related(a.binary(op, x, z), a.binary(op, r, z))
                        || !self.related(a.binary(op, z, x), a.binary(op, z, r))
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `{a,b} {c}` using labels.
    pub fn describe(&self, a: &FiniteAlgebra) -> String {
        self.blocks()
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|&x| a.label(x)).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    /// True if two different classes were merged.
    fn union(&mut self, x: usize, y: usize) -> bool {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx == ry {
            return false;
        }
        let (lo, hi) = if rx < ry { (rx, ry) } else { (ry, rx) };
        self.parent[hi] = lo;
        true
    }

    fn into_congruence(mut self) -> Congruence {
        let labels: Vec<usize> = (0..self.parent.len()).map(|x| self.find(x)).collect();
        Congruence::from_labels(&labels)
    }
}

/// Least congruence containing the given pairs.
pub fn generated_congruence(a: &FiniteAlgebra, pairs: &[(Elem, Elem)]) -> Congruence {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    for &(x, y) in pairs {
        uf.union(x, y);
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            let r = uf.find(x);
            if r == x {
                continue;
            }
            for &op in a.unary_ops() {
                changed |= uf.union(a.unary(op, x), a.unary(op, r));
            }
            for z in 0..n {
                for op in BinaryOp::ALL {
                    changed |= uf.union(a.binary(op, x, z), a.binary(op, r, z));
                    changed |= uf.union(a.binary(op, z, x), a.binary(op, z, r));
                }
            }
        }
        if !changed {
            return uf.into_congruence();
        }
    }
}

/// Least congruence identifying `x` and `y`.
pub fn principal_congruence(a: &FiniteAlgebra, x: Elem, y: Elem) -> Congruence {
    generated_congruence(a, &[(x, y)])
}

/// Every congruence of `a`, as joins of principal ones, sorted.
pub fn all_congruences(a: &FiniteAlgebra) -> Vec<Congruence> {
    let n = a.size();
    let mut principal: BTreeSet<Congruence> = BTreeSet::new();
    for x in 0..n {
        for y in 0..x {
            principal.insert(principal_congruence(a, x, y));
        }
    }
    let mut all: BTreeSet<Congruence> = BTreeSet::new();
    all.insert(Congruence::identity(n));
    let mut frontier: Vec<Congruence> = vec![Congruence::identity(n)];
    while let Some(c) = frontier.pop() {
        for p in &principal {
            let j = c.join(p);
            if all.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    all.into_iter().collect()
}

/// Quotient algebra, one element per block (labelled by its least member),
/// with the projection.
pub fn quotient(a: &FiniteAlgebra, theta: &Congruence) -> (FiniteAlgebra, Homomorphism) {
    let blocks = theta.blocks();
    let reps: Vec<Elem> = blocks.iter().map(|b| b[0]).collect();
    let m = reps.len();
    let q = |x: Elem| theta.block_of(x);
    let neg = reps.iter().map(|&r| q(a.neg(r))).collect();
    let mut join = Vec::with_capacity(m * m);
    let mut meet = Vec::with_capacity(m * m);
    for &x in &reps {
        for &y in &reps {
            join.push(q(a.join(x, y)));
            meet.push(q(a.meet(x, y)));
        }
    }
    let j = match a.has_j() {
        true => JTables::Full([0, 1, 2].map(|k| reps.iter().map(|&r| q(a.jk(k, r))).collect())),
        false => JTables::None,
    };
    let labels = reps.iter().map(|&r| a.label(r).to_string()).collect();
    let alg = FiniteAlgebra::new(format!("{}/theta", a.name()), labels, q(a.zero()), q(a.one()), neg, join, meet, j)
        .expect("quotient of a valid algebra is valid");
    (alg, Homomorphism::new((0..a.size()).map(q).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{b2, b4, b4_plus_b2, find_isomorphism, wke};

    /// Every set partition, as restricted growth strings.
    fn all_partitions(n: usize) -> Vec<Congruence> {
        fn go(i: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Congruence>) {
            if i == n {
                out.push(Congruence::from_labels(cur));
                return;
            }
            let max = cur.iter().copied().max().map_or(0, |m| m + 1);
            for b in 0..=max {
                cur.push(b);
                go(i + 1, n, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(0, n, &mut Vec::new(), &mut out);
        out
    }

    #[test]
    fn partition_count() {
        assert_eq!(all_partitions(6).len(), 203);
    }

    #[test]
    fn principal_examples() {
        let a = b4();
        let one = a.element("1").unwrap();
        let na = a.element("na").unwrap();
        assert!(principal_congruence(&a, one, one).is_identity());
        let theta = principal_congruence(&a, one, na);
        assert_eq!(theta.describe(&a), "{1,na} {0,a}");
        let (q, proj) = quotient(&a, &theta);
        assert!(find_isomorphism(&q, &b2()).is_some());
        assert!(proj.is_homomorphism(&a, &q));
        assert!(proj.is_surjective(q.size()));

        let w = wke();
        // H is never forced into the class of the constants
        assert_eq!(principal_congruence(&w, w.zero(), w.one()).describe(&w), "{1,0} {H}");
        let h = w.element("H").unwrap();
        assert!(principal_congruence(&w, w.zero(), h).is_total());
    }

    #[test]
    fn enumeration_matches_partition_scan() {
        for a in [b2(), wke(), b4(), b4_plus_b2()] {
            let brute: Vec<Congruence> = {
                let mut v: Vec<_> = all_partitions(a.size()).into_iter().filter(|c| c.is_compatible(&a)).collect();
                v.sort();
                v
            };
            assert_eq!(all_congruences(&a), brute, "{}", a.name());
        }
    }

    #[test]
    fn quotient_kernel_is_theta() {
        let a = b4_plus_b2();
        for theta in all_congruences(&a) {
            let (q, proj) = quotient(&a, &theta);
            assert!(proj.is_homomorphism(&a, &q));
            for x in 0..a.size() {
                for y in 0..a.size() {
                    assert_eq!(proj.apply(x) == proj.apply(y), theta.related(x, y));
                }
            }
        }
    }
}
