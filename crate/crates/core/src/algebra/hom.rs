//! Homomorphism search.

use crate::term::{BinaryOp, UnaryOp};

use super::{Elem, FiniteAlgebra};

/// A map between carriers, one target index per source element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    pub map: Vec<Elem>,
}

impl Homomorphism {
    pub fn new(map: Vec<Elem>) -> Self {
        Homomorphism { map }
    }

    pub fn identity(n: usize) -> Self {
        Homomorphism { map: (0..n).collect() }
    }

    pub fn apply(&self, x: Elem) -> Elem {
        self.map[x]
    }

    /// `then ∘ self`.
    pub fn then(&self, then: &Homomorphism) -> Homomorphism {
        Homomorphism { map: self.map.iter().map(|&x| then.map[x]).collect() }
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.map.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_surjective(&self, target_size: usize) -> bool {
        let mut hit = vec![false; target_size];
        for &y in &self.map {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Full table scan over the operations `a` and `b` share.
    pub fn check(&self, a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<(), String> {
        let n = a.size();
        if self.map.len() != n || self.map.iter().any(|&y| y >= b.size()) {
            return Err("map has the wrong shape".into());
        }
        let h = |x| self.map[x];
        if h(a.zero()) != b.zero() || h(a.one()) != b.one() {
            return Err("constants not preserved".into());
        }
        for &op in shared_unary(a, b) {
            for x in 0..n {
                if h(a.unary(op, x)) != b.unary(op, h(x)) {
                    return Err(format!("{} not preserved at {}", op.symbol(), a.label(x)));
                }
            }
        }
        for op in BinaryOp::ALL {
            for x in 0..n {
                for y in 0..n {
                    if h(a.binary(op, x, y)) != b.binary(op, h(x), h(y)) {
                        return Err(format!("{} not preserved at ({}, {})", op.symbol(), a.label(x), a.label(y)));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_homomorphism(&self, a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
        self.check(a, b).is_ok()
    }

    pub fn is_embedding(&self, a: &FiniteAlgebra, b: &FiniteAlgebra) -> bool {
        self.is_homomorphism(a, b) && self.is_injective()
    }

    /// `a ↦ b` listing using labels.
    pub fn describe(&self, a: &FiniteAlgebra, b: &FiniteAlgebra) -> String {
        self.map.iter().enumerate().map(|(x, &y)| format!("{}->{}", a.label(x), b.label(y))).collect::<Vec<_>>().join(" ")
    }

    /// Parses `a->b c->d ...`; every source element must be listed once.
    pub fn parse(text: &str, a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<Homomorphism, String> {
        let mut map = vec![None; a.size()];
        for item in text.split_whitespace() {
            let (x, y) = item.split_once("->").ok_or_else(|| format!("expected `x->y`, found `{item}`"))?;
            let x = a.element(x).map_err(|e| e.to_string())?;
            let y = b.element(y).map_err(|e| e.to_string())?;
            if map[x].replace(y).is_some() {
                return Err(format!("`{}` mapped twice", a.label(x)));
            }
        }
        map.into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| format!("`{}` not mapped", a.label(x))))
            .collect::<Result<_, _>>()
            .map(Homomorphism::new)
    }
}

pub(crate) fn shared_unary(a: &FiniteAlgebra, b: &FiniteAlgebra) -> &'static [UnaryOp] {
    if a.has_j() && b.has_j() {
        &UnaryOp::ALL
    } else {
        &[UnaryOp::Neg]
    }
}

const UNSET: Elem = usize::MAX;

struct Search<'a> {
    a: &'a FiniteAlgebra,
    b: &'a FiniteAlgebra,
    unary: &'static [UnaryOp],
    injective: bool,
    allowed: Option<Vec<Vec<bool>>>,
    map: Vec<Elem>,
    used: Vec<bool>,
    trail: Vec<Elem>,
    limit: usize,
    out: Vec<Homomorphism>,
}

impl Search<'_> {
    fn set(&mut self, x: Elem, y: Elem, queue: &mut Vec<Elem>) -> bool {
        if self.map[x] != UNSET {
            return self.map[x] == y;
        }
        if self.injective && self.used[y] {
            return false;
        }
        if let Some(allowed) = &self.allowed {
            if !allowed[x][y] {
                return false;
            }
        }
        self.map[x] = y;
        self.used[y] = true;
        self.trail.push(x);
        queue.push(x);
        true
    }

    /// Assigns `x ↦ y` and everything it forces. False on conflict; the
    /// caller undoes through the trail.
    fn assign(&mut self, x: Elem, y: Elem) -> bool {
        let mut queue = Vec::new();
        if !self.set(x, y, &mut queue) {
            return false;
        }
        while let Some(x) = queue.pop() {
            let hx = self.map[x];
            for &op in self.unary {
                if !self.set(self.a.unary(op, x), self.b.unary(op, hx), &mut queue) {
                    return false;
                }
            }
            let mut i = 0;
            while i < self.trail.len() {
                let z = self.trail[i];
                let hz = self.map[z];
                for op in BinaryOp::ALL {
                    if !self.set(self.a.binary(op, x, z), self.b.binary(op, hx, hz), &mut queue)
                        || !self.set(self.a.binary(op, z, x), self.b.binary(op, hz, hx), &mut queue)
                    {
                        return false;
                    }
                }
                i += 1;
            }
        }
        true
    }

    fn undo(&mut self, len: usize) {
        while self.trail.len() > len {
            let x = self.trail.pop().unwrap();
            self.used[self.map[x]] = false;
            self.map[x] = UNSET;
        }
    }

    fn run(&mut self) {
        if self.out.len() >= self.limit {
            return;
        }
        let Some(x) = self.map.iter().position(|&y| y == UNSET) else {
            self.out.push(Homomorphism::new(self.map.clone()));
            return;
        };
        for y in 0..self.b.size() {
            let mark = self.trail.len();
            if self.assign(x, y) {
                self.run();
            }
            self.undo(mark);
            if self.out.len() >= self.limit {
                return;
            }
        }
    }
}

fn search(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    constraint: &[(Elem, Elem)],
    injective: bool,
    allowed: Option<Vec<Vec<bool>>>,
    limit: usize,
) -> Vec<Homomorphism> {
    if injective && a.size() > b.size() {
        return Vec::new();
    }
    let mut s = Search {
        a,
        b,
        unary: shared_unary(a, b),
        injective,
        allowed,
        map: vec![UNSET; a.size()],
        used: vec![false; b.size()],
        trail: Vec::new(),
        limit,
        out: Vec::new(),
    };
    let seeds = [(a.zero(), b.zero()), (a.one(), b.one())];
    for &(x, y) in seeds.iter().chain(constraint) {
        if y >= b.size() || !s.assign(x, y) {
            return Vec::new();
        }
    }
    s.run();
    s.out
}

/// All homomorphisms `a → b` extending `constraint`, in lexicographic
/// order of their map vectors.
pub fn enumerate_homomorphisms(a: &FiniteAlgebra, b: &FiniteAlgebra, constraint: &[(Elem, Elem)]) -> Vec<Homomorphism> {
    search(a, b, constraint, false, None, usize::MAX)
}

/// Equalities between simple unary terms in `x`. Embeddings preserve and
/// reflect all of them.
fn profile(a: &FiniteAlgebra, x: Elem, with_j: bool) -> u128 {
    let mut vals = vec![
        x,
        a.neg(x),
        a.zero(),
        a.one(),
        a.join(x, a.neg(x)),
        a.meet(x, a.neg(x)),
        a.join(x, a.zero()),
        a.meet(x, a.one()),
    ];
    if with_j {
        vals.extend([a.jk(0, x), a.jk(1, x), a.jk(2, x), a.jk(2, a.join(x, a.neg(x))), a.jk(1, a.jk(2, x))]);
    }
    let mut bits = 0u128;
    let mut k = 0;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            if vals[i] == vals[j] {
                bits |= 1 << k;
            }
            k += 1;
        }
    }
    bits
}

fn iso_profile(a: &FiniteAlgebra, x: Elem, with_j: bool) -> (u128, usize, usize, usize) {
    let n = a.size();
    let below = (0..n).filter(|&y| a.join(y, x) == x).count();
    let above = (0..n).filter(|&y| a.join(x, y) == y).count();
    let meet_below = (0..n).filter(|&y| a.meet(y, x) == y).count();
    (profile(a, x, with_j), below, above, meet_below)
}

fn allowed_by<K: PartialEq>(a: &FiniteAlgebra, b: &FiniteAlgebra, key: impl Fn(&FiniteAlgebra, Elem) -> K) -> Vec<Vec<bool>> {
    let kb: Vec<K> = (0..b.size()).map(|y| key(b, y)).collect();
    (0..a.size()).map(|x| {
        let kx = key(a, x);
        kb.iter().map(|k| *k == kx).collect()
    }).collect()
}

/// Some injective homomorphism `a → b`, the lexicographically least one.
pub fn find_embedding(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Homomorphism> {
    let with_j = a.has_j() && b.has_j();
    let allowed = allowed_by(a, b, |alg, x| profile(alg, x, with_j));
    let h = search(a, b, &[], true, Some(allowed), 1).pop()?;
    debug_assert!(h.is_embedding(a, b));
    Some(h)
}

/// Some isomorphism `a → b`, the lexicographically least one.
pub fn find_isomorphism(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Homomorphism> {
    if a.size() != b.size() || a.has_j() != b.has_j() {
        return None;
    }
    let with_j = a.has_j();
    let allowed = allowed_by(a, b, |alg, x| iso_profile(alg, x, with_j));
    let h = search(a, b, &[], true, Some(allowed), 1).pop()?;
    debug_assert!(h.is_embedding(a, b));
    Some(h)
}

#[cfg(test)]
/// Unpruned search; the reference for the pruned versions.
pub(crate) fn find_embedding_unpruned(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Option<Homomorphism> {
    search(a, b, &[], true, None, 1).pop()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// Every pair of distinct elements is split by one of `homs` maps.
    Separated { homs: usize },
    /// No homomorphism tells these two apart.
    Witness(Elem, Elem),
}

impl Separation {
    pub fn is_separated(&self) -> bool {
        matches!(self, Separation::Separated { .. })
    }
}

/// Whether the homomorphisms `a → g` separate points; for finite `a`
/// this is membership of `a` in ISP(g). Witness pairs are searched from the
/// end of the carrier backwards.
pub fn separates_into(a: &FiniteAlgebra, g: &FiniteAlgebra) -> Separation {
    let homs = enumerate_homomorphisms(a, g, &[]);
    let n = a.size();
    let column = |x: Elem| homs.iter().map(|h| h.map[x]).collect::<Vec<_>>();
    let cols: Vec<Vec<Elem>> = (0..n).map(column).collect();
    for x in (0..n).rev() {
        for y in (0..x).rev() {
            if cols[x] == cols[y] {
                return Separation::Witness(x, y);
            }
        }
    }
    Separation::Separated { homs: homs.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{b2, b4, b4_plus_b2, direct_product, trivial, wke};

    /// All maps, filtered by the table check.
    fn brute_force(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Homomorphism> {
        let mut out = Vec::new();
        crate::algebra::eval::for_each_assignment(b.size(), a.size(), |m| {
            let h = Homomorphism::new(m.to_vec());
            if h.is_homomorphism(a, b) {
                out.push(h);
            }
            true
        });
        out
    }

    #[test]
    fn hom_examples() {
        assert!(enumerate_homomorphisms(&wke(), &b2(), &[]).is_empty());
        assert_eq!(enumerate_homomorphisms(&wke(), &wke(), &[]), vec![Homomorphism::identity(3)]);
        for a in [b2(), wke(), b4(), b4_plus_b2()] {
            let homs = enumerate_homomorphisms(&b2(), &a, &[]);
            assert_eq!(homs, vec![Homomorphism::new(vec![a.one(), a.zero()])]);
        }
    }

    #[test]
    fn search_matches_brute_force() {
        let algs = [trivial(), b2(), wke(), b4(), b4_plus_b2(), direct_product(&wke(), &b2())];
        for a in &algs {
            for b in &algs {
                if b.size().pow(a.size() as u32) > 2_000_000 {
                    continue;
                }
                assert_eq!(enumerate_homomorphisms(a, b, &[]), brute_force(a, b), "{} -> {}", a.name(), b.name());
            }
        }
    }

    #[test]
    fn embeddings() {
        assert!(find_embedding(&wke(), &b4_plus_b2()).is_none());
        let p = direct_product(&wke(), &b2());
        let h = find_embedding(&b4_plus_b2(), &p).unwrap();
        assert!(h.is_embedding(&b4_plus_b2(), &p));
        assert!(find_isomorphism(&b4_plus_b2(), &p).is_some());
        for a in [wke(), b4(), b4_plus_b2()] {
            assert_eq!(find_isomorphism(&a, &a), Some(Homomorphism::identity(a.size())));
        }
        for a in [b2(), wke(), b4(), b4_plus_b2(), p.clone()] {
            for b in [b2(), wke(), b4(), b4_plus_b2(), p.clone()] {
                assert_eq!(find_embedding(&a, &b).is_some(), find_embedding_unpruned(&a, &b).is_some());
            }
        }
    }

    #[test]
    fn separation() {
        assert!(separates_into(&b4_plus_b2(), &wke()).is_separated());
        assert!(separates_into(&b2(), &wke()).is_separated());
        let a = wke();
        assert_eq!(separates_into(&a, &b2()), Separation::Witness(a.element("H").unwrap(), a.element("0").unwrap()));
    }

    #[test]
    fn parse_and_compose() {
        let a = b2();
        let b = wke();
        let h = Homomorphism::parse("1->1 0->0", &a, &b).unwrap();
        assert!(h.is_embedding(&a, &b));
        assert!(Homomorphism::parse("1->1", &a, &b).is_err());
        assert_eq!(h.then(&Homomorphism::identity(3)), h);
        assert_eq!(h.describe(&a, &b), "1->1 0->0");
    }
}
