//! Terms grouped by the functions they induce on a list of finite algebras.
//!
//! All terms over `k` variables up to a depth bound are counted exactly
//! without being built: each class stores its value vector, the number of
//! terms that induce it, and one representative.

use std::collections::HashMap;

use crate::algebra::{Elem, FiniteAlgebra};
use crate::term::{BinaryOp, Term, UnaryOp};

#[derive(Clone, Debug)]
pub struct TermClass {
    /// Values at every valuation of every algebra, algebras concatenated,
    /// valuations in lexicographic order.
    pub values: Vec<Elem>,
    pub count: u128,
    pub representative: Term,
}

/// Classes of all terms over `vars` of depth at most some bound.
#[derive(Clone, Debug)]
pub struct ClassTable {
    pub algebras: Vec<FiniteAlgebra>,
    pub vars: Vec<String>,
    pub depth: usize,
    pub classes: Vec<TermClass>,
    segments: Vec<(usize, usize)>,
}

impl ClassTable {
    /// Panics if some algebra lacks J operations.
    pub fn build(algebras: &[FiniteAlgebra], vars: &[String], depth: usize) -> ClassTable {
        assert!(algebras.iter().all(FiniteAlgebra::has_j), "term classes need the full signature");
        let k = vars.len() as u32;
        let mut segments = Vec::new();
        let mut start = 0;
        for a in algebras {
            let len = a.size().pow(k);
            segments.push((start, len));
            start += len;
        }
        let mut table = ClassTable { algebras: algebras.to_vec(), vars: vars.to_vec(), depth: 0, classes: Vec::new(), segments };
        let atoms = table.atoms();
        let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
        for (t, v) in atoms.iter().cloned() {
            table.add(&mut index, v, 1, || t.clone());
        }
        for _ in 0..depth {
            table.deepen(&atoms);
        }
        table
    }

    fn atoms(&self) -> Vec<(Term, Vec<Elem>)> {
        let mut out = Vec::new();
        for (i, x) in self.vars.iter().enumerate() {
            out.push((Term::var(x.clone()), self.map_points(|_, vals| vals[i])));
        }
        out.push((Term::zero(), self.map_points(|a, _| a.zero())));
        out.push((Term::one(), self.map_points(|a, _| a.one())));
        out
    }

    fn map_points(&self, f: impl Fn(&FiniteAlgebra, &[Elem]) -> Elem) -> Vec<Elem> {
        let mut out = Vec::new();
        for a in &self.algebras {
            crate::algebra::for_each_assignment(a.size(), self.vars.len(), |vals| {
                out.push(f(a, vals));
                true
            });
        }
        out
    }

    fn add(&mut self, index: &mut HashMap<Vec<Elem>, usize>, values: Vec<Elem>, count: u128, rep: impl FnOnce() -> Term) {
        match index.get(&values) {
            Some(&i) => self.classes[i].count += count,
            None => {
                index.insert(values.clone(), self.classes.len());
                self.classes.push(TermClass { values, count, representative: rep() });
            }
        }
    }

    /// Terms of depth at most `d + 1` from those of depth at most `d`.
    fn deepen(&mut self, atoms: &[(Term, Vec<Elem>)]) {
        let prev = std::mem::take(&mut self.classes);
        let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
        // earlier classes keep their (shallower) representatives
        for c in &prev {
            index.insert(c.values.clone(), self.classes.len());
            self.classes.push(TermClass { values: c.values.clone(), count: 0, representative: c.representative.clone() });
        }
        for (t, v) in atoms {
            self.add(&mut index, v.clone(), 1, || t.clone());
        }
        for op in UnaryOp::ALL {
            for c in &prev {
                let v = self.apply_unary(op, &c.values);
                self.add(&mut index, v, c.count, || Term::unary(op, c.representative.clone()));
            }
        }
        for op in [BinaryOp::And, BinaryOp::Or] {
            for l in &prev {
                for r in &prev {
                    let v = self.apply_binary(op, &l.values, &r.values);
                    self.add(&mut index, v, l.count * r.count, || {
                        Term::binary(op, l.representative.clone(), r.representative.clone())
                    });
                }
            }
        }
        self.classes.retain(|c| c.count > 0);
        self.depth += 1;
    }

    pub fn apply_unary(&self, op: UnaryOp, v: &[Elem]) -> Vec<Elem> {
        let mut out = Vec::with_capacity(v.len());
        for (a, &(start, len)) in self.algebras.iter().zip(&self.segments) {
            out.extend(v[start..start + len].iter().map(|&x| a.unary(op, x)));
        }
        out
    }

    pub fn apply_binary(&self, op: BinaryOp, l: &[Elem], r: &[Elem]) -> Vec<Elem> {
        let mut out = Vec::with_capacity(l.len());
        for (a, &(start, len)) in self.algebras.iter().zip(&self.segments) {
            out.extend((start..start + len).map(|i| a.binary(op, l[i], r[i])));
        }
        out
    }

    /// The slice of `values` belonging to algebra `i`.
    pub fn segment<'v>(&self, values: &'v [Elem], i: usize) -> &'v [Elem] {
        let (start, len) = self.segments[i];
        &values[start..start + len]
    }

    pub fn total(&self) -> u128 {
        self.classes.iter().map(|c| c.count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{wke, Valuation};
    use crate::term::{standard_variables, terms_up_to};

    #[test]
    fn counts_match_enumeration() {
        let vars = standard_variables(2);
        for depth in 0..=2 {
            let table = ClassTable::build(&[wke()], &vars, depth);
            let terms = terms_up_to(depth, &vars);
            assert_eq!(table.total(), terms.len() as u128);
            // every term lands in the class of its own value vector
            let w = wke();
            let mut by_values: HashMap<Vec<Elem>, u128> = HashMap::new();
            for t in &terms {
                let mut vals = Vec::new();
                crate::algebra::for_each_assignment(3, 2, |p| {
                    let v: Valuation = vars.iter().cloned().zip(p.iter().copied()).collect();
                    vals.push(w.eval(t, &v).unwrap());
                    true
                });
                *by_values.entry(vals).or_default() += 1;
            }
            assert_eq!(by_values.len(), table.classes.len());
            for c in &table.classes {
                assert_eq!(by_values[&c.values], c.count);
            }
        }
    }

    #[test]
    fn depth_three_total() {
        let table = ClassTable::build(&[wke()], &standard_variables(2), 3);
        assert_eq!(table.total(), 4 + 4 * 5620 + 2 * 5620 * 5620);
    }
}
