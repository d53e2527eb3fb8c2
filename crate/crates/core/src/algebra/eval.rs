use std::collections::BTreeMap;

use crate::term::{BinaryOp, Constant, Equation, QuasiIdentity, Term, UnaryOp};

use super::{AlgebraError, Elem, FiniteAlgebra};

/// Variable name to carrier index.
pub type Valuation = BTreeMap<String, Elem>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    /// Least failing valuation.
    Fails(Valuation),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Valuation> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(v) => Some(v),
        }
    }
}

/// `x=1 y=H`, in variable-name order.
pub fn format_valuation(a: &FiniteAlgebra, v: &Valuation) -> String {
    v.iter().map(|(k, &e)| format!("{k}={}", a.label(e))).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Copy, Debug)]
enum Op {
    Var(usize),
    Const(Constant),
    Unary(UnaryOp),
    Binary(BinaryOp),
}

/// A term flattened to postfix form with variables numbered by position in
/// a fixed variable list.
#[derive(Clone, Debug)]
pub struct CompiledTerm {
    ops: Vec<Op>,
    uses_j: bool,
}

impl CompiledTerm {
    /// Panics if `t` mentions a variable missing from `vars`.
    pub fn new(t: &Term, vars: &[String]) -> CompiledTerm {
        fn go(t: &Term, vars: &[String], out: &mut Vec<Op>) {
            match t {
                Term::Var(x) => {
                    let i = vars.iter().position(|v| v == x).expect("variable not in list");
                    out.push(Op::Var(i));
                }
                Term::Const(c) => out.push(Op::Const(*c)),
                Term::Unary(op, s) => {
                    go(s, vars, out);
                    out.push(Op::Unary(*op));
                }
                Term::Binary(op, l, r) => {
                    go(l, vars, out);
                    go(r, vars, out);
                    out.push(Op::Binary(*op));
                }
            }
        }
        let mut ops = Vec::with_capacity(t.size());
        go(t, vars, &mut ops);
        CompiledTerm { ops, uses_j: t.uses_j() }
    }

    pub fn uses_j(&self) -> bool {
        self.uses_j
    }

    /// Evaluates with `values[i]` bound to the i-th variable. `stack` is
    /// scratch space reused across calls.
    pub fn eval(&self, a: &FiniteAlgebra, values: &[Elem], stack: &mut Vec<Elem>) -> Elem {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Var(i) => stack.push(values[i]),
                Op::Const(c) => stack.push(a.constant(c)),
                Op::Unary(u) => {
                    let x = stack.pop().unwrap();
                    stack.push(a.unary(u, x));
                }
                Op::Binary(b) => {
                    let y = stack.pop().unwrap();
                    let x = stack.pop().unwrap();
                    stack.push(a.binary(b, x, y));
                }
            }
        }
        stack[0]
    }
}

/// Iterates over all assignments of `k` variables in lexicographic order,
/// first variable most significant.
pub(crate) fn for_each_assignment(n: usize, k: usize, mut f: impl FnMut(&[Elem]) -> bool) {
    let mut vals = vec![0; k];
    loop {
        if !f(&vals) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < n {
                break;
            }
            vals[i] = 0;
        }
    }
}

impl FiniteAlgebra {
    fn require_j(&self, uses_j: bool) -> Result<(), AlgebraError> {
        if uses_j && !self.has_j() {
            return Err(AlgebraError::NoJ(self.name().to_string()));
        }
        Ok(())
    }

    pub fn eval(&self, t: &Term, v: &Valuation) -> Result<Elem, AlgebraError> {
        self.require_j(t.uses_j())?;
        fn go(a: &FiniteAlgebra, t: &Term, v: &Valuation) -> Result<Elem, AlgebraError> {
            Ok(match t {
                Term::Var(x) => {
                    let e = *v.get(x).ok_or_else(|| AlgebraError::Unbound(x.clone()))?;
                    if e >= a.size() {
                        return Err(AlgebraError::Invalid(format!("value of `{x}` out of range")));
                    }
                    e
                }
                Term::Const(c) => a.constant(*c),
                Term::Unary(op, s) => a.unary(*op, go(a, s, v)?),
                Term::Binary(op, l, r) => a.binary(*op, go(a, l, v)?, go(a, r, v)?),
            })
        }
        go(self, t, v)
    }

    /// Exhaustive check over all valuations; returns the least counterexample.
    pub fn holds_quasi_identity(&self, q: &QuasiIdentity) -> Result<Verdict, AlgebraError> {
        let vars: Vec<String> = q.variables().into_iter().collect();
        let compile = |e: &Equation| (CompiledTerm::new(&e.lhs, &vars), CompiledTerm::new(&e.rhs, &vars));
        let ante: Vec<_> = q.antecedents.iter().map(compile).collect();
        let cons = compile(&q.consequent);
        let uses_j = ante.iter().chain([&cons]).any(|(l, r)| l.uses_j() || r.uses_j());
        self.require_j(uses_j)?;
        let mut stack = Vec::new();
        let mut found = None;
        for_each_assignment(self.size(), vars.len(), |vals| {
            let sat = |(l, r): &(CompiledTerm, CompiledTerm), st: &mut Vec<Elem>| {
                l.eval(self, vals, st) == r.eval(self, vals, st)
            };
            if ante.iter().all(|e| sat(e, &mut stack)) && !sat(&cons, &mut stack) {
                found = Some(vals.to_vec());
                return false;
            }
            true
        });
        Ok(match found {
            None => Verdict::Holds,
            Some(vals) => Verdict::Fails(vars.into_iter().zip(vals).collect()),
        })
    }

    pub fn holds_equation(&self, e: &Equation) -> Result<Verdict, AlgebraError> {
        self.holds_quasi_identity(&QuasiIdentity::identity(e.clone()))
    }

    /// True if every quasi-identity holds.
    pub fn satisfies_all<'a>(&self, qs: impl IntoIterator<Item = &'a QuasiIdentity>) -> Result<bool, AlgebraError> {
        for q in qs {
            if !self.holds_quasi_identity(q)?.holds() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}
