//! Terms of the external language `⟨¬, ∨, ∧, J0, J1, J2, 0, 1⟩`.
//!
//! The same [`Term`] type is used on the logical side (formulas, rules,
//! derivations) and on the algebraic side (identities and quasi-identities).

mod enumerate;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

pub use enumerate::{standard_variables, terms_of_depth, terms_up_to};
pub use parse::{parse_equation, parse_quasi_identity, parse_rule, parse_term, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Constant {
    Zero,
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum UnaryOp {
    Neg,
    J0,
    J1,
    J2,
}

impl UnaryOp {
    /// Unary operators in enumeration order.
    pub const ALL: [UnaryOp; 4] = [UnaryOp::Neg, UnaryOp::J0, UnaryOp::J1, UnaryOp::J2];

    pub fn j(k: u8) -> UnaryOp {
        match k {
            0 => UnaryOp::J0,
            1 => UnaryOp::J1,
            2 => UnaryOp::J2,
            _ => panic!("J{k} is not an operator"),
        }
    }

    pub fn is_external(self) -> bool {
        !matches!(self, UnaryOp::Neg)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            UnaryOp::Neg => "~",
            UnaryOp::J0 => "J0",
            UnaryOp::J1 => "J1",
            UnaryOp::J2 => "J2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BinaryOp {
    And,
    Or,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 2] = [BinaryOp::And, BinaryOp::Or];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::And => "&",
            BinaryOp::Or => "|",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(Constant),
    Unary(UnaryOp, Box<Term>),
    Binary(BinaryOp, Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn zero() -> Term {
        Term::Const(Constant::Zero)
    }

    pub fn one() -> Term {
        Term::Const(Constant::One)
    }

    pub fn unary(op: UnaryOp, t: Term) -> Term {
        Term::Unary(op, Box::new(t))
    }

    pub fn binary(op: BinaryOp, l: Term, r: Term) -> Term {
        Term::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn neg(t: Term) -> Term {
        Term::unary(UnaryOp::Neg, t)
    }

    pub fn j(k: u8, t: Term) -> Term {
        Term::unary(UnaryOp::j(k), t)
    }

    pub fn and(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::And, l, r)
    }

    pub fn or(l: Term, r: Term) -> Term {
        Term::binary(BinaryOp::Or, l, r)
    }

    /// `l -> r`, i.e. `~l | r`.
    pub fn implies(l: Term, r: Term) -> Term {
        Term::or(Term::neg(l), r)
    }

    /// `l <-> r`, i.e. `(l -> r) & (r -> l)`.
    pub fn iff(l: Term, r: Term) -> Term {
        Term::and(Term::implies(l.clone(), r.clone()), Term::implies(r, l))
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Unary(_, t) => 1 + t.depth(),
            Term::Binary(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::Const(_) => 1,
            Term::Unary(_, t) => 1 + t.size(),
            Term::Binary(_, l, r) => 1 + l.size() + r.size(),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Const(_) => {}
            Term::Unary(_, t) => t.collect_variables(out),
            Term::Binary(_, l, r) => {
                l.collect_variables(out);
                r.collect_variables(out);
            }
        }
    }

    /// True if the term mentions `J0` or `J1`.
    pub fn uses_j01(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::Unary(op, t) => matches!(op, UnaryOp::J0 | UnaryOp::J1) || t.uses_j01(),
            Term::Binary(_, l, r) => l.uses_j01() || r.uses_j01(),
        }
    }

    /// True if the term mentions any `J` operator.
    pub fn uses_j(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => false,
            Term::Unary(op, t) => op.is_external() || t.uses_j(),
            Term::Binary(_, l, r) => l.uses_j() || r.uses_j(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&render_term(self))
    }
}

pub use parse::render_term;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut v = self.lhs.variables();
        v.extend(self.rhs.variables());
        v
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl Serialize for Equation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Finitely many equational antecedents and one equational consequent.
/// No antecedents means a plain identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiIdentity {
    pub antecedents: Vec<Equation>,
    pub consequent: Equation,
}

impl QuasiIdentity {
    pub fn identity(eq: Equation) -> Self {
        QuasiIdentity { antecedents: Vec::new(), consequent: eq }
    }

    pub fn new(antecedents: Vec<Equation>, consequent: Equation) -> Self {
        QuasiIdentity { antecedents, consequent }
    }

    pub fn is_identity(&self) -> bool {
        self.antecedents.is_empty()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut v = self.consequent.variables();
        for e in &self.antecedents {
            v.extend(e.variables());
        }
        v
    }

    /// Applies `f` to every term, keeping the shape.
    pub fn map_terms(&self, f: impl Fn(&Term) -> Term) -> QuasiIdentity {
        let eq = |e: &Equation| Equation::new(f(&e.lhs), f(&e.rhs));
        QuasiIdentity {
            antecedents: self.antecedents.iter().map(eq).collect(),
            consequent: eq(&self.consequent),
        }
    }
}

impl fmt::Display for QuasiIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        if !self.antecedents.is_empty() {
            f.write_str(" => ")?;
        }
        write!(f, "{}", self.consequent)
    }
}

impl Serialize for QuasiIdentity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A logical rule `premises ⊢ conclusion`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub premises: Vec<Term>,
    pub conclusion: Term,
}

impl Rule {
    pub fn new(premises: Vec<Term>, conclusion: Term) -> Self {
        Rule { premises, conclusion }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        if !self.premises.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "|- {}", self.conclusion)
    }
}

impl Serialize for Rule {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub type Substitution = BTreeMap<String, Term>;

/// Simultaneous substitution; variables outside the domain of `sigma` stay put.
pub fn substitute(t: &Term, sigma: &Substitution) -> Term {
    match t {
        Term::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
        Term::Unary(op, s) => Term::unary(*op, substitute(s, sigma)),
        Term::Binary(op, l, r) => Term::binary(*op, substitute(l, sigma), substitute(r, sigma)),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VariableCover {
    pub covered: BTreeSet<String>,
    pub open: BTreeSet<String>,
}

/// Splits the variables of `t` into covered ones (every occurrence sits under
/// some `J_k`) and open ones (at least one occurrence outside every `J_k`).
pub fn covered_variables(t: &Term) -> VariableCover {
    fn walk(t: &Term, under_j: bool, covered: &mut BTreeSet<String>, open: &mut BTreeSet<String>) {
        match t {
            Term::Var(x) => {
                if under_j {
                    covered.insert(x.clone());
                } else {
                    open.insert(x.clone());
                }
            }
            Term::Const(_) => {}
            Term::Unary(op, s) => walk(s, under_j || op.is_external(), covered, open),
            Term::Binary(_, l, r) => {
                walk(l, under_j, covered, open);
                walk(r, under_j, covered, open);
            }
        }
    }
    let mut covered = BTreeSet::new();
    let mut open = BTreeSet::new();
    walk(t, false, &mut covered, &mut open);
    covered.retain(|x| !open.contains(x));
    VariableCover { covered, open }
}

pub fn is_external(t: &Term) -> bool {
    covered_variables(t).open.is_empty()
}

/// `lhs ≡ rhs`: `(J0 l <-> J0 r) & (J1 l <-> J1 r) & (J2 l <-> J2 r)`,
/// associated to the left.
pub fn expand_equiv(lhs: &Term, rhs: &Term) -> Term {
    let part = |k| Term::iff(Term::j(k, lhs.clone()), Term::j(k, rhs.clone()));
    Term::and(Term::and(part(0), part(1)), part(2))
}

/// Formula-to-equation transformer: `φ ↦ φ ≈ 1`.
pub fn tau(phi: &Term) -> Equation {
    Equation::new(phi.clone(), Term::one())
}

/// Equation-to-formula transformer: `φ ≈ ψ ↦ φ ≡ ψ`.
pub fn rho(eq: &Equation) -> Term {
    expand_equiv(&eq.lhs, &eq.rhs)
}

/// Rewrites `J0 φ` as `J2 ¬φ` and `J1 φ` as `¬(J2 φ ∨ J2 ¬φ)`, bottom-up.
pub fn eliminate_j01(t: &Term) -> Term {
    match t {
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Unary(op, s) => {
            let s = eliminate_j01(s);
            match op {
                UnaryOp::J0 => Term::j(2, Term::neg(s)),
                UnaryOp::J1 => Term::neg(Term::or(Term::j(2, s.clone()), Term::j(2, Term::neg(s)))),
                _ => Term::unary(*op, s),
            }
        }
        Term::Binary(op, l, r) => Term::binary(*op, eliminate_j01(l), eliminate_j01(r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn substitution_examples() {
        let mut sigma = Substitution::new();
        sigma.insert("x".into(), p("J2(z)"));
        assert_eq!(substitute(&p("x | y"), &sigma), p("J2(z) | y"));

        let mut id = Substitution::new();
        id.insert("x".into(), p("x"));
        assert_eq!(substitute(&p("J1(x)"), &id), p("J1(x)"));

        let mut sim = Substitution::new();
        sim.insert("x".into(), p("~x"));
        assert_eq!(substitute(&p("x | x"), &sim), p("~x | ~x"));
    }

    #[test]
    fn cover_examples() {
        let c = covered_variables(&p("J2(x) | J0(y)"));
        assert_eq!(c.covered.len(), 2);
        assert!(c.open.is_empty());

        let c = covered_variables(&p("x | J2(x)"));
        assert!(c.covered.is_empty());
        assert_eq!(c.open.iter().collect::<Vec<_>>(), vec!["x"]);

        let c = covered_variables(&p("J1(x | y)"));
        assert_eq!(c.covered.iter().collect::<Vec<_>>(), vec!["x", "y"]);
        assert!(c.open.is_empty());
    }

    #[test]
    fn external_examples() {
        assert!(is_external(&p("J2(x)")));
        assert!(!is_external(&p("x")));
        assert!(is_external(&p("J0(x | y) & J1(y)")));
        assert!(is_external(&p("1")));
    }

    #[test]
    fn j01_elimination() {
        assert_eq!(eliminate_j01(&p("J0(x)")), p("J2(~x)"));
        assert_eq!(eliminate_j01(&p("J1(x)")), p("~(J2(x) | J2(~x))"));
        assert_eq!(eliminate_j01(&p("J2(x)")), p("J2(x)"));
        assert!(!eliminate_j01(&p("J1(J0(x) & y)")).uses_j01());
    }

    #[test]
    fn transformers() {
        assert_eq!(tau(&p("J2(x)")), Equation::new(p("J2(x)"), p("1")));
        let eq = Equation::new(p("x"), p("y"));
        assert_eq!(rho(&eq), expand_equiv(&p("x"), &p("y")));
    }

    #[test]
    fn equiv_shape() {
        let e = expand_equiv(&p("x"), &p("y"));
        let expected = p("((J0 x <-> J0 y) & (J1 x <-> J1 y)) & (J2 x <-> J2 y)");
        assert_eq!(e, expected);
    }
}
