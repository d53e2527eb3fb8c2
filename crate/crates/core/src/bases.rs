//! Axiom lists for Bochvar algebras and involutive bisemilattices, and the
//! membership tests built on them.

use serde::Serialize;

use crate::algebra::{format_valuation, separates_into, wke, AlgebraError, FiniteAlgebra, Separation, Valuation, Verdict};
use crate::term::{eliminate_j01, parse_quasi_identity, QuasiIdentity};

/// One numbered axiom; schematic axioms carry one instance per index choice.
#[derive(Clone, Debug)]
pub struct BasisItem {
    pub label: String,
    pub instances: Vec<QuasiIdentity>,
}

impl BasisItem {
    fn new(label: &str, sources: impl IntoIterator<Item = String>) -> Self {
        let instances = sources
            .into_iter()
            .map(|s| parse_quasi_identity(&s).unwrap_or_else(|e| panic!("axiom `{s}`: {e}")))
            .collect();
        BasisItem { label: label.to_string(), instances }
    }

    fn single(label: &str, source: &str) -> Self {
        BasisItem::new(label, [source.to_string()])
    }
}

fn per_k(ks: &[u8], f: impl Fn(u8) -> String) -> Vec<String> {
    ks.iter().map(|&k| f(k)).collect()
}

fn lattice_part() -> Vec<BasisItem> {
    vec![
        BasisItem::single("1", "x | x = x"),
        BasisItem::single("2", "x | y = y | x"),
        BasisItem::single("3", "(x | y) | z = x | (y | z)"),
        BasisItem::single("4", "x & (y | z) = (x & y) | (x & z)"),
        BasisItem::single("5", "~~x = x"),
        BasisItem::single("6", "~1 = 0"),
        BasisItem::single("7", "~(x | y) = ~x & ~y"),
        BasisItem::single("8", "0 | x = x"),
    ]
}

const J2_OF_JOIN: &str = "J2(x | y) = (J2 x & J2 y) | (J2 x & J2 ~y) | (J2 ~x & J2 y)";

/// The original nineteen-item axiomatization in the full signature. Item 15
/// appears twice: `15a` with one variable and `15b` with two.
pub fn original_basis() -> Vec<BasisItem> {
    let all = [0, 1, 2];
    let mut items = lattice_part();
    items.push(BasisItem::new("9", per_k(&all, |k| format!("J2 J{k} x = J{k} x"))));
    items.push(BasisItem::new("10", per_k(&all, |k| format!("J0 J{k} x = ~J{k} x"))));
    items.push(BasisItem::new("11", per_k(&all, |k| format!("J1 J{k} x = 0"))));
    items.push(BasisItem::new("12", per_k(&all, |k| format!("J{k} ~x = J{} x", 2 - k))));
    let mut perms = Vec::new();
    for i in all {
        for j in all {
            for k in all {
                if i != j && j != k && i != k {
                    perms.push(format!("J{i} x = ~(J{j} x | J{k} x)"));
                }
            }
        }
    }
    items.push(BasisItem::new("13", perms));
    items.push(BasisItem::new("14", per_k(&all, |k| format!("J{k} x | ~J{k} x = 1"))));
    let pairs = |second: &str| {
        let mut out = Vec::new();
        for i in all {
            for k in all {
                out.push(format!("(J{i} x | J{k} {second}) & J{i} x = J{i} x"));
            }
        }
        out
    };
    items.push(BasisItem::new("15a", pairs("x")));
    items.push(BasisItem::new("15b", pairs("y")));
    items.push(BasisItem::new("16", per_k(&[1, 2], |k| format!("x | J{k} x = x"))));
    items.push(BasisItem::single("17", "J0(x | y) = J0 x & J0 y"));
    items.push(BasisItem::single("18", J2_OF_JOIN));
    items.push(BasisItem::single("19", "J0 x = J0 y, J1 x = J1 y, J2 x = J2 y => x = y"));
    items
}

/// The thirteen-item axiomatization, stated with J0/J1 but meant over J2.
pub fn reduced_basis() -> Vec<BasisItem> {
    let mut items = lattice_part();
    items.push(BasisItem::single("9", "J0 J2 x = ~J2 x"));
    items.push(BasisItem::single("10", "J2 x = ~(J0 x | J1 x)"));
    items.push(BasisItem::single("11", "J2 x | ~J2 x = 1"));
    items.push(BasisItem::single("12", J2_OF_JOIN));
    items.push(BasisItem::single("13", "J0 x = J0 y, J2 x = J2 y => x = y"));
    items
}

/// The defining equations of J0 and J1 over J2.
pub fn j_definitions() -> Vec<BasisItem> {
    vec![
        BasisItem::single("def-J0", "J0 x = J2 ~x"),
        BasisItem::single("def-J1", "J1 x = ~(J2 x | J2 ~x)"),
    ]
}

/// Involutive bisemilattice identities I1 to I8.
pub fn ibsl_basis() -> Vec<BasisItem> {
    [
        ("I1", "x | x = x"),
        ("I2", "x | y = y | x"),
        ("I3", "x | (y | z) = (x | y) | z"),
        ("I4", "~~x = x"),
        ("I5", "x & y = ~(~x | ~y)"),
        ("I6", "x & (~x | y) = x & y"),
        ("I7", "0 | x = x"),
        ("I8", "1 = ~0"),
    ]
    .iter()
    .map(|(l, s)| BasisItem::single(l, s))
    .collect()
}

/// Boolean algebra identities, enough to pin down a Boolean algebra among
/// finite algebras of this signature.
pub fn boolean_basis() -> Vec<BasisItem> {
    [
        ("join-idem", "x | x = x"),
        ("join-comm", "x | y = y | x"),
        ("join-assoc", "(x | y) | z = x | (y | z)"),
        ("meet-comm", "x & y = y & x"),
        ("meet-assoc", "(x & y) & z = x & (y & z)"),
        ("absorb-1", "x & (x | y) = x"),
        ("absorb-2", "x | (x & y) = x"),
        ("distrib", "x & (y | z) = (x & y) | (x & z)"),
        ("complement-1", "x & ~x = 0"),
        ("complement-2", "x | ~x = 1"),
        ("zero", "0 | x = x"),
        ("one", "1 & x = x"),
    ]
    .iter()
    .map(|(l, s)| BasisItem::single(l, s))
    .collect()
}

/// A failed instance with its least counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub item: String,
    pub instance: String,
    pub counterexample: String,
}

/// First instance in `items` that fails in `a`.
pub fn first_violation(a: &FiniteAlgebra, items: &[BasisItem]) -> Result<Option<Violation>, AlgebraError> {
    for item in items {
        for q in &item.instances {
            if let Verdict::Fails(v) = a.holds_quasi_identity(q)? {
                return Ok(Some(violation(a, &item.label, q, &v)));
            }
        }
    }
    Ok(None)
}

fn violation(a: &FiniteAlgebra, item: &str, q: &QuasiIdentity, v: &Valuation) -> Violation {
    Violation { item: item.to_string(), instance: q.to_string(), counterexample: format_valuation(a, v) }
}

/// Membership by the nineteen-item axiomatization.
pub fn check_original(a: &FiniteAlgebra) -> Result<Option<Violation>, AlgebraError> {
    first_violation(a, &original_basis())
}

/// Membership by the thirteen-item axiomatization: the J0/J1 tables must be
/// the derived ones, and the axioms must hold once J0/J1 are rewritten.
pub fn check_reduced(a: &FiniteAlgebra) -> Result<Option<Violation>, AlgebraError> {
    if let Some(v) = first_violation(a, &j_definitions())? {
        return Ok(Some(v));
    }
    let eliminated: Vec<BasisItem> = reduced_basis()
        .into_iter()
        .map(|item| BasisItem {
            label: item.label,
            instances: item.instances.iter().map(|q| q.map_terms(eliminate_j01)).collect(),
        })
        .collect();
    first_violation(a, &eliminated)
}

pub fn check_ibsl(a: &FiniteAlgebra) -> Result<Option<Violation>, AlgebraError> {
    first_violation(a, &ibsl_basis())
}

pub fn check_boolean(a: &FiniteAlgebra) -> Result<Option<Violation>, AlgebraError> {
    first_violation(a, &boolean_basis())
}

/// The three membership tests side by side.
#[derive(Clone, Debug)]
pub struct Membership {
    pub original: Option<Violation>,
    pub reduced: Option<Violation>,
    pub separation: Separation,
}

impl Membership {
    pub fn agree(&self) -> bool {
        let s = self.separation.is_separated();
        self.original.is_none() == s && self.reduced.is_none() == s
    }

    /// Verdict when all three tests agree.
    pub fn is_member(&self) -> Option<bool> {
        self.agree().then(|| self.original.is_none())
    }
}

/// Runs all three membership tests. Fails only if `a` has no J operations.
pub fn membership(a: &FiniteAlgebra) -> Result<Membership, AlgebraError> {
    if !a.has_j() {
        return Err(AlgebraError::NoJ(a.name().to_string()));
    }
    Ok(Membership { original: check_original(a)?, reduced: check_reduced(a)?, separation: separates_into(a, &wke()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{b2, b4, b4_plus_b2, boolean_algebra, direct_product, trivial};

    #[test]
    fn item_counts() {
        let orig = original_basis();
        assert_eq!(orig.len(), 20);
        let count = |l: &str| orig.iter().find(|i| i.label == l).unwrap().instances.len();
        assert_eq!(count("13"), 6);
        assert_eq!(count("15a"), 9);
        assert_eq!(count("15b"), 9);
        assert_eq!(count("16"), 2);
        assert_eq!(reduced_basis().len(), 13);
        assert_eq!(ibsl_basis().len(), 8);
    }

    #[test]
    fn known_members() {
        for a in [wke(), b2(), b4(), b4_plus_b2(), trivial(), boolean_algebra(3, true), direct_product(&wke(), &wke())] {
            let m = membership(&a).unwrap();
            assert!(m.agree(), "{}: {m:?}", a.name());
            assert_eq!(m.is_member(), Some(true), "{}", a.name());
            assert_eq!(check_ibsl(&a).unwrap(), None);
        }
    }

    #[test]
    fn edited_j1_is_rejected() {
        let w = wke();
        let h = w.element("H").unwrap();
        let bad = w.with_entry("J1", h, w.zero()).unwrap();
        let m = membership(&bad).unwrap();
        assert!(m.agree());
        assert_eq!(m.is_member(), Some(false));
        assert!(m.original.is_some());
    }

    #[test]
    fn boolean_check() {
        assert_eq!(check_boolean(&b4()).unwrap(), None);
        let v = check_boolean(&wke()).unwrap().unwrap();
        assert_eq!(v.item, "absorb-1");
        assert_eq!(v.counterexample, "x=1 y=H");
    }

    #[test]
    fn no_j_is_an_error() {
        assert!(membership(&b2().boolean_reduct()).is_err());
    }
}
