//! Placing a finite algebra in the chain JBA ⊂ NBCA ⊂ BCA, and the retraction
//! onto B2 of fixpoint-free members.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{b2, b4_plus_b2, wke, AlgebraError, Elem, FiniteAlgebra, Homomorphism, Separation};
use crate::bases::{membership, Violation};
use crate::plonka::{decompose, PlonkaError};
use crate::term::parse_quasi_identity;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("basis check and separation into WK^e disagree on {0}")]
    Disagreement(String),
    #[error("{0} negation fixpoints; a Bochvar algebra has at most one")]
    Fixpoints(usize),
    #[error("fixpoint present")]
    FixpointPresent,
    #[error("not a Bochvar algebra: {0}")]
    NotBca(String),
    #[error("witness check failed: {0}")]
    Witness(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Plonka(#[from] PlonkaError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Class {
    NotBca(String),
    Trivial,
    Jba,
    NbcaProper,
    BcaProper,
}

impl Class {
    /// `NotBCA`, `Trivial`, `JBA`, `NBCA_proper` or `BCA_proper`.
    pub fn tag(&self) -> &'static str {
        match self {
            Class::NotBca(_) => "NotBCA",
            Class::Trivial => "Trivial",
            Class::Jba => "JBA",
            Class::NbcaProper => "NBCA_proper",
            Class::BcaProper => "BCA_proper",
        }
    }

    /// Member of NBCA: a Bochvar algebra without a negation fixpoint.
    pub fn is_nbca(&self) -> bool {
        matches!(self, Class::Jba | Class::NbcaProper)
    }

    pub fn is_bca(&self) -> bool {
        !matches!(self, Class::NotBca(_))
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::NotBca(reason) => write!(f, "NotBCA ({reason})"),
            other => f.write_str(other.tag()),
        }
    }
}

/// Outcome of each membership test.
#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub original_basis: Option<Violation>,
    pub reduced_basis: Option<Violation>,
    /// Unseparated pair, by label, if the homomorphisms into WK^e miss one.
    pub separation_witness: Option<(String, String)>,
    pub fixpoint: Option<String>,
    pub absorption: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub class: Class,
    /// Embedding of `witness_source` into the classified algebra.
    pub witness: Option<Homomorphism>,
    pub witness_source: Option<FiniteAlgebra>,
    pub evidence: Evidence,
}

/// The unique `x` with `~x = x`, if any.
pub fn has_fixpoint(a: &FiniteAlgebra) -> Result<Option<Elem>, ClassifyError> {
    match a.fixpoints().as_slice() {
        [] => Ok(None),
        [x] => Ok(Some(*x)),
        many => Err(ClassifyError::Fixpoints(many.len())),
    }
}

fn checked(source: &FiniteAlgebra, target: &FiniteAlgebra, h: Homomorphism) -> Result<Homomorphism, ClassifyError> {
    match h.check(source, target) {
        Ok(()) if h.is_injective() => Ok(h),
        Ok(()) => Err(ClassifyError::Witness(format!("{} -> {} is not injective", source.name(), target.name()))),
        Err(e) => Err(ClassifyError::Witness(format!("{} -> {}: {e}", source.name(), target.name()))),
    }
}

/// Decides BCA membership by the axioms and by separation into WK^e (both
/// must agree), then places the algebra in the chain with an embedding
/// witness where one is due.
pub fn classify(a: &FiniteAlgebra) -> Result<Classification, ClassifyError> {
    let m = membership(a)?;
    let mut evidence = Evidence {
        original_basis: m.original.clone(),
        reduced_basis: m.reduced.clone(),
        separation_witness: match m.separation {
            Separation::Witness(x, y) => Some((a.label(x).to_string(), a.label(y).to_string())),
            Separation::Separated { .. } => None,
        },
        fixpoint: None,
        absorption: None,
    };
    let done = |class, witness, witness_source, evidence| Ok(Classification { class, witness, witness_source, evidence });
    match m.is_member() {
        None => return Err(ClassifyError::Disagreement(a.name().to_string())),
        Some(false) => {
            let reason = match &m.original {
                Some(v) => format!("axiom {} fails at {}", v.item, v.counterexample),
                None => "not separated by homomorphisms into WK^e".into(),
            };
            return done(Class::NotBca(reason), None, None, evidence);
        }
        Some(true) => {}
    }
    if a.size() == 1 {
        return done(Class::Trivial, None, None, evidence);
    }
    let fixpoint = has_fixpoint(a)?;
    evidence.fixpoint = fixpoint.map(|x| a.label(x).to_string());
    if let Some(h) = fixpoint {
        let w = wke();
        let map = w.labels().iter().map(|l| match l.as_str() {
            "1" => a.one(),
            "0" => a.zero(),
            _ => h,
        });
        let witness = checked(&w, a, Homomorphism::new(map.collect()))?;
        return done(Class::BcaProper, Some(witness), Some(w), evidence);
    }
    let absorption = parse_quasi_identity("x & (x | y) = x").expect("absorption parses");
    let absorbs = a.holds_quasi_identity(&absorption)?.holds();
    evidence.absorption = Some(absorbs);
    if absorbs {
        return done(Class::Jba, None, None, evidence);
    }
    let d = decompose(a)?;
    let s = &d.system;
    let i = (0..s.len()).find(|&i| i != s.bottom).expect("absorption fails only with two fibers");
    let one_i = d.element(i, s.fibers[i].one());
    let zero_i = d.element(i, s.fibers[i].zero());
    let ai = a.jk(2, one_i);
    let g = b4_plus_b2();
    let map = g.labels().iter().map(|l| match l.as_str() {
        "1" => a.one(),
        "0" => a.zero(),
        "a" => ai,
        "na" => a.neg(ai),
        "top" => one_i,
        _ => zero_i,
    });
    let witness = checked(&g, a, Homomorphism::new(map.collect()))?;
    done(Class::NbcaProper, Some(witness), Some(g), evidence)
}

/// `r: A → B2` and `ι: B2 → A` with `r ∘ ι` the identity.
#[derive(Clone, Debug)]
pub struct Retraction {
    pub r: Homomorphism,
    pub iota: Homomorphism,
    /// The atom of the bottom fiber whose filters define `r`.
    pub atom: Elem,
}

/// Retraction onto B2 built from the least atom below `a_u`, `u` the top
/// index: `r(x) = 1` iff `x` lies above the image of that atom in its fiber.
pub fn build_retraction(a: &FiniteAlgebra) -> Result<Retraction, ClassifyError> {
    let c = classify(a)?;
    match c.class {
        Class::NotBca(reason) => return Err(ClassifyError::NotBca(reason)),
        Class::Trivial | Class::BcaProper => return Err(ClassifyError::FixpointPresent),
        Class::Jba | Class::NbcaProper => {}
    }
    let d = decompose(a)?;
    let s = &d.system;
    let u = (0..s.len()).fold(s.bottom, |acc, i| s.index_join(acc, i));
    let au = d.designated().expect("classified algebras carry J")[u];
    let bottom = &s.fibers[s.bottom];
    let below = |x: Elem, y: Elem| bottom.meet(x, y) == x;
    let atom = (0..bottom.size())
        .filter(|&t| t != bottom.zero() && below(t, au))
        .find(|&t| (0..bottom.size()).all(|y| !below(y, t) || y == t || y == bottom.zero()))
        .ok_or_else(|| ClassifyError::Witness("no atom below a_u".into()))?;
    let two = b2();
    let (one2, zero2) = (two.one(), two.zero());
    let r = (0..a.size())
        .map(|x| {
            let (i, local) = d.fiber_of[x];
            let t = s.hom(s.bottom, i).apply(atom);
            if s.fibers[i].meet(t, local) == t {
                one2
            } else {
                zero2
            }
        })
        .collect();
    let r = Homomorphism::new(r);
    let iota = Homomorphism::new(two.labels().iter().map(|l| if l == "1" { a.one() } else { a.zero() }).collect());
    r.check(a, &two).map_err(|e| ClassifyError::Witness(format!("r: {e}")))?;
    iota.check(&two, a).map_err(|e| ClassifyError::Witness(format!("iota: {e}")))?;
    if iota.then(&r) != Homomorphism::identity(two.size()) {
        return Err(ClassifyError::Witness("r after iota is not the identity".into()));
    }
    Ok(Retraction { r, iota, atom: d.element(s.bottom, atom) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{b4, direct_product, find_isomorphism, trivial};
    use crate::plonka::enumerate_bca;

    #[test]
    fn examples() {
        let w = wke();
        let c = classify(&w).unwrap();
        assert_eq!(c.class, Class::BcaProper);
        assert_eq!(c.witness.unwrap(), Homomorphism::identity(3));
        assert_eq!(classify(&b4_plus_b2()).unwrap().class, Class::NbcaProper);
        assert_eq!(classify(&b4()).unwrap().class, Class::Jba);
        assert_eq!(classify(&trivial()).unwrap().class, Class::Trivial);
        let h = w.element("H").unwrap();
        let bad = w.with_entry("J1", h, w.zero()).unwrap();
        assert!(matches!(classify(&bad).unwrap().class, Class::NotBca(_)));
    }

    #[test]
    fn fixpoints() {
        assert_eq!(has_fixpoint(&wke()).unwrap(), Some(2));
        assert_eq!(has_fixpoint(&b4_plus_b2()).unwrap(), None);
        assert_eq!(has_fixpoint(&trivial()).unwrap(), Some(0));
        let two_fix = direct_product(&wke(), &trivial()).boolean_reduct();
        assert_eq!(has_fixpoint(&two_fix).unwrap(), Some(2));
        assert!(has_fixpoint(&direct_product(&wke(), &wke())).is_ok());
    }

    #[test]
    fn retractions() {
        let two = b2();
        let r = build_retraction(&two).unwrap();
        assert_eq!(r.r, Homomorphism::identity(2));
        assert_eq!(r.iota, Homomorphism::identity(2));

        let a = b4_plus_b2();
        let r = build_retraction(&a).unwrap();
        assert_eq!(a.label(r.atom), "a");
        let ones: Vec<&str> = (0..a.size()).filter(|&x| r.r.apply(x) == two.one()).map(|x| a.label(x)).collect();
        assert_eq!(ones, ["1", "a", "top"]);
        assert!(matches!(build_retraction(&wke()), Err(ClassifyError::FixpointPresent)));
    }

    /// Classes are invariant under isomorphism, and witnesses and
    /// retractions exist exactly where they should.
    #[test]
    fn enumerated_members() {
        for a in enumerate_bca(8).unwrap() {
            let c = classify(&a).unwrap();
            assert!(c.class.is_bca(), "{}", a.name());
            if let (Some(h), Some(src)) = (&c.witness, &c.witness_source) {
                assert!(h.is_embedding(src, &a));
            }
            let fix = has_fixpoint(&a).unwrap().is_some();
            let nf = parse_quasi_identity("J1 x = 1 => y = 1").unwrap();
            assert_eq!(a.holds_quasi_identity(&nf).unwrap().holds(), !fix || a.size() == 1, "{}", a.name());
            assert_eq!(build_retraction(&a).is_ok(), !fix, "{}", a.name());
            let copy = direct_product(&a, &trivial());
            assert!(find_isomorphism(&copy, &a).is_some());
            assert_eq!(classify(&copy).unwrap().class, c.class);
        }
    }
}
