//! Checkable claims about Bochvar algebras as named test cases, and the
//! agreement check between the membership tests.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{format_valuation, wke, AlgebraError, FiniteAlgebra, Verdict};
use crate::bases::{ibsl_basis, membership, original_basis, reduced_basis, BasisItem};
use crate::matrix::LogicalMatrix;
use crate::plonka::{decompose, enumerate_bca, PlonkaError};
use crate::term::{parse_quasi_identity, parse_rule, QuasiIdentity, Rule};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Plonka(#[from] PlonkaError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    Identity,
    QuasiIdentity,
    Property,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Holds,
    Fails,
    /// Expected to fail: the claim is a misprinted variant of a true one.
    Discrepancy,
}

/// Structural facts checked on the Płonka decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    SurjectiveTransitions,
    BottomMapsNotInjective,
    J2IntervalIsomorphism,
    StrictlyDecreasingTops,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Laws(Vec<QuasiIdentity>),
    /// A rule tested for derivability in the external matrix.
    Rule(Rule),
    Property(Property),
}

/// Where a claim is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// WK^e only, whatever scope the run asks for.
    Wke,
    /// The run's algebra set.
    Suite,
}

#[derive(Clone, Debug)]
pub struct Claim {
    pub id: String,
    pub location: String,
    pub kind: ClaimKind,
    pub payload: Payload,
    pub scope: Scope,
    pub expectation: Expectation,
}

fn laws(sources: &[String]) -> Vec<QuasiIdentity> {
    sources.iter().map(|s| parse_quasi_identity(s).unwrap_or_else(|e| panic!("claim `{s}`: {e}"))).collect()
}

fn kind_of(qs: &[QuasiIdentity]) -> ClaimKind {
    match qs.iter().all(QuasiIdentity::is_identity) {
        true => ClaimKind::Identity,
        false => ClaimKind::QuasiIdentity,
    }
}

struct Builder(Vec<Claim>);

impl Builder {
    fn law(&mut self, id: &str, location: &str, sources: &[String], expectation: Expectation) {
        let qs = laws(sources);
        let scope = match expectation {
            Expectation::Holds => Scope::Suite,
            _ => Scope::Wke,
        };
        self.0.push(Claim { id: id.into(), location: location.into(), kind: kind_of(&qs), payload: Payload::Laws(qs), scope, expectation });
    }

    fn holds(&mut self, id: &str, location: &str, sources: &[&str]) {
        let owned: Vec<String> = sources.iter().map(|s| s.to_string()).collect();
        self.law(id, location, &owned, Expectation::Holds);
    }

    fn basis(&mut self, prefix: &str, heading: &str, items: Vec<BasisItem>) {
        for item in items {
            let qs = item.instances;
            self.0.push(Claim {
                id: format!("{prefix}-{}", item.label),
                location: format!("{heading}, item {}", item.label),
                kind: kind_of(&qs),
                payload: Payload::Laws(qs),
                scope: Scope::Suite,
                expectation: Expectation::Holds,
            });
        }
    }

    fn property(&mut self, id: &str, location: &str, p: Property) {
        self.0.push(Claim {
            id: id.into(),
            location: location.into(),
            kind: ClaimKind::Property,
            payload: Payload::Property(p),
            scope: Scope::Suite,
            expectation: Expectation::Holds,
        });
    }
}

fn each_k(ks: &[u8], f: impl Fn(u8) -> String) -> Vec<String> {
    ks.iter().map(|&k| f(k)).collect()
}

const SAME_FIBER: &str = "x & (x | y) = x, y & (y | x) = y";

/// The whole corpus, in report order.
pub fn claims() -> Vec<Claim> {
    use Expectation::*;
    let mut b = Builder(Vec::new());
    b.basis("Def3.1", "Definition 3.1", original_basis());
    b.basis("Thm3.3", "Theorem 3.3", reduced_basis());

    b.holds("L3.6-1", "Lemma 3.6 (1)", &["x & 0 = 0 => J1 x = 0"]);
    b.holds("L3.6-2", "Lemma 3.6 (2)", &["x & 0 = 0 => J2 x = x"]);
    b.holds("L3.6-3-stated", "Lemma 3.6 (3), statement", &["x & 0 = 0 => J0 x = ~x"]);
    b.law("L3.6-3-proof", "Lemma 3.6 (3), proof", &["x & 0 = 0 => J1 x = ~x".into()], Discrepancy);
    b.holds("L3.7-1", "Lemma 3.7 (1)", &[&format!("{SAME_FIBER} => J1 x = J1 y")]);
    b.holds("L3.7-2", "Lemma 3.7 (2)", &["x & 0 = 0 => J1 x = 0"]);
    b.holds("L3.7-3", "Lemma 3.7 (3)", &["x = ~x => J1 x = 1"]);
    b.holds("L3.7-4", "Lemma 3.7 (4)", &["J1 x & (J1 x | x) = x & ~x"]);
    b.property("L3.8-1", "Lemma 3.8 (1)", Property::SurjectiveTransitions);
    b.property("L3.8-2", "Lemma 3.8 (2)", Property::BottomMapsNotInjective);
    b.holds("L3.8-3", "Lemma 3.8 (3)", &["J2 x & (J2 x | x) = x", "J0 x & (J0 x | x) = ~x"]);
    b.holds("L3.8-4", "Lemma 3.8 (4)", &[&format!("{SAME_FIBER} => J2(x | y) = J2 x | J2 y")]);
    b.property("P3.10", "Proposition 3.10", Property::J2IntervalIsomorphism);
    b.property("L3.12-1", "Lemma 3.12 (1)", Property::StrictlyDecreasingTops);
    b.holds("L3.12-2", "Lemma 3.12 (2)", &["J2(x & (x | y)) & J2 x = J2(x & (x | y))"]);

    let all = [0, 1, 2];
    let a1 = "Lemma A.1";
    b.holds("A.1-1", &format!("{a1} (1)"), &["1 & x = x"]);
    b.law("A.1-2", &format!("{a1} (2)"), &each_k(&all, |k| format!("J{k} x | ~J{k} x = 1")), Holds);
    b.law("A.1-3", &format!("{a1} (3)"), &each_k(&all, |k| format!("J{k} x & ~J{k} x = 0")), Holds);
    b.holds("A.1-4", &format!("{a1} (4)"), &["J2(x | ~x) = J2 x | J2 ~x"]);
    b.law("A.1-5", &format!("{a1} (5)"), &each_k(&all, |k| format!("J2 J{k} x = J{k} x")), Holds);
    b.law("A.1-6", &format!("{a1} (6)"), &each_k(&all, |k| format!("J0 J{k} x = ~J{k} x")), Holds);
    let mut perms = Vec::new();
    let mut pairs = Vec::new();
    for i in all {
        for k in all {
            pairs.push(format!("(J{i} x | J{k} x) & J{i} x = J{i} x"));
            if i != k {
                let j = 3 - i - k;
                perms.push(format!("J{i} x = ~(J{j} x | J{k} x)"));
            }
        }
    }
    b.law("A.1-7", &format!("{a1} (7)"), &perms, Holds);
    b.law("A.1-8", &format!("{a1} (8)"), &each_k(&all, |k| format!("J{k} x | ~J{k} x = 1")), Holds);
    b.law("A.1-9", &format!("{a1} (9)"), &pairs, Holds);

    let a2 = "Lemma A.2";
    b.holds("A.2-1", &format!("{a2} (1)"), &["J2 1 = 1", "J0 0 = 1", "J2 0 = 0", "J0 1 = 0"]);
    b.law("A.2-2-stated", &format!("{a2} (2), statement"), &["J2 x | J2 x = J2(1 | x)".into()], Discrepancy);
    b.holds("A.2-2-proof", &format!("{a2} (2), proof"), &["J2 x | J0 x = J2(1 | x)"]);
    b.holds("A.2-3", &format!("{a2} (3)"), &["J2(1 | x) = J2(1 | ~x)"]);
    b.holds("A.2-4", &format!("{a2} (4)"), &["J2(1 | x) = J2(1 | (0 & x))"]);
    let mut below = Vec::new();
    for i in all {
        for k in all {
            if i != k {
                below.push(format!("J{i} x & ~J{k} x = J{i} x"));
            }
        }
    }
    b.law("A.2-5", &format!("{a2} (5)"), &below, Holds);
    b.holds("A.2-6", &format!("{a2} (6)"), &["J2(x & 0) = 0"]);
    b.holds("A.2-7", &format!("{a2} (7)"), &["J2(1 | (x & y)) = J2(1 | x) & J2(1 | y)"]);
    b.holds("A.2-8", &format!("{a2} (8)"), &["J1(x & y) = J1 x | J1 y"]);
    b.holds("A.2-9", &format!("{a2} (9)"), &["J0(x & y) = (J2 x & J0 y) | (J0 x & ~J1 y)"]);
    b.holds("A.2-10", &format!("{a2} (10)"), &["J2(x & y) = ~(J2 x & J0 y) & J2 x & ~J1 y"]);
    b.holds("A.2-11", &format!("{a2} (11)"), &["J2(x & y) = J2 x & J2 y"]);
    b.holds("A.2-12", &format!("{a2} (12)"), &["J0(x | y) = J0 x & J0 y"]);
    b.law("A.2-13", &format!("{a2} (13)"), &each_k(&[1, 2], |k| format!("x | J{k} x = x")), Holds);
    b.holds("A.2-14", &format!("{a2} (14)"), &["J0 x = J0 y, J1 x = J1 y, J2 x = J2 y => x = y"]);

    b.law("NF", "(NF)", &["J1 x = 1 => y = 1".into()], Fails);
    b.0.push(Claim {
        id: "EFJ".into(),
        location: "(EFJ)".into(),
        kind: ClaimKind::Property,
        payload: Payload::Rule(parse_rule("J1 x |- y").expect("rule parses")),
        scope: Scope::Wke,
        expectation: Fails,
    });
    b.basis("IBSL", "Involutive bisemilattice law", ibsl_basis());
    b.0
}

/// Outcome of one claim over its scope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Outcome {
    Holds,
    Fails { algebra: String, instance: String, counterexample: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub location: String,
    pub kind: ClaimKind,
    pub scope: Vec<String>,
    pub expectation: Expectation,
    pub outcome: Outcome,
    pub matches: bool,
    pub note: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub results: Vec<ClaimResult>,
}

impl CorpusReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &ClaimResult> {
        self.results.iter().filter(|r| !r.matches)
    }

    pub fn passed(&self) -> bool {
        self.mismatches().next().is_none()
    }
}

/// WK^e and every enumerated Bochvar algebra up to `max_size` elements.
pub fn default_scope(max_size: usize) -> Result<Vec<FiniteAlgebra>, CorpusError> {
    let mut out = vec![wke()];
    out.extend(enumerate_bca(max_size)?.into_iter().filter(|a| a.name() != "wke"));
    Ok(out)
}

/// Evaluates every claim; suite-scoped claims run on `scope`, defaulting to
/// algebras of at most eight elements.
pub fn run_corpus(scope: Option<&[FiniteAlgebra]>) -> Result<CorpusReport, CorpusError> {
    let owned;
    let suite = match scope {
        Some(s) => s,
        None => {
            owned = default_scope(8)?;
            &owned
        }
    };
    let generator = [wke()];
    let mut results = Vec::new();
    for claim in claims() {
        let algebras: &[FiniteAlgebra] = match claim.scope {
            Scope::Wke => &generator,
            Scope::Suite => suite,
        };
        let mut outcome = Outcome::Holds;
        for a in algebras {
            if let Some(f) = evaluate(&claim.payload, a)? {
                outcome = f;
                break;
            }
        }
        let failed = matches!(outcome, Outcome::Fails { .. });
        let matches = failed == (claim.expectation != Expectation::Holds);
        let note = (claim.expectation == Expectation::Discrepancy && failed).then_some("paper erratum candidate");
        results.push(ClaimResult {
            id: claim.id,
            location: claim.location,
            kind: claim.kind,
            scope: algebras.iter().map(|a| a.name().to_string()).collect(),
            expectation: claim.expectation,
            outcome,
            matches,
            note,
        });
    }
    Ok(CorpusReport { results })
}

fn evaluate(payload: &Payload, a: &FiniteAlgebra) -> Result<Option<Outcome>, CorpusError> {
    let fails = |instance: String, counterexample: String| Outcome::Fails { algebra: a.name().to_string(), instance, counterexample };
    match payload {
        Payload::Laws(qs) => {
            for q in qs {
                if let Verdict::Fails(v) = a.holds_quasi_identity(q)? {
                    return Ok(Some(fails(q.to_string(), format_valuation(a, &v))));
                }
            }
            Ok(None)
        }
        Payload::Rule(r) => match LogicalMatrix::with_top(a.clone()).rule_derivable(r)? {
            Verdict::Holds => Ok(None),
            Verdict::Fails(v) => Ok(Some(fails(r.to_string(), format_valuation(a, &v)))),
        },
        Payload::Property(p) => Ok(check_property(*p, a)?.map(|why| fails(format!("{p:?}"), why))),
    }
}

/// `None` when the property holds, else what went wrong.
fn check_property(p: Property, a: &FiniteAlgebra) -> Result<Option<String>, CorpusError> {
    if a.size() == 1 {
        return Ok(None);
    }
    let d = decompose(a)?;
    let s = &d.system;
    let bottom = &s.fibers[s.bottom];
    let name = |i: usize| s.indices[i].clone();
    match p {
        Property::SurjectiveTransitions => {
            for (&(i, j), h) in &s.homs {
                if !h.is_surjective(s.fibers[j].size()) {
                    return Ok(Some(format!("p_{{{} {}}} not onto", name(i), name(j))));
                }
            }
        }
        Property::BottomMapsNotInjective => {
            for i in (0..s.len()).filter(|&i| i != s.bottom) {
                if s.hom(s.bottom, i).is_injective() {
                    return Ok(Some(format!("p_{{{} {}}} injective", name(s.bottom), name(i))));
                }
            }
        }
        Property::J2IntervalIsomorphism => {
            let local = |x: usize| d.fiber_of[x].1;
            for i in 0..s.len() {
                let fiber = &s.fibers[i];
                let top = local(a.jk(2, d.element(i, fiber.one())));
                let j2 = |x| local(a.jk(2, d.element(i, x)));
                let interval: BTreeSet<usize> = (0..bottom.size()).filter(|&y| bottom.meet(y, top) == y).collect();
                let image: BTreeSet<usize> = (0..fiber.size()).map(j2).collect();
                if image != interval || image.len() != fiber.size() {
                    return Ok(Some(format!("J2 on fiber {} is not a bijection onto [0, J2 1]", name(i))));
                }
                for x in 0..fiber.size() {
                    let star = bottom.meet(bottom.neg(j2(x)), top);
                    if j2(fiber.neg(x)) != star {
                        return Ok(Some(format!("J2 misses the interval complement on fiber {}", name(i))));
                    }
                    for y in 0..fiber.size() {
                        if j2(fiber.meet(x, y)) != bottom.meet(j2(x), j2(y)) || j2(fiber.join(x, y)) != bottom.join(j2(x), j2(y)) {
                            return Ok(Some(format!("J2 is not a lattice map on fiber {}", name(i))));
                        }
                    }
                }
            }
        }
        Property::StrictlyDecreasingTops => {
            let top = |i: usize| d.fiber_of[a.jk(2, d.element(i, s.fibers[i].one()))].1;
            for i in 0..s.len() {
                for j in 0..s.len() {
                    let strictly_below = bottom.meet(top(j), top(i)) == top(j) && top(i) != top(j);
                    if i != j && s.leq(i, j) && !strictly_below {
                        return Ok(Some(format!("J2 1 of {} not strictly below that of {}", name(j), name(i))));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BasisReport {
    pub algebras: usize,
    pub mutants: usize,
    /// Mutants that still turned out to be Bochvar algebras.
    pub member_mutants: usize,
    pub disagreements: Vec<String>,
}

/// Runs the three membership tests on every enumerated algebra up to
/// `max_size` and on `mutants` single-entry table edits of them.
pub fn basis_equivalence_check(max_size: usize, mutants: usize, seed: u64) -> Result<BasisReport, CorpusError> {
    let algebras = enumerate_bca(max_size)?;
    let mut report = BasisReport { algebras: algebras.len(), ..BasisReport::default() };
    let record = |a: &FiniteAlgebra, report: &mut BasisReport| -> Result<bool, CorpusError> {
        let m = membership(a)?;
        if !m.agree() {
            report.disagreements.push(format!("{}: original {:?}, reduced {:?}, separation {:?}", a.name(), m.original, m.reduced, m.separation));
        }
        Ok(m.original.is_none())
    };
    for a in &algebras {
        if !record(a, &mut report)? {
            report.disagreements.push(format!("{} rejected", a.name()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tables = ["neg", "or", "and", "J0", "J1", "J2"];
    let candidates: Vec<&FiniteAlgebra> = algebras.iter().filter(|a| a.size() > 1).collect();
    while report.mutants < mutants {
        let a = candidates[rng.gen_range(0..candidates.len())];
        let table = tables[rng.gen_range(0..tables.len())];
        let n = a.size();
        let len = if matches!(table, "or" | "and") { n * n } else { n };
        let index = rng.gen_range(0..len);
        let value = rng.gen_range(0..n);
        let mutant = a.with_entry(table, index, value)?.with_name(format!("{}[{table}#{index}:={}]", a.name(), a.label(value)));
        report.mutants += 1;
        if record(&mutant, &mut report)? {
            report.member_mutants += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::b4_plus_b2;

    fn result<'a>(r: &'a CorpusReport, id: &str) -> &'a ClaimResult {
        r.results.iter().find(|c| c.id == id).unwrap()
    }

    #[test]
    fn inventory() {
        let cs = claims();
        let ids: BTreeSet<&str> = cs.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids.len(), cs.len(), "ids are unique");
        let count = |prefix: &str| cs.iter().filter(|c| c.id.starts_with(prefix)).count();
        assert_eq!(count("Def3.1-"), 20);
        assert_eq!(count("Thm3.3-"), 13);
        assert_eq!(count("L3.6-"), 4);
        assert_eq!(count("L3.7-"), 4);
        assert_eq!(count("L3.8-"), 4);
        assert_eq!(count("P3.10"), 1);
        assert_eq!(count("L3.12-"), 2);
        assert_eq!(count("A.1-"), 9);
        assert_eq!(count("A.2-"), 15);
        assert_eq!(count("IBSL-"), 8);
        assert!(ids.contains("NF") && ids.contains("EFJ"));
        assert_eq!(cs.len(), 20 + 13 + 15 + 9 + 15 + 2 + 8);
    }

    #[test]
    fn on_wke() {
        let r = run_corpus(Some(&[wke()])).unwrap();
        assert!(r.passed(), "{:#?}", r.mismatches().collect::<Vec<_>>());
        let stated = result(&r, "A.2-2-stated");
        assert_eq!(stated.note, Some("paper erratum candidate"));
        match &stated.outcome {
            Outcome::Fails { counterexample, .. } => assert_eq!(counterexample, "x=0"),
            other => panic!("{other:?}"),
        }
        assert_eq!(result(&r, "A.2-2-proof").outcome, Outcome::Holds);
        match &result(&r, "NF").outcome {
            Outcome::Fails { counterexample, .. } => assert_eq!(counterexample, "x=H y=0"),
            other => panic!("{other:?}"),
        }
        assert!(result(&r, "L3.6-3-proof").note.is_some());
    }

    #[test]
    fn default_scope_passes() {
        let r = run_corpus(None).unwrap();
        assert!(r.passed(), "{:#?}", r.mismatches().collect::<Vec<_>>());
        assert!(result(&r, "P3.10").scope.len() > 5);
    }

    #[test]
    fn properties_on_b4_plus_b2() {
        let g = b4_plus_b2();
        for p in [Property::SurjectiveTransitions, Property::BottomMapsNotInjective, Property::J2IntervalIsomorphism, Property::StrictlyDecreasingTops] {
            assert_eq!(check_property(p, &g).unwrap(), None, "{p:?}");
        }
    }

    /// A J2 table moved off the interval is caught by the structural checks
    /// even though the decomposition of the reduct is unchanged.
    #[test]
    fn broken_j2_is_caught() {
        let g = b4_plus_b2();
        let (top, one) = (g.element("top").unwrap(), g.one());
        let bad = g.with_entry("J2", top, one).unwrap();
        assert!(check_property(Property::J2IntervalIsomorphism, &bad).unwrap().is_some());
        assert!(check_property(Property::StrictlyDecreasingTops, &bad).unwrap().is_some());
    }

    #[test]
    fn basis_tests_agree() {
        let r = basis_equivalence_check(6, 50, 1).unwrap();
        assert!(r.disagreements.is_empty(), "{:#?}", r.disagreements);
        assert_eq!(r.mutants, 50);
    }

    #[test]
    fn edited_wke_rejected_by_all_three() {
        let w = wke();
        let h = w.element("H").unwrap();
        let bad = w.with_entry("J1", h, w.zero()).unwrap();
        let m = membership(&bad).unwrap();
        assert!(m.agree() && m.original.is_some() && m.reduced.is_some() && !m.separation.is_separated());
    }
}
