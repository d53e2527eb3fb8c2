//! Logical matrices: consequence, theoremhood, the deduction theorem and
//! passivity witnesses.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::algebra::{b4_plus_b2, format_valuation, wke, AlgebraError, CompiledTerm, Elem, FiniteAlgebra, Valuation, Verdict};
use crate::classes::ClassTable;
use crate::term::{render_term, standard_variables, terms_up_to, tau, BinaryOp, Equation, QuasiIdentity, Rule, Term, UnaryOp};

/// An algebra with a set of designated values.
#[derive(Clone, Debug)]
pub struct LogicalMatrix {
    pub algebra: FiniteAlgebra,
    designated: Vec<bool>,
}

impl LogicalMatrix {
    pub fn new(algebra: FiniteAlgebra, designated: &[Elem]) -> Result<Self, AlgebraError> {
        if designated.is_empty() {
            return Err(AlgebraError::Invalid("empty designated set".into()));
        }
        let mut flags = vec![false; algebra.size()];
        for &d in designated {
            *flags
                .get_mut(d)
                .ok_or_else(|| AlgebraError::Invalid(format!("designated element {d} out of range")))? = true;
        }
        Ok(LogicalMatrix { algebra, designated: flags })
    }

    /// `a` with `{1}` designated.
    pub fn with_top(a: FiniteAlgebra) -> Self {
        let one = a.one();
        LogicalMatrix::new(a, &[one]).expect("the top element exists")
    }

    /// Three-valued external logic: WK^e with `{1}`.
    pub fn external() -> Self {
        LogicalMatrix::with_top(wke())
    }

    /// Its non-paraconsistent extension: B4⊕B2 with `{1}`.
    pub fn nonparaconsistent() -> Self {
        LogicalMatrix::with_top(b4_plus_b2())
    }

    pub fn is_designated(&self, x: Elem) -> bool {
        self.designated[x]
    }

    /// Exhaustive check; returns the least valuation designating every
    /// premise but not `phi`.
    pub fn consequence(&self, premises: &[Term], phi: &Term) -> Result<Verdict, AlgebraError> {
        let vars: Vec<String> = premises
            .iter()
            .chain([phi])
            .flat_map(Term::variables)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let a = &self.algebra;
        if (premises.iter().any(Term::uses_j) || phi.uses_j()) && !a.has_j() {
            return Err(AlgebraError::NoJ(a.name().to_string()));
        }
        let prem: Vec<CompiledTerm> = premises.iter().map(|t| CompiledTerm::new(t, &vars)).collect();
        let concl = CompiledTerm::new(phi, &vars);
        let mut stack = Vec::new();
        let mut found = None;
        crate::algebra::for_each_assignment(a.size(), vars.len(), |vals| {
            let designated = |t: &CompiledTerm, st: &mut Vec<Elem>| self.designated[t.eval(a, vals, st)];
            if prem.iter().all(|p| designated(p, &mut stack)) && !designated(&concl, &mut stack) {
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

    pub fn is_theorem(&self, phi: &Term) -> Result<Verdict, AlgebraError> {
        self.consequence(&[], phi)
    }

    pub fn rule_derivable(&self, rule: &Rule) -> Result<Verdict, AlgebraError> {
        self.consequence(&rule.premises, &rule.conclusion)
    }

    /// True if `Γ, ψ ⊢ φ` and `Γ ⊢ J2 ψ → J2 φ` get the same verdict.
    pub fn check_deduction_instance(&self, premises: &[Term], psi: &Term, phi: &Term) -> Result<bool, AlgebraError> {
        let mut extended = premises.to_vec();
        extended.push(psi.clone());
        let left = self.consequence(&extended, phi)?.holds();
        let packaged = Term::implies(Term::j(2, psi.clone()), Term::j(2, phi.clone()));
        let right = self.consequence(premises, &packaged)?.holds();
        Ok(left == right)
    }
}

/// Outcome of a passivity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Passivity {
    /// No valuation satisfies every antecedent.
    Witnessed,
    /// Least valuation satisfying every antecedent.
    NotWitnessed(Valuation),
}

impl Passivity {
    pub fn is_witnessed(&self) -> bool {
        matches!(self, Passivity::Witnessed)
    }
}

/// Checks whether every valuation into `a` falsifies some antecedent of `q`.
/// A quasi-identity without antecedents is never witnessed.
pub fn witness_passivity(q: &QuasiIdentity, a: &FiniteAlgebra) -> Result<Passivity, AlgebraError> {
    let vars: Vec<String> = q.variables().into_iter().collect();
    if q.antecedents.iter().any(|e| e.lhs.uses_j() || e.rhs.uses_j()) && !a.has_j() {
        return Err(AlgebraError::NoJ(a.name().to_string()));
    }
    let ante: Vec<(CompiledTerm, CompiledTerm)> =
        q.antecedents.iter().map(|e| (CompiledTerm::new(&e.lhs, &vars), CompiledTerm::new(&e.rhs, &vars))).collect();
    let mut stack = Vec::new();
    let mut found = None;
    crate::algebra::for_each_assignment(a.size(), vars.len(), |vals| {
        if ante.iter().all(|(l, r)| l.eval(a, vals, &mut stack) == r.eval(a, vals, &mut stack)) {
            found = Some(vals.to_vec());
            return false;
        }
        true
    });
    Ok(match found {
        None => Passivity::Witnessed,
        Some(vals) => Passivity::NotWitnessed(vars.into_iter().zip(vals).collect()),
    })
}

/// The quasi-identity `p1 = 1, ..., pn = 1 => c = 1` of a rule.
pub fn rule_to_quasi_identity(rule: &Rule) -> QuasiIdentity {
    QuasiIdentity::new(rule.premises.iter().map(tau).collect(), tau(&rule.conclusion))
}

pub fn witness_rule_passivity(rule: &Rule, a: &FiniteAlgebra) -> Result<Passivity, AlgebraError> {
    witness_passivity(&rule_to_quasi_identity(rule), a)
}

/// One term (or class of terms) and its verdict in each matrix.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremVerdict {
    pub term: String,
    /// Number of terms this line stands for.
    pub count: u128,
    pub external: bool,
    pub nonparaconsistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AgreementReport {
    pub depth: usize,
    pub variables: usize,
    pub terms: u128,
    pub classes: usize,
    /// Terms that are theorems of exactly one of the two matrices.
    pub discrepancies: Vec<TheoremVerdict>,
    /// Per-term verdicts when there are at most [`PER_TERM_LIMIT`] terms,
    /// otherwise one line per class.
    pub verdicts: Vec<TheoremVerdict>,
    pub per_term: bool,
}

pub const PER_TERM_LIMIT: u128 = 10_000;

/// Compares theoremhood in the external and non-paraconsistent matrices over
/// every term of depth at most `depth` in `k` variables.
pub fn theoremhood_agreement(depth: usize, k: usize) -> AgreementReport {
    let ext = LogicalMatrix::external();
    let nonp = LogicalMatrix::nonparaconsistent();
    let vars = standard_variables(k);
    let table = ClassTable::build(&[ext.algebra.clone(), nonp.algebra.clone()], &vars, depth);
    let all_designated = |m: &LogicalMatrix, v: &[Elem]| v.iter().all(|&x| m.is_designated(x));
    let class_lines: Vec<TheoremVerdict> = table
        .classes
        .iter()
        .map(|c| TheoremVerdict {
            term: render_term(&c.representative),
            count: c.count,
            external: all_designated(&ext, table.segment(&c.values, 0)),
            nonparaconsistent: all_designated(&nonp, table.segment(&c.values, 1)),
        })
        .collect();
    let terms = table.total();
    let per_term = terms <= PER_TERM_LIMIT;
    let verdicts = if per_term {
        terms_up_to(depth, &vars)
            .iter()
            .map(|t| TheoremVerdict {
                term: render_term(t),
                count: 1,
                external: ext.is_theorem(t).expect("full signature").holds(),
                nonparaconsistent: nonp.is_theorem(t).expect("full signature").holds(),
            })
            .collect()
    } else {
        class_lines
    };
    let discrepancies = verdicts.iter().filter(|v| v.external != v.nonparaconsistent).cloned().collect();
    AgreementReport { depth, variables: k, terms, classes: table.classes.len(), discrepancies, verdicts, per_term }
}

/// A deduction-theorem instance where the two sides disagree.
#[derive(Clone, Debug, Serialize)]
pub struct DeductionFailure {
    pub premise: Option<String>,
    pub psi: String,
    pub phi: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeductionReport {
    pub depth: usize,
    pub variables: usize,
    /// Number of `(Γ, ψ, φ)` triples covered, `Γ` empty or a single term.
    pub instances: u128,
    /// Number of class triples actually evaluated.
    pub checked: u128,
    pub failures: Vec<DeductionFailure>,
}

/// Checks the deduction theorem in the external matrix for every `Γ` with at
/// most one member and all `ψ`, `φ` of depth at most `depth` in `k` variables.
///
/// Premises are grouped by the set of valuations that designate them, `ψ` and
/// `φ` by their full value vectors; both sides of the equivalence are then
/// evaluated on the vectors through the algebra's tables.
pub fn deduction_scan(depth: usize, k: usize) -> DeductionReport {
    let m = LogicalMatrix::external();
    let a = &m.algebra;
    let vars = standard_variables(k);
    let table = ClassTable::build(std::slice::from_ref(a), &vars, depth);
    let points = a.size().pow(k as u32);
    let mask_of = |v: &[Elem]| -> Vec<bool> { v.iter().map(|&x| m.is_designated(x)).collect() };

    // premise groups: None is the empty premise set
    let mut groups: Vec<(Option<String>, Vec<bool>, u128)> = vec![(None, vec![true; points], 1)];
    {
        let mut index: std::collections::HashMap<Vec<bool>, usize> = std::collections::HashMap::new();
        for c in &table.classes {
            let mask = mask_of(&c.values);
            match index.get(&mask) {
                Some(&i) => groups[i].2 += c.count,
                None => {
                    index.insert(mask.clone(), groups.len());
                    groups.push((Some(render_term(&c.representative)), mask, c.count));
                }
            }
        }
    }

    let mut instances = 0u128;
    let mut checked = 0u128;
    let mut failures = Vec::new();
    for psi in &table.classes {
        let j2_psi = table.apply_unary(UnaryOp::J2, &psi.values);
        let not_j2_psi = table.apply_unary(UnaryOp::Neg, &j2_psi);
        let psi_mask = mask_of(&psi.values);
        for phi in &table.classes {
            let packaged = table.apply_binary(BinaryOp::Or, &not_j2_psi, &table.apply_unary(UnaryOp::J2, &phi.values));
            let packaged_mask = mask_of(&packaged);
            let phi_mask = mask_of(&phi.values);
            for (name, gamma, count) in &groups {
                let left = (0..points).all(|p| !(gamma[p] && psi_mask[p]) || phi_mask[p]);
                let right = (0..points).all(|p| !gamma[p] || packaged_mask[p]);
                checked += 1;
                instances += count * psi.count * phi.count;
                if left != right {
                    failures.push(DeductionFailure {
                        premise: name.clone(),
                        psi: render_term(&psi.representative),
                        phi: render_term(&phi.representative),
                    });
                }
            }
        }
    }
    DeductionReport { depth, variables: k, instances, checked, failures }
}

/// `Γ ⊢ φ` in the external matrix agrees with `τ(Γ) ⇒ τ(φ)` in WK^e.
pub fn bridge_instance(premises: &[Term], phi: &Term) -> Result<bool, AlgebraError> {
    let m = LogicalMatrix::external();
    let logical = m.consequence(premises, phi)?.holds();
    let q = QuasiIdentity::new(premises.iter().map(tau).collect::<Vec<Equation>>(), tau(phi));
    let algebraic = m.algebra.holds_quasi_identity(&q)?.holds();
    Ok(logical == algebraic)
}

/// `x=H y=0`, or `holds`.
pub fn describe_verdict(a: &FiniteAlgebra, v: &Verdict) -> String {
    match v {
        Verdict::Holds => "holds".into(),
        Verdict::Fails(val) => format_valuation(a, val),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_quasi_identity, parse_rule, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn cex(m: &LogicalMatrix, v: &Verdict) -> String {
        describe_verdict(&m.algebra, v)
    }

    #[test]
    fn consequence_examples() {
        let m = LogicalMatrix::external();
        assert!(m.consequence(&[t("x")], &t("J2 x")).unwrap().holds());
        assert_eq!(cex(&m, &m.consequence(&[t("J1 x")], &t("y")).unwrap()), "x=H y=0");
        assert_eq!(cex(&m, &m.is_theorem(&t("x | ~x")).unwrap()), "x=H");
        assert!(m.is_theorem(&t("J2 x | ~J2 x")).unwrap().holds());
        assert!(m.is_theorem(&t("1")).unwrap().holds());
    }

    #[test]
    fn nonparaconsistent_examples() {
        let m = LogicalMatrix::nonparaconsistent();
        assert_eq!(cex(&m, &m.is_theorem(&t("x | ~x")).unwrap()), "x=top");
        assert!(m.is_theorem(&t("J2 x | ~J2 x")).unwrap().holds());
        let efj = parse_rule("J1(x) |- y").unwrap();
        assert!(m.rule_derivable(&efj).unwrap().holds());
        assert!(!LogicalMatrix::external().rule_derivable(&efj).unwrap().holds());
    }

    #[test]
    fn deduction_examples() {
        let m = LogicalMatrix::external();
        assert!(m.check_deduction_instance(&[], &t("x"), &t("x")).unwrap());
        assert!(m.check_deduction_instance(&[t("x")], &t("y"), &t("x & y")).unwrap());
        assert!(m.check_deduction_instance(&[t("J1 x")], &t("1"), &t("y")).unwrap());
        let mp = parse_rule("J2 x, J2 x -> J2 y |- J2 y").unwrap();
        assert!(m.rule_derivable(&mp).unwrap().holds());
    }

    #[test]
    fn passivity() {
        let nf = parse_quasi_identity("J1 x = 1 => y = 1").unwrap();
        assert!(witness_passivity(&nf, &b4_plus_b2()).unwrap().is_witnessed());
        let w = wke();
        match witness_passivity(&nf, &w).unwrap() {
            Passivity::NotWitnessed(v) => assert_eq!(format_valuation(&w, &v), "x=H y=1"),
            other => panic!("{other:?}"),
        }
        let plain = parse_quasi_identity("x = x").unwrap();
        assert!(!witness_passivity(&plain, &w).unwrap().is_witnessed());
        let efj = parse_rule("J1(x) |- y").unwrap();
        assert!(witness_rule_passivity(&efj, &b4_plus_b2()).unwrap().is_witnessed());
    }

    /// Deduction theorem by direct evaluation of every instance at a small bound.
    #[test]
    fn deduction_scan_matches_direct_check() {
        let m = LogicalMatrix::external();
        let vars = standard_variables(1);
        let terms = terms_up_to(1, &vars);
        let mut direct = 0u128;
        let premise_sets: Vec<Vec<Term>> = std::iter::once(vec![]).chain(terms.iter().map(|g| vec![g.clone()])).collect();
        for gamma in &premise_sets {
            for psi in &terms {
                for phi in &terms {
                    assert!(m.check_deduction_instance(gamma, psi, phi).unwrap());
                    direct += 1;
                }
            }
        }
        let report = deduction_scan(1, 1);
        assert_eq!(report.instances, direct);
        assert!(report.failures.is_empty());
    }

    #[test]
    fn agreement_small() {
        let r = theoremhood_agreement(1, 1);
        assert!(r.per_term);
        assert_eq!(r.terms, r.verdicts.len() as u128);
        assert!(r.discrepancies.is_empty());
        let r = theoremhood_agreement(2, 2);
        assert!(r.discrepancies.is_empty());
        assert!(r.verdicts.iter().any(|v| v.external && v.nonparaconsistent));
    }

    #[test]
    fn bridge() {
        for s in ["x", "J1 x", "J2 x | ~J2 x", "x & y", "~x"] {
            for c in ["y", "J2 x", "x | y", "1"] {
                assert!(bridge_instance(&[t(s)], &t(c)).unwrap(), "{s} / {c}");
            }
        }
    }
}
