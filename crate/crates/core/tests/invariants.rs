use std::collections::BTreeSet;

use bochvar::algebra::{
    b2, b4, b4_plus_b2, direct_product, enumerate_homomorphisms, principal_congruence, quotient, wke, Congruence, FiniteAlgebra,
    Valuation,
};
use bochvar::hilbert::{match_schema, schemas};
use bochvar::matrix::{bridge_instance, LogicalMatrix};
use bochvar::term::{covered_variables, eliminate_j01, is_external, parse_term, render_term, substitute, Substitution, Term};
use proptest::prelude::*;

const VARS: [&str; 3] = ["x", "y", "z"];

fn term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        4 => prop::sample::select(&VARS[..]).prop_map(Term::var),
        1 => Just(Term::zero()),
        1 => Just(Term::one()),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::neg),
            (0u8..3, inner.clone()).prop_map(|(k, t)| Term::j(k, t)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::and(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Term::or(l, r)),
        ]
    })
}

fn corpus() -> Vec<FiniteAlgebra> {
    vec![wke(), b2(), b4(), b4_plus_b2()]
}

fn valuation(a: &FiniteAlgebra, seed: &[usize; 3]) -> Valuation {
    VARS.iter().zip(seed).map(|(x, s)| (x.to_string(), s % a.size())).collect()
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(t in term()) {
        prop_assert_eq!(parse_term(&render_term(&t)).unwrap(), t);
    }

    #[test]
    fn external_terms_are_two_valued(t in term(), seed in any::<[usize; 3]>()) {
        let w = wke();
        if is_external(&t) {
            let v = w.eval(&t, &valuation(&w, &seed)).unwrap();
            prop_assert!(v == w.zero() || v == w.one());
        }
    }

    #[test]
    fn eliminating_j0_j1_preserves_values(t in term(), seed in any::<[usize; 3]>()) {
        let reduced = eliminate_j01(&t);
        prop_assert!(!reduced.uses_j01());
        for a in corpus() {
            let v = valuation(&a, &seed);
            prop_assert_eq!(a.eval(&t, &v).unwrap(), a.eval(&reduced, &v).unwrap(), "{}", a.name());
        }
    }

    #[test]
    fn covered_and_open_partition_the_variables(t in term()) {
        let c = covered_variables(&t);
        prop_assert!(c.covered.is_disjoint(&c.open));
        let all: BTreeSet<String> = c.covered.union(&c.open).cloned().collect();
        prop_assert_eq!(all, t.variables());
    }

    #[test]
    fn homomorphisms_commute_with_evaluation(t in term(), seed in any::<[usize; 3]>()) {
        let algebras = corpus();
        for a in &algebras {
            for b in &algebras {
                for h in enumerate_homomorphisms(a, b, &[]) {
                    let v = valuation(a, &seed);
                    let pushed: Valuation = v.iter().map(|(x, &e)| (x.clone(), h.apply(e))).collect();
                    prop_assert_eq!(h.apply(a.eval(&t, &v).unwrap()), b.eval(&t, &pushed).unwrap());
                }
            }
        }
    }

    #[test]
    fn quotient_map_has_kernel_theta(x in 0usize..9, y in 0usize..9) {
        let a = direct_product(&wke(), &wke());
        let theta = principal_congruence(&a, x, y);
        prop_assert!(theta.related(x, y));
        prop_assert!(theta.is_compatible(&a));
        let (q, p) = quotient(&a, &theta);
        prop_assert!(p.is_homomorphism(&a, &q));
        prop_assert!(p.is_surjective(q.size()));
        let kernel = Congruence::from_labels(&(0..a.size()).map(|e| p.apply(e)).collect::<Vec<_>>());
        prop_assert_eq!(kernel, theta);
    }

    /// Consequence survives substitution.
    #[test]
    fn consequence_is_structural(premises in prop::collection::vec(term(), 0..3), phi in term(), images in prop::collection::vec(term(), 3)) {
        let m = LogicalMatrix::external();
        if m.consequence(&premises, &phi).unwrap().holds() {
            let sigma: Substitution = VARS.iter().map(|x| x.to_string()).zip(images).collect();
            let premises: Vec<Term> = premises.iter().map(|p| substitute(p, &sigma)).collect();
            prop_assert!(m.consequence(&premises, &substitute(&phi, &sigma)).unwrap().holds());
        }
    }

    #[test]
    fn matrix_and_quasi_identity_agree(premises in prop::collection::vec(term(), 0..3), phi in term()) {
        prop_assert!(bridge_instance(&premises, &phi).unwrap());
    }

    /// Instantiating a schema with external formulas gives something the
    /// matcher accepts, and its substitution rebuilds the formula.
    #[test]
    fn schema_matching_is_sound(index in 0usize..29, args in prop::collection::vec(term(), 4), pick in any::<usize>()) {
        let schema = &schemas()[index];
        let pattern = &schema.patterns[pick % schema.patterns.len()];
        let sigma: Substitution = schema.metavariables().into_iter().zip(args.into_iter().map(|t| Term::j(2, t))).collect();
        let phi = substitute(pattern, &sigma);
        let found = match_schema(schema, &phi).unwrap();
        prop_assert!(schema.patterns.iter().any(|p| substitute(p, &found) == phi));
    }
}
