use bochvar::algebra::{b4, b4_plus_b2, enumerate_homomorphisms, wke, Homomorphism};
use bochvar::amalgam::{amalgamate, fixpoint_obstruction, sweep, AmalgamOutcome, Quasivariety, VFormation};
use bochvar::plonka::enumerate_bca;
use bochvar::term::parse_quasi_identity;

#[test]
fn bca_sweep_succeeds() {
    let members = enumerate_bca(6).unwrap();
    let r = sweep(&members, Quasivariety::Bca, 4, 100, 7).unwrap();
    assert!(r.cases > 100);
    assert!(r.failures.is_empty(), "{:#?}", r.failures);
}

/// Every NBCA failure comes with a fixpoint obstruction, and the obstructed
/// V-formations still amalgamate in BCA.
#[test]
fn nbca_sweep_failures_are_obstructed() {
    let members = enumerate_bca(6).unwrap();
    let r = sweep(&members, Quasivariety::Nbca, 4, 100, 7).unwrap();
    assert!(r.cases > 100);
    assert_eq!(r.unexplained().count(), 0, "{:#?}", r.failures);
    assert_eq!(r.obstructed, r.failures.len());
    assert!(r.obstructed > 0);
}

fn swapped_formation() -> VFormation {
    let (a, g) = (b4(), b4_plus_b2());
    let i = Homomorphism::new(vec![0, 1, 2, 3]);
    let j = Homomorphism::new(vec![0, 1, 3, 2]);
    VFormation::new(a, g.clone(), g, i, j).unwrap()
}

#[test]
fn b4_into_b4_plus_b2_twisted() {
    let v = swapped_formation();
    assert!(fixpoint_obstruction(&v).is_some());
    assert!(matches!(amalgamate(&v, Quasivariety::Nbca).unwrap(), AmalgamOutcome::Failed(_)));
    assert!(matches!(amalgamate(&v, Quasivariety::Bca).unwrap(), AmalgamOutcome::Found(_)));
}

/// The obstruction relies on J1 preserving joins; WK^e generates BCA, so the
/// identity holding there is enough.
#[test]
fn j1_preserves_joins() {
    let q = parse_quasi_identity("J1 (x | y) = J1 x | J1 y").unwrap();
    assert!(wke().holds_quasi_identity(&q).unwrap().holds());
}

/// Without the obstruction the pair search must succeed: compatible pairs
/// into B4⊕B2 are the only possible source of an NBCA amalgam.
#[test]
fn untwisted_formation_amalgamates() {
    let (a, g) = (b4(), b4_plus_b2());
    let id = Homomorphism::new(vec![0, 1, 2, 3]);
    let v = VFormation::new(a, g.clone(), g.clone(), id.clone(), id).unwrap();
    assert!(fixpoint_obstruction(&v).is_none());
    assert!(matches!(amalgamate(&v, Quasivariety::Nbca).unwrap(), AmalgamOutcome::Found(_)));
    assert_eq!(enumerate_homomorphisms(&g, &g, &[]).len(), 2);
}
