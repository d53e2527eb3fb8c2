//! Amalgamation of V-formations in BCA and NBCA by separating pairs of
//! homomorphisms into a generator, and the failure of relative congruence
//! extension in NBCA.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    all_congruences, b2, b4, b4_plus_b2, enumerate_homomorphisms, find_isomorphism, power_subalgebra,
    principal_congruence, quotient, wke, Congruence, Elem, FiniteAlgebra, Homomorphism,
};
use crate::classify::{classify, Class, ClassifyError};

/// Target quasivariety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quasivariety {
    Bca,
    Nbca,
}

impl Quasivariety {
    /// The algebra whose homomorphic images separate points of members.
    pub fn generator(self) -> FiniteAlgebra {
        match self {
            Quasivariety::Bca => wke(),
            Quasivariety::Nbca => b4_plus_b2(),
        }
    }

    pub fn contains(self, c: &Class) -> bool {
        match self {
            Quasivariety::Bca => c.is_bca(),
            Quasivariety::Nbca => c.is_nbca() || *c == Class::Trivial,
        }
    }
}

impl fmt::Display for Quasivariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Quasivariety::Bca => "BCA",
            Quasivariety::Nbca => "NBCA",
        })
    }
}

#[derive(Debug, Error)]
pub enum AmalgamError {
    #[error("{algebra} is {class}, not in {target}")]
    WrongClass { algebra: String, class: String, target: Quasivariety },
    #[error("{0} is not an embedding")]
    NotEmbedding(&'static str),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Two embeddings `i: A → B` and `j: A → C`.
#[derive(Clone, Debug)]
pub struct VFormation {
    pub a: FiniteAlgebra,
    pub b: FiniteAlgebra,
    pub c: FiniteAlgebra,
    pub i: Homomorphism,
    pub j: Homomorphism,
}

impl VFormation {
    pub fn new(a: FiniteAlgebra, b: FiniteAlgebra, c: FiniteAlgebra, i: Homomorphism, j: Homomorphism) -> Result<Self, AmalgamError> {
        if !i.is_embedding(&a, &b) {
            return Err(AmalgamError::NotEmbedding("i"));
        }
        if !j.is_embedding(&a, &c) {
            return Err(AmalgamError::NotEmbedding("j"));
        }
        Ok(VFormation { a, b, c, i, j })
    }
}

#[derive(Clone, Debug)]
pub struct Amalgam {
    pub d: FiniteAlgebra,
    pub h: Homomorphism,
    pub k: Homomorphism,
    /// Number of compatible pairs kept after merging equal joint kernels.
    pub pairs: usize,
}

/// Two elements of `B` or of `C` that no compatible pair tells apart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Unseparated {
    pub side: char,
    pub x: String,
    pub y: String,
}

#[derive(Clone, Debug)]
pub enum AmalgamOutcome {
    Found(Amalgam),
    Failed(Unseparated),
}

/// All injective homomorphisms `a → b`.
pub fn embeddings(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Vec<Homomorphism> {
    enumerate_homomorphisms(a, b, &[]).into_iter().filter(Homomorphism::is_injective).collect()
}

fn require(q: Quasivariety, a: &FiniteAlgebra) -> Result<(), AmalgamError> {
    let c = classify(a)?.class;
    if q.contains(&c) {
        Ok(())
    } else {
        Err(AmalgamError::WrongClass { algebra: a.name().to_string(), class: c.to_string(), target: q })
    }
}

/// Searches for an amalgam inside a power of the generator of `q`: every
/// pair `f: B → G`, `g: C → G` with `f ∘ i = g ∘ j` gives one coordinate.
pub fn amalgamate(v: &VFormation, q: Quasivariety) -> Result<AmalgamOutcome, AmalgamError> {
    for x in [&v.a, &v.b, &v.c] {
        require(q, x)?;
    }
    if !v.i.is_embedding(&v.a, &v.b) {
        return Err(AmalgamError::NotEmbedding("i"));
    }
    if !v.j.is_embedding(&v.a, &v.c) {
        return Err(AmalgamError::NotEmbedding("j"));
    }
    let g = q.generator();
    let from_b = enumerate_homomorphisms(&v.b, &g, &[]);
    let from_c = enumerate_homomorphisms(&v.c, &g, &[]);
    let mut kernels: BTreeSet<Congruence> = BTreeSet::new();
    let mut pairs: Vec<(&Homomorphism, &Homomorphism)> = Vec::new();
    for f in &from_b {
        let fi = v.i.then(f);
        for h in &from_c {
            if v.j.then(h) != fi {
                continue;
            }
            let joint: Vec<Elem> = f.map.iter().chain(&h.map).copied().collect();
            if kernels.insert(Congruence::from_labels(&joint)) {
                pairs.push((f, h));
            }
        }
    }
    let unseparated = |side: char, alg: &FiniteAlgebra, pick: &dyn Fn(&(&Homomorphism, &Homomorphism)) -> Homomorphism| {
        let maps: Vec<Homomorphism> = pairs.iter().map(pick).collect();
        for x in 0..alg.size() {
            for y in x + 1..alg.size() {
                if maps.iter().all(|m| m.apply(x) == m.apply(y)) {
                    return Some(Unseparated { side, x: alg.label(x).to_string(), y: alg.label(y).to_string() });
                }
            }
        }
        None
    };
    if let Some(u) = unseparated('B', &v.b, &|p| p.0.clone()).or_else(|| unseparated('C', &v.c, &|p| p.1.clone())) {
        return Ok(AmalgamOutcome::Failed(u));
    }
    let column = |x: Elem, first: bool| -> Vec<Elem> {
        pairs.iter().map(|(f, h)| if first { f.apply(x) } else { h.apply(x) }).collect()
    };
    let b_tuples: Vec<Vec<Elem>> = (0..v.b.size()).map(|x| column(x, true)).collect();
    let c_tuples: Vec<Vec<Elem>> = (0..v.c.size()).map(|x| column(x, false)).collect();
    let generators: Vec<Vec<Elem>> = b_tuples.iter().chain(&c_tuples).cloned().collect();
    let ps = power_subalgebra(&g, &generators, &format!("amalgam({},{})", v.b.name(), v.c.name()));
    let place = |t: &Vec<Elem>| ps.tuples.binary_search(t).expect("generator lies in the subalgebra");
    let h = Homomorphism::new(b_tuples.iter().map(place).collect());
    let k = Homomorphism::new(c_tuples.iter().map(place).collect());
    Ok(AmalgamOutcome::Found(Amalgam { d: ps.algebra, h, k, pairs: pairs.len() }))
}

/// Checks that `h`, `k` are embeddings, the square commutes and `d` lies in
/// `q`.
pub fn verify_amalgam(v: &VFormation, d: &FiniteAlgebra, h: &Homomorphism, k: &Homomorphism, q: Quasivariety) -> Result<(), String> {
    for (name, src, map) in [("h", &v.b, h), ("k", &v.c, k)] {
        map.check(src, d).map_err(|e| format!("{name} is not a homomorphism: {e}"))?;
        if !map.is_injective() {
            return Err(format!("{name} is not injective"));
        }
    }
    if v.i.then(h) != v.j.then(k) {
        return Err("square broken".into());
    }
    match classify(d) {
        Ok(c) if q.contains(&c.class) => Ok(()),
        Ok(_) => Err("class violation".into()),
        Err(e) => Err(format!("class violation: {e}")),
    }
}

/// Elements `b ∈ B`, `c ∈ C` with `J1 b = i(x)`, `J1 c = j(y)` and
/// `x ∨ y = 1` in `A`. Any amalgam then has `J1(h(b) ∨ k(c)) = 1`, and since
/// `J1` preserves joins in every Bochvar algebra that element is a negation
/// fixpoint, so no amalgam lies in NBCA.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FixpointObstruction {
    pub b: String,
    pub c: String,
}

pub fn fixpoint_obstruction(v: &VFormation) -> Option<FixpointObstruction> {
    // the trivial algebra lies in NBCA
    if v.b.size() == 1 {
        return None;
    }
    let preimage = |alg: &FiniteAlgebra, map: &Homomorphism, x: Elem| {
        let target = alg.jk(1, x);
        (0..v.a.size()).find(|&y| map.apply(y) == target)
    };
    for b in 0..v.b.size() {
        let Some(x) = preimage(&v.b, &v.i, b) else { continue };
        for c in 0..v.c.size() {
            let Some(y) = preimage(&v.c, &v.j, c) else { continue };
            if v.a.join(x, y) == v.a.one() {
                return Some(FixpointObstruction { b: v.b.label(b).to_string(), c: v.c.label(c).to_string() });
            }
        }
    }
    None
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepFailure {
    pub formation: String,
    pub reason: String,
    pub obstruction: Option<FixpointObstruction>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SweepReport {
    pub cases: usize,
    pub largest_amalgam: usize,
    /// Cases carrying a fixpoint obstruction, whether or not they failed.
    pub obstructed: usize,
    pub failures: Vec<SweepFailure>,
}

impl SweepReport {
    /// Failures that the fixpoint obstruction does not explain.
    pub fn unexplained(&self) -> impl Iterator<Item = &SweepFailure> {
        self.failures.iter().filter(|f| f.obstruction.is_none())
    }
}

/// Runs `amalgamate` and `verify_amalgam` on V-formations built from
/// `members` that lie in `q`: every one with `|A| <= exhaustive_up_to`, plus
/// `random_cases` drawn with replacement from the rest.
pub fn sweep(members: &[FiniteAlgebra], q: Quasivariety, exhaustive_up_to: usize, random_cases: usize, seed: u64) -> Result<SweepReport, AmalgamError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let mut inside = Vec::new();
    for m in members {
        if q.contains(&classify(m)?.class) {
            inside.push(m);
        }
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    for &a in &inside {
        for &b in &inside {
            let into_b = embeddings(a, b);
            if into_b.is_empty() {
                continue;
            }
            for &c in &inside {
                for i in &into_b {
                    for j in embeddings(a, c) {
                        let v = (a, b, c, i.clone(), j);
                        if a.size() <= exhaustive_up_to {
                            small.push(v);
                        } else {
                            large.push(v);
                        }
                    }
                }
            }
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let picked: Vec<_> = match large.is_empty() {
        true => Vec::new(),
        false => (0..random_cases).map(|_| large.choose(&mut rng).expect("nonempty")).collect(),
    };
    let mut report = SweepReport::default();
    for (a, b, c, i, j) in small.iter().chain(picked) {
        let v = VFormation::new((*a).clone(), (*b).clone(), (*c).clone(), i.clone(), j.clone())?;
        report.cases += 1;
        let obstruction = fixpoint_obstruction(&v);
        report.obstructed += usize::from(obstruction.is_some());
        let reason = match amalgamate(&v, q)? {
            AmalgamOutcome::Found(am) => {
                report.largest_amalgam = report.largest_amalgam.max(am.d.size());
                match verify_amalgam(&v, &am.d, &am.h, &am.k, q) {
                    Err(e) => e,
                    Ok(()) if q == Quasivariety::Nbca && am.d.size() > 1 && !am.d.fixpoints().is_empty() => "amalgam has a fixpoint".into(),
                    Ok(()) => continue,
                }
            }
            AmalgamOutcome::Failed(u) => format!("{} and {} of {} not separated", u.x, u.y, u.side),
        };
        report.failures.push(SweepFailure {
            formation: format!("({}, {}, {}, i={:?}, j={:?})", a.name(), b.name(), c.name(), i.map, j.map),
            reason,
            obstruction,
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceExtensionReport {
    /// Blocks of the congruence of B4 generated by `(1, ~a)`.
    pub theta: String,
    pub quotient_is_b2: bool,
    pub quotient_in_nbca: bool,
    pub congruences: usize,
    /// Congruences of B4⊕B2 whose quotient lies in NBCA.
    pub relative_congruences: usize,
    pub relative_containing_pair: usize,
    /// Relative congruences containing `(~a, 1)` other than the total one.
    pub proper_containing_pair: usize,
    pub extension_fails: bool,
}

/// Takes the congruence generated by `(1, ~a)` on B4 inside B4⊕B2 and shows
/// no NBCA-congruence of B4⊕B2 restricts to it.
pub fn congruence_extension_check() -> CongruenceExtensionReport {
    let small = b4();
    let (one, na) = (small.one(), small.element("na").expect("b4 has na"));
    let theta = principal_congruence(&small, one, na);
    let (q, _) = quotient(&small, &theta);
    let quotient_is_b2 = find_isomorphism(&q, &b2()).is_some();
    let in_nbca = |a: &FiniteAlgebra| classify(a).map(|c| Quasivariety::Nbca.contains(&c.class)).unwrap_or(false);
    let quotient_in_nbca = in_nbca(&q);

    let big = b4_plus_b2();
    let (one, na) = (big.one(), big.element("na").expect("b4+b2 has na"));
    let all = all_congruences(&big);
    let relative: Vec<&Congruence> = all.iter().filter(|phi| in_nbca(&quotient(&big, phi).0)).collect();
    let containing: Vec<&&Congruence> = relative.iter().filter(|phi| phi.related(na, one)).collect();
    let proper = containing.iter().filter(|phi| !phi.is_total()).count();
    // B4 sits in B4⊕B2 as its first four elements
    let restricts_to_theta = |phi: &Congruence| (0..4).all(|x| (0..4).all(|y| phi.related(x, y) == theta.related(x, y)));
    let extension_fails = !relative.iter().any(|phi| restricts_to_theta(phi));
    CongruenceExtensionReport {
        theta: theta.describe(&small),
        quotient_is_b2,
        quotient_in_nbca,
        congruences: all.len(),
        relative_congruences: relative.len(),
        relative_containing_pair: containing.len(),
        proper_containing_pair: proper,
        extension_fails,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{direct_product, find_embedding};

    fn inclusion(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Homomorphism {
        embeddings(a, b).into_iter().next().expect("embedding exists")
    }

    fn found(v: &VFormation, q: Quasivariety) -> Amalgam {
        match amalgamate(v, q).unwrap() {
            AmalgamOutcome::Found(am) => {
                verify_amalgam(v, &am.d, &am.h, &am.k, q).unwrap();
                am
            }
            AmalgamOutcome::Failed(u) => panic!("{u:?}"),
        }
    }

    #[test]
    fn degenerate() {
        let w = wke();
        let id = Homomorphism::identity(3);
        let v = VFormation::new(w.clone(), w.clone(), w.clone(), id.clone(), id).unwrap();
        let am = found(&v, Quasivariety::Bca);
        assert!(find_isomorphism(&am.d, &w).is_some());
    }

    #[test]
    fn bca_example() {
        let (two, w) = (b2(), wke());
        let i = inclusion(&two, &w);
        let v = VFormation::new(two, w.clone(), w.clone(), i.clone(), i).unwrap();
        let am = found(&v, Quasivariety::Bca);
        assert!(find_embedding(&am.d, &direct_product(&w, &w)).is_some());
    }

    #[test]
    fn nbca_example() {
        let (two, g) = (b2(), b4_plus_b2());
        let i = inclusion(&two, &g);
        let v = VFormation::new(two, g.clone(), g, i.clone(), i).unwrap();
        let am = found(&v, Quasivariety::Nbca);
        assert!(am.d.fixpoints().is_empty());
    }

    #[test]
    fn rejects_bad_input() {
        let (two, w) = (b2(), wke());
        let i = inclusion(&two, &w);
        let v = VFormation::new(two, w.clone(), w, i.clone(), i).unwrap();
        assert!(matches!(amalgamate(&v, Quasivariety::Nbca), Err(AmalgamError::WrongClass { .. })));
        let not_injective = Homomorphism::new(vec![0, 0]);
        assert!(VFormation::new(b2(), b4(), b4(), not_injective.clone(), not_injective).is_err());
    }

    #[test]
    fn tampering_is_detected() {
        let (two, g) = (b2(), b4_plus_b2());
        let i = inclusion(&two, &g);
        let v = VFormation::new(two.clone(), g.clone(), g, i.clone(), i).unwrap();
        let am = found(&v, Quasivariety::Nbca);
        let mut bad = am.h.clone();
        bad.map.swap(2, 3);
        let err = verify_amalgam(&v, &am.d, &bad, &am.k, Quasivariety::Nbca).unwrap_err();
        assert!(err.contains("not a homomorphism"), "{err}");

        let id = Homomorphism::identity(2);
        let v = VFormation::new(two.clone(), two.clone(), two.clone(), id.clone(), id).unwrap();
        let w = wke();
        let into = inclusion(&two, &w);
        assert_eq!(verify_amalgam(&v, &w, &into, &into, Quasivariety::Nbca).unwrap_err(), "class violation");
        assert!(verify_amalgam(&v, &w, &into, &into, Quasivariety::Bca).is_ok());
        let swapped = Homomorphism::new(vec![1, 0]);
        let v = VFormation::new(two.clone(), two.clone(), two.clone(), Homomorphism::identity(2), swapped);
        assert!(v.is_err());
    }

    #[test]
    fn congruence_extension() {
        let r = congruence_extension_check();
        assert_eq!(r.theta, "{1,na} {0,a}");
        assert!(r.quotient_is_b2 && r.quotient_in_nbca);
        assert_eq!(r.proper_containing_pair, 0);
        assert!(r.relative_containing_pair >= 1);
        assert!(r.extension_fails);
    }
}
