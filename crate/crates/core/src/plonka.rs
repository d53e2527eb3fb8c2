//! Płonka sums of Boolean algebras over finite semilattices, the
//! decomposition of finite Bochvar algebras into such sums, and an enumerator
//! of small Bochvar algebras.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    b2, b4, b4_plus_b2, find_isomorphism, parse_algebra, parse_algebra_block, render_algebra, trivial, wke,
    AlgebraError, Elem, FiniteAlgebra, Homomorphism, JTables,
};
use crate::bases::{check_boolean, check_ibsl, Violation};

#[derive(Debug, Error)]
pub enum PlonkaError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("condition `{condition}` fails at index {index}")]
    Condition { condition: String, index: String },
    #[error("not an involutive bisemilattice: {} fails at {}", .0.instance, .0.counterexample)]
    NotIbsl(Violation),
    #[error("{0} negation fixpoints; at most one allowed")]
    Fixpoints(usize),
    #[error("decomposition invariant violated: {0}")]
    Invariant(String),
    #[error("size guard: enumeration is limited to {max} elements, {requested} requested")]
    SizeGuard { max: usize, requested: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("{path}")]
    Io { path: String, source: std::io::Error },
}

/// A semilattice-indexed family of Boolean algebras with transition maps.
#[derive(Clone, Debug)]
pub struct DirectSystem {
    pub name: String,
    pub indices: Vec<String>,
    /// Row-major `k × k` join table over index positions.
    pub join: Vec<usize>,
    pub bottom: usize,
    /// Boolean-signature algebras, one per index.
    pub fibers: Vec<FiniteAlgebra>,
    /// `p_ij` for every `i ≤ j`, identities included.
    pub homs: BTreeMap<(usize, usize), Homomorphism>,
    /// `a_i` in the bottom fiber, one per index, if fixed in advance.
    pub designated: Option<Vec<Elem>>,
}

impl DirectSystem {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn index_join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.len() + j]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.index_join(i, j) == j
    }

    pub fn hom(&self, i: usize, j: usize) -> &Homomorphism {
        &self.homs[&(i, j)]
    }

    /// Checks the semilattice laws, Boolean fibers, homomorphisms and
    /// compatibility. Missing diagonal maps are not allowed here; the file
    /// reader fills them in.
    pub fn validate(&self) -> Result<(), PlonkaError> {
        let k = self.len();
        let bad = |m: String| Err(PlonkaError::InvalidSystem(m));
        if k == 0 {
            return bad("no indices".into());
        }
        if self.join.len() != k * k || self.join.iter().any(|&x| x >= k) {
            return bad("join table malformed".into());
        }
        if self.fibers.len() != k {
            return bad("one fiber per index required".into());
        }
        let name = |i: usize| &self.indices[i];
        for i in 0..k {
            if self.index_join(i, i) != i {
                return bad(format!("join not idempotent at {}", name(i)));
            }
            if self.index_join(self.bottom, i) != i {
                return bad(format!("{} is not below {}", name(self.bottom), name(i)));
            }
            for j in 0..k {
                if self.index_join(i, j) != self.index_join(j, i) {
                    return bad(format!("join not commutative at ({}, {})", name(i), name(j)));
                }
                for l in 0..k {
                    if self.index_join(self.index_join(i, j), l) != self.index_join(i, self.index_join(j, l)) {
                        return bad(format!("join not associative at ({}, {}, {})", name(i), name(j), name(l)));
                    }
                }
            }
        }
        for (i, f) in self.fibers.iter().enumerate() {
            if let Some(v) = check_boolean(&f.boolean_reduct())? {
                return bad(format!("fiber {} is not Boolean: {} fails at {}", name(i), v.instance, v.counterexample));
            }
        }
        for &(i, j) in self.homs.keys() {
            if i >= k || j >= k || !self.leq(i, j) {
                return bad("map between incomparable indices".into());
            }
        }
        for i in 0..k {
            for j in 0..k {
                if !self.leq(i, j) {
                    continue;
                }
                let Some(p) = self.homs.get(&(i, j)) else {
                    return bad(format!("missing map {} -> {}", name(i), name(j)));
                };
                let (a, b) = (self.fibers[i].boolean_reduct(), self.fibers[j].boolean_reduct());
                if let Err(e) = p.check(&a, &b) {
                    return bad(format!("map {} -> {}: {e}", name(i), name(j)));
                }
                if i == j && *p != Homomorphism::identity(a.size()) {
                    return bad(format!("map {} -> {} is not the identity", name(i), name(i)));
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    if self.leq(i, j) && self.leq(j, l) && self.hom(i, j).then(self.hom(j, l)) != *self.hom(i, l) {
                        return bad(format!("maps {} -> {} -> {} not compatible", name(i), name(j), name(l)));
                    }
                }
            }
        }
        if let Some(d) = &self.designated {
            if d.len() != k || d.iter().any(|&x| x >= self.fibers[self.bottom].size()) {
                return bad("designated elements malformed".into());
            }
        }
        Ok(())
    }

    /// `(index, local element)` for every element of the sum, in carrier order.
    pub fn carrier(&self) -> Vec<(usize, Elem)> {
        (0..self.len()).flat_map(|i| (0..self.fibers[i].size()).map(move |x| (i, x))).collect()
    }

    fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut start = 0;
        for f in &self.fibers {
            out.push(start);
            start += f.size();
        }
        out
    }
}

/// The Płonka sum in the Boolean signature: elements are listed fiber by
/// fiber, and operations are computed at the join of the argument indices.
pub fn plonka_sum(s: &DirectSystem) -> Result<FiniteAlgebra, PlonkaError> {
    s.validate()?;
    let carrier = s.carrier();
    let offsets = s.offsets();
    let global = |i: usize, x: Elem| offsets[i] + x;
    let mut labels: Vec<String> = carrier.iter().map(|&(i, x)| s.fibers[i].label(x).to_string()).collect();
    let distinct = labels.iter().collect::<std::collections::BTreeSet<_>>().len() == labels.len();
    if !distinct {
        labels = carrier.iter().map(|&(i, x)| format!("{}@{}", s.fibers[i].label(x), s.indices[i])).collect();
    }
    let neg = carrier.iter().map(|&(i, x)| global(i, s.fibers[i].neg(x))).collect();
    let mut join = Vec::with_capacity(carrier.len() * carrier.len());
    let mut meet = Vec::with_capacity(carrier.len() * carrier.len());
    for &(i, x) in &carrier {
        for &(j, y) in &carrier {
            let k = s.index_join(i, j);
            let (x, y) = (s.hom(i, k).apply(x), s.hom(j, k).apply(y));
            join.push(global(k, s.fibers[k].join(x, y)));
            meet.push(global(k, s.fibers[k].meet(x, y)));
        }
    }
    let b = &s.fibers[s.bottom];
    let zero = global(s.bottom, b.zero());
    let one = global(s.bottom, b.one());
    Ok(FiniteAlgebra::new(s.name.clone(), labels, zero, one, neg, join, meet, JTables::None)?)
}

/// `x ≤ y` in a Boolean algebra.
fn below(b: &FiniteAlgebra, x: Elem, y: Elem) -> bool {
    b.meet(x, y) == x
}

/// Least element of the bottom fiber sent to `1_i`.
fn kernel_generator(s: &DirectSystem, i: usize) -> Elem {
    let b = &s.fibers[s.bottom];
    let p = s.hom(s.bottom, i);
    let top = s.fibers[i].one();
    (0..b.size()).filter(|&x| p.apply(x) == top).fold(b.one(), |acc, x| b.meet(acc, x))
}

/// Whether `p_{i0 i}` maps `[0, a]` bijectively onto fiber `i`.
fn interval_bijective(s: &DirectSystem, i: usize, a: Elem) -> bool {
    let b = &s.fibers[s.bottom];
    let p = s.hom(s.bottom, i);
    let mut hit = vec![false; s.fibers[i].size()];
    for x in (0..b.size()).filter(|&x| below(b, x, a)) {
        if std::mem::replace(&mut hit[p.apply(x)], true) {
            return false;
        }
    }
    hit.into_iter().all(|h| h)
}

/// The designated elements `a_i`, given or computed as the least preimage of
/// `1_i`, after checking the conditions that make `J2` definable.
pub fn designated_elements(s: &DirectSystem) -> Result<Vec<Elem>, PlonkaError> {
    s.validate()?;
    let k = s.len();
    let fail = |condition: &str, i: usize| Err(PlonkaError::Condition { condition: condition.into(), index: s.indices[i].clone() });
    for i in 0..k {
        for j in 0..k {
            if s.leq(i, j) && !s.hom(i, j).is_surjective(s.fibers[j].size()) {
                return fail("surjective transition maps", j);
            }
        }
        if i != s.bottom && s.hom(s.bottom, i).is_injective() {
            return fail("p_{i0 i} not injective", i);
        }
    }
    let a: Vec<Elem> = match &s.designated {
        Some(d) => d.clone(),
        None => (0..k).map(|i| kernel_generator(s, i)).collect(),
    };
    let b = &s.fibers[s.bottom];
    for i in 0..k {
        if s.hom(s.bottom, i).apply(a[i]) != s.fibers[i].one() || !interval_bijective(s, i, a[i]) {
            return fail("[0, a_i] isomorphic to the fiber", i);
        }
        for j in 0..k {
            if i != j && s.leq(i, j) && !(below(b, a[j], a[i]) && a[j] != a[i]) {
                return fail("a_j < a_i for i < j", j);
            }
        }
    }
    if a[s.bottom] != b.one() {
        return fail("a_i0 = 1", s.bottom);
    }
    Ok(a)
}

/// The sum with `J2 x` the unique element of `[0, a_i]` over `x`, and
/// `J0`, `J1` defined from it.
pub fn attach_j(s: &DirectSystem) -> Result<FiniteAlgebra, PlonkaError> {
    let a = designated_elements(s)?;
    let sum = plonka_sum(s)?;
    let offsets = s.offsets();
    let b = &s.fibers[s.bottom];
    let mut j2 = Vec::with_capacity(sum.size());
    for (i, x) in s.carrier() {
        let p = s.hom(s.bottom, i);
        let y = (0..b.size()).find(|&y| below(b, y, a[i]) && p.apply(y) == x).expect("interval map is onto");
        j2.push(offsets[s.bottom] + y);
    }
    Ok(sum.with_j(JTables::Reduced(j2))?.into_full()?)
}

/// A finite Bochvar algebra split into its fibers.
#[derive(Clone, Debug)]
pub struct PlonkaDecomposition {
    pub system: DirectSystem,
    /// Index and local element of every element of the decomposed algebra.
    pub fiber_of: Vec<(usize, Elem)>,
}

impl PlonkaDecomposition {
    /// `a_i = J2(1_i)`, present when the algebra had J operations.
    pub fn designated(&self) -> Option<&[Elem]> {
        self.system.designated.as_deref()
    }

    /// Element of the original algebra for a fiber element.
    pub fn element(&self, i: usize, x: Elem) -> Elem {
        self.fiber_of.iter().position(|&f| f == (i, x)).expect("fiber element exists")
    }
}

/// Splits `a` into fibers by `x ∧ (x ∨ y) = x` and `y ∧ (y ∨ x) = y`.
pub fn decompose(a: &FiniteAlgebra) -> Result<PlonkaDecomposition, PlonkaError> {
    if let Some(v) = check_ibsl(&a.boolean_reduct())? {
        return Err(PlonkaError::NotIbsl(v));
    }
    let fix = a.fixpoints().len();
    if fix > 1 {
        return Err(PlonkaError::Fixpoints(fix));
    }
    let n = a.size();
    let same = |x: Elem, y: Elem| a.meet(x, a.join(x, y)) == x && a.meet(y, a.join(y, x)) == y;
    // bottom fiber first, the rest by least element
    let mut reps: Vec<Elem> = vec![a.zero()];
    let mut class = vec![usize::MAX; n];
    for x in std::iter::once(a.zero()).chain(0..n) {
        if class[x] != usize::MAX {
            continue;
        }
        match reps.iter().position(|&r| same(r, x)) {
            Some(c) => class[x] = c,
            None => {
                class[x] = reps.len();
                reps.push(x);
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if same(x, y) != (class[x] == class[y]) {
                return Err(PlonkaError::Invariant("same-fiber relation is not an equivalence".into()));
            }
        }
    }
    let k = reps.len();
    let members: Vec<Vec<Elem>> = (0..k).map(|c| (0..n).filter(|&x| class[x] == c).collect()).collect();
    let local = |x: Elem| members[class[x]].iter().position(|&y| y == x).unwrap();
    let mut join = Vec::with_capacity(k * k);
    for &r in &reps {
        for &s in &reps {
            join.push(class[a.join(r, s)]);
        }
    }
    // p_ij(x) = x ∧ (x ∨ r_j)
    let push = |x: Elem, j: usize| a.meet(x, a.join(x, reps[j]));
    let mut fibers = Vec::with_capacity(k);
    for (c, elems) in members.iter().enumerate() {
        let inside = |y: Elem| -> Result<Elem, PlonkaError> {
            if class[y] == c {
                Ok(local(y))
            } else {
                Err(PlonkaError::Invariant(format!("fiber {c} is not closed under the operations")))
            }
        };
        let neg = elems.iter().map(|&x| inside(a.neg(x))).collect::<Result<Vec<_>, _>>()?;
        let mut fj = Vec::new();
        let mut fm = Vec::new();
        for &x in elems {
            for &y in elems {
                fj.push(inside(a.join(x, y))?);
                fm.push(inside(a.meet(x, y))?);
            }
        }
        let labels = elems.iter().map(|&x| a.label(x).to_string()).collect();
        let zero = inside(push(a.zero(), c))?;
        let one = inside(push(a.one(), c))?;
        fibers.push(FiniteAlgebra::new(format!("{}[{c}]", a.name()), labels, zero, one, neg, fj, fm, JTables::None)?);
    }
    let mut homs = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if join[i * k + j] == j {
                let map = members[i].iter().map(|&x| local(push(x, j))).collect();
                homs.insert((i, j), Homomorphism::new(map));
            }
        }
    }
    let designated = if a.has_j() {
        let mut d = Vec::with_capacity(k);
        for (i, f) in fibers.iter().enumerate() {
            let top = members[i][f.one()];
            let ai = a.jk(2, top);
            if class[ai] != 0 {
                return Err(PlonkaError::Invariant(format!("J2(1_{i}) lies outside the bottom fiber")));
            }
            d.push(local(ai));
        }
        Some(d)
    } else {
        None
    };
    let system = DirectSystem {
        name: a.name().to_string(),
        indices: (0..k).map(|i| format!("i{i}")).collect(),
        join,
        bottom: 0,
        fibers,
        homs,
        designated,
    };
    system.validate().map_err(|e| PlonkaError::Invariant(e.to_string()))?;
    let fiber_of = (0..n).map(|x| (class[x], local(x))).collect();
    Ok(PlonkaDecomposition { system, fiber_of })
}

/// One condition of the decomposition theorem at one index.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub index: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub checks: Vec<ConditionCheck>,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Checks, per index: surjective maps, non-injective maps out of the bottom,
/// principal kernel filter and interval isomorphism (computed separately and
/// compared), and strictly decreasing designated elements.
pub fn verify_decomposition_conditions(s: &DirectSystem) -> ConditionReport {
    let mut checks = Vec::new();
    let mut push = |condition: &str, i: usize, passed: bool| {
        checks.push(ConditionCheck { condition: condition.into(), index: s.indices[i].clone(), passed })
    };
    let k = s.len();
    let b = &s.fibers[s.bottom];
    for j in 0..k {
        let surjective = (0..k).filter(|&i| s.leq(i, j)).all(|i| s.hom(i, j).is_surjective(s.fibers[j].size()));
        push("surjective transition maps", j, surjective);
        if j != s.bottom {
            push("p_{i0 i} not injective", j, !s.hom(s.bottom, j).is_injective());
        }
        let p = s.hom(s.bottom, j);
        let filter: Vec<Elem> = (0..b.size()).filter(|&x| p.apply(x) == s.fibers[j].one()).collect();
        let generator = kernel_generator(s, j);
        let principal = filter.iter().all(|&x| below(b, generator, x))
            && (0..b.size()).filter(|&x| below(b, generator, x)).count() == filter.len();
        let interval = interval_bijective(s, j, generator);
        push("kernel filter is principal", j, principal);
        push("[0, a_i] isomorphic to the fiber", j, interval);
        push("principal filter iff interval isomorphism", j, principal == interval);
        if let Some(d) = &s.designated {
            push("a_i generates the kernel filter", j, d[j] == generator);
        }
    }
    let a: Vec<Elem> = match &s.designated {
        Some(d) => d.clone(),
        None => (0..k).map(|i| kernel_generator(s, i)).collect(),
    };
    for i in 0..k {
        for j in 0..k {
            if i != j && s.leq(i, j) {
                push("a_j < a_i for i < j", j, below(b, a[j], a[i]) && a[j] != a[i]);
            }
        }
    }
    ConditionReport { checks }
}

/// Laws the J operations obey fiberwise in a Bochvar algebra; returns the
/// failed ones.
pub fn fiber_laws(a: &FiniteAlgebra, d: &PlonkaDecomposition) -> Vec<String> {
    let mut out = Vec::new();
    let s = &d.system;
    let n = a.size();
    let at = |i: usize, x: Elem| d.element(i, x);
    for x in 0..n {
        let (i, _) = d.fiber_of[x];
        for y in 0..n {
            if d.fiber_of[y].0 == i && a.jk(1, x) != a.jk(1, y) {
                out.push(format!("J1 not constant on fiber {}", s.indices[i]));
            }
        }
        if i == s.bottom && a.jk(1, x) != a.zero() {
            out.push(format!("J1 {} is not 0 on the bottom fiber", a.label(x)));
        }
        if a.neg(x) == x && a.jk(1, x) != a.one() {
            out.push(format!("J1 of the fixpoint {} is not 1", a.label(x)));
        }
        let j1 = a.jk(1, x);
        if a.meet(j1, a.join(j1, x)) != a.meet(x, a.neg(x)) {
            out.push(format!("J1 {0} pushed to its fiber is not {0} & ~{0}", a.label(x)));
        }
        let j2 = a.jk(2, x);
        if a.meet(j2, a.join(j2, x)) != x {
            out.push(format!("J2 is not a right inverse at {}", a.label(x)));
        }
    }
    let top = |i: usize| at(i, s.fibers[i].one());
    for i in 0..s.len() {
        for j in 0..s.len() {
            if i == j || !s.leq(i, j) {
                continue;
            }
            let (ai, aj) = (a.jk(2, top(i)), a.jk(2, top(j)));
            if !(a.meet(aj, ai) == aj && aj != ai) {
                out.push(format!("J2 1_{} < J2 1_{} fails", s.indices[j], s.indices[i]));
            }
            if s.hom(i, j).is_injective() {
                out.push(format!("p_{}{} is injective", s.indices[i], s.indices[j]));
            }
            for x in 0..s.fibers[i].size() {
                let e = at(i, x);
                let pushed = at(j, s.hom(i, j).apply(x));
                let (l, r) = (a.jk(2, pushed), a.jk(2, e));
                if a.meet(l, r) != l {
                    out.push(format!("J2 p(x) <= J2 x fails at {}", a.label(e)));
                }
            }
        }
    }
    out.dedup();
    out
}

fn format_err(line: usize, message: impl Into<String>) -> PlonkaError {
    PlonkaError::Format { line, message: message.into() }
}

/// Reads a system file. `fiber <i> file <path>` paths are relative to
/// `base`.
///
/// ```text
/// system wke
/// index i0 i1
/// bottom i0
/// join
/// i0 i1
/// i1 i1
/// fiber i0 inline
/// algebra two
/// ...
/// end
/// fiber i1 file half.alg
/// hom i0 i1 : 1->H 0->H
/// end
/// ```
pub fn parse_system(text: &str, base: Option<&Path>) -> Result<DirectSystem, PlonkaError> {
    let lines = crate::algebra::significant_lines(text);
    let mut it = lines.into_iter().peekable();
    let (line, header) = it.next().ok_or_else(|| format_err(0, "expected `system <name>`"))?;
    let name = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["system", name] => name.to_string(),
        _ => return Err(format_err(line, "expected `system <name>`")),
    };
    let mut indices: Vec<String> = Vec::new();
    let mut bottom = None;
    let mut join: Option<Vec<usize>> = None;
    let mut fibers: BTreeMap<usize, FiniteAlgebra> = BTreeMap::new();
    let mut raw_homs: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut designated: BTreeMap<usize, (usize, String)> = BTreeMap::new();
    let mut last = line;
    loop {
        let (line, text) = it.next().ok_or_else(|| format_err(last, "missing `end`"))?;
        last = line;
        let lookup = |w: &str| {
            indices.iter().position(|i| i == w).ok_or_else(|| format_err(line, format!("unknown index `{w}`")))
        };
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            ["end"] => break,
            ["index", names @ ..] if !names.is_empty() => {
                if !indices.is_empty() {
                    return Err(format_err(line, "indices given twice"));
                }
                indices = names.iter().map(|s| s.to_string()).collect();
                if (1..indices.len()).any(|i| indices[..i].contains(&indices[i])) {
                    return Err(format_err(line, "duplicate index"));
                }
            }
            ["bottom", i] => bottom = Some(lookup(i)?),
            ["join"] => {
                let k = indices.len();
                if k == 0 {
                    return Err(format_err(line, "`join` before `index`"));
                }
                let mut table = Vec::with_capacity(k * k);
                for _ in 0..k {
                    let (line, row) = it.next().ok_or_else(|| format_err(last, "join table truncated"))?;
                    last = line;
                    let row: Vec<&str> = row.split_whitespace().collect();
                    if row.len() != k {
                        return Err(format_err(line, format!("expected {k} entries")));
                    }
                    for w in row {
                        table.push(indices.iter().position(|i| i == w).ok_or_else(|| format_err(line, format!("unknown index `{w}`")))?);
                    }
                }
                join = Some(table);
            }
            ["fiber", i, "inline"] => {
                let i = lookup(i)?;
                let f = parse_algebra_block(&mut it).map_err(|e| match e {
                    AlgebraError::Format { line, message } => format_err(line, message),
                    other => PlonkaError::Algebra(other),
                })?;
                if fibers.insert(i, f).is_some() {
                    return Err(format_err(line, "fiber given twice"));
                }
            }
            ["fiber", i, "file", path] => {
                let i = lookup(i)?;
                let full = base.map_or_else(|| Path::new(path).to_path_buf(), |b| b.join(path));
                let text = std::fs::read_to_string(&full)
                    .map_err(|source| PlonkaError::Io { path: full.display().to_string(), source })?;
                if fibers.insert(i, parse_algebra(&text)?).is_some() {
                    return Err(format_err(line, "fiber given twice"));
                }
            }
            ["hom", i, j, ":", ..] => {
                let map = text.split_once(':').map(|(_, m)| m.trim().to_string()).unwrap_or_default();
                raw_homs.push((line, lookup(i)?, lookup(j)?, map));
            }
            ["designate", i, e] => {
                designated.insert(lookup(i)?, (line, e.to_string()));
            }
            _ => return Err(format_err(line, format!("unexpected `{text}`"))),
        }
    }
    if let Some((line, extra)) = it.next() {
        return Err(format_err(line, format!("trailing content `{extra}`")));
    }
    let k = indices.len();
    let bottom = bottom.ok_or_else(|| format_err(last, "missing `bottom`"))?;
    let join = join.ok_or_else(|| format_err(last, "missing `join`"))?;
    if fibers.len() != k {
        return Err(format_err(last, "every index needs a fiber"));
    }
    let fibers: Vec<FiniteAlgebra> = fibers.into_values().collect();
    let mut homs = BTreeMap::new();
    for (line, i, j, map) in raw_homs {
        let h = Homomorphism::parse(&map, &fibers[i], &fibers[j]).map_err(|m| format_err(line, m))?;
        if homs.insert((i, j), h).is_some() {
            return Err(format_err(line, "map given twice"));
        }
    }
    for (i, f) in fibers.iter().enumerate() {
        homs.entry((i, i)).or_insert_with(|| Homomorphism::identity(f.size()));
    }
    let designated = if designated.is_empty() {
        None
    } else {
        if designated.len() != k {
            return Err(format_err(last, "designate every index or none"));
        }
        let b = &fibers[bottom];
        Some(
            designated
                .into_values()
                .map(|(line, e)| b.element(&e).map_err(|e| format_err(line, e.to_string())))
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    Ok(DirectSystem { name, indices, join, bottom, fibers, homs, designated })
}

/// Writes a system with inline fibers; [`parse_system`] reads it back.
pub fn render_system(s: &DirectSystem) -> String {
    let mut out = format!("system {}\nindex {}\nbottom {}\njoin\n", s.name, s.indices.join(" "), s.indices[s.bottom]);
    let k = s.len();
    for i in 0..k {
        let row: Vec<&str> = (0..k).map(|j| s.indices[s.index_join(i, j)].as_str()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    for (i, f) in s.fibers.iter().enumerate() {
        out.push_str(&format!("fiber {} inline\n", s.indices[i]));
        out.push_str(&render_algebra(f));
    }
    for (&(i, j), h) in &s.homs {
        if i != j {
            out.push_str(&format!("hom {} {} : {}\n", s.indices[i], s.indices[j], h.describe(&s.fibers[i], &s.fibers[j])));
        }
    }
    if let Some(d) = &s.designated {
        for (i, &e) in d.iter().enumerate() {
            out.push_str(&format!("designate {} {}\n", s.indices[i], s.fibers[s.bottom].label(e)));
        }
    }
    out.push_str("end\n");
    out
}

pub const MAX_ENUMERATION_SIZE: usize = 12;

/// Boolean algebra on the masks below `top` (within `atoms` atoms), listed in
/// increasing mask order from `top` downward; labels get `suffix`.
fn interval_algebra(top: u32, suffix: &str, labels: &dyn Fn(u32) -> String) -> (FiniteAlgebra, Vec<u32>) {
    let mut masks: Vec<u32> = (0..=top).filter(|m| m & !top == 0).collect();
    masks.sort_by_key(|&m| (m != top, m != 0, m));
    let index = |m: u32| masks.iter().position(|&x| x == m).unwrap();
    let neg = masks.iter().map(|&m| index(!m & top)).collect();
    let mut join = Vec::new();
    let mut meet = Vec::new();
    for &x in &masks {
        for &y in &masks {
            join.push(index(x | y));
            meet.push(index(x & y));
        }
    }
    let names = masks.iter().map(|&m| format!("{}{suffix}", labels(m))).collect();
    let alg = FiniteAlgebra::new(format!("[0,{}]", labels(top)), names, index(0), index(top), neg, join, meet, JTables::None)
        .expect("interval tables are valid");
    (alg, masks)
}

/// Join-semilattice orders on `points` (bit masks, `points[0]` the full mask
/// and bottom) that only put `i` below `j` when `points[j] ⊂ points[i]`.
/// Returns join tables.
fn semilattice_orders(points: &[u32]) -> Vec<Vec<usize>> {
    let k = points.len();
    let strictly_below = |x: u32, y: u32| x & !y == 0 && x != y;
    let optional: Vec<(usize, usize)> = (1..k)
        .flat_map(|i| (1..k).map(move |j| (i, j)))
        .filter(|&(i, j)| strictly_below(points[j], points[i]))
        .collect();
    let mut out = Vec::new();
    for bits in 0u32..(1 << optional.len()) {
        let mut le = vec![vec![false; k]; k];
        for i in 0..k {
            le[i][i] = true;
            le[0][i] = true;
        }
        for (b, &(i, j)) in optional.iter().enumerate() {
            if bits >> b & 1 == 1 {
                le[i][j] = true;
            }
        }
        let transitive = (0..k).all(|i| (0..k).all(|j| (0..k).all(|l| !(le[i][j] && le[j][l]) || le[i][l])));
        if !transitive {
            continue;
        }
        let mut join = Vec::with_capacity(k * k);
        let mut ok = true;
        'pairs: for i in 0..k {
            for j in 0..k {
                let upper: Vec<usize> = (0..k).filter(|&u| le[i][u] && le[j][u]).collect();
                match upper.iter().find(|&&u| upper.iter().all(|&v| le[u][v])) {
                    Some(&u) => join.push(u),
                    None => {
                        ok = false;
                        break 'pairs;
                    }
                }
            }
        }
        if ok {
            out.push(join);
        }
    }
    out
}

/// A direct system built from a bottom Boolean algebra on `atoms` atoms,
/// designated masks `points` (the first being the full mask) and a join
/// table on them. Fiber `i` is `[0, points[i]]` and every map is `x ↦ x ∧ a_j`.
fn interval_system(atoms: u32, points: &[u32], join: Vec<usize>) -> DirectSystem {
    let full = (1u32 << atoms) - 1;
    let label = |m: u32| match m {
        m if m == full => "1".to_string(),
        0 => "0".to_string(),
        m => format!("m{m}"),
    };
    let k = points.len();
    let parts: Vec<(FiniteAlgebra, Vec<u32>)> = points
        .iter()
        .enumerate()
        .map(|(i, &p)| interval_algebra(p, &if i == 0 { String::new() } else { format!("_{i}") }, &label))
        .collect();
    let mut homs = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if join[i * k + j] == j {
                let target = &parts[j].1;
                let map = parts[i].1.iter().map(|&m| target.iter().position(|&t| t == m & points[j]).unwrap()).collect();
                homs.insert((i, j), Homomorphism::new(map));
            }
        }
    }
    let bottom_masks = &parts[0].1;
    let designated = points.iter().map(|&p| bottom_masks.iter().position(|&m| m == p).unwrap()).collect();
    DirectSystem {
        name: "sum".into(),
        indices: (0..k).map(|i| format!("i{i}")).collect(),
        join,
        bottom: 0,
        fibers: parts.into_iter().map(|(f, _)| f).collect(),
        homs,
        designated: Some(designated),
    }
}

/// Cheap isomorphism invariant used to bucket candidates.
fn shape(a: &FiniteAlgebra) -> (usize, usize, Vec<usize>) {
    let d = decompose(a).expect("enumerated algebras decompose");
    let mut sizes: Vec<usize> = d.system.fibers.iter().map(FiniteAlgebra::size).collect();
    sizes.sort_unstable();
    (a.size(), a.fixpoints().len(), sizes)
}

/// Every Bochvar algebra with at most `max_size` elements, one per
/// isomorphism class, ordered by size. Algebras isomorphic to a built-in get
/// its name, the others are called `bca<size>.<n>`.
pub fn enumerate_bca(max_size: usize) -> Result<Vec<FiniteAlgebra>, PlonkaError> {
    if max_size > MAX_ENUMERATION_SIZE {
        return Err(PlonkaError::SizeGuard { max: MAX_ENUMERATION_SIZE, requested: max_size });
    }
    let mut found: Vec<FiniteAlgebra> = Vec::new();
    if max_size >= 1 {
        found.push(trivial());
    }
    let mut atoms = 1;
    while (1usize << atoms) <= max_size {
        let full = (1u32 << atoms) - 1;
        let budget = max_size - (1usize << atoms);
        // designated masks below the top, chosen as sets within the size budget
        let candidates: Vec<u32> = (0..full).collect();
        let mut subsets: Vec<Vec<u32>> = vec![vec![]];
        for &m in &candidates {
            let cost = 1usize << m.count_ones();
            let extended: Vec<Vec<u32>> = subsets
                .iter()
                .filter(|s| s.iter().map(|&x| 1usize << x.count_ones()).sum::<usize>() + cost <= budget)
                .map(|s| {
                    let mut t = s.clone();
                    t.push(m);
                    t
                })
                .collect();
            subsets.extend(extended);
        }
        for rest in subsets {
            let points: Vec<u32> = std::iter::once(full).chain(rest).collect();
            for join in semilattice_orders(&points) {
                let system = interval_system(atoms, &points, join);
                let alg = attach_j(&system)?;
                if !found.iter().any(|f| f.size() == alg.size() && find_isomorphism(f, &alg).is_some()) {
                    found.push(alg);
                }
            }
        }
        atoms += 1;
    }
    let known = [trivial(), b2(), wke(), b4(), b4_plus_b2()];
    found.sort_by_cached_key(shape);
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let named = found
        .into_iter()
        .map(|a| match known.iter().find(|k| k.size() == a.size() && find_isomorphism(k, &a).is_some()) {
            Some(k) => a.with_name(k.name()),
            None => {
                let c = counts.entry(a.size()).or_default();
                *c += 1;
                let name = format!("bca{}.{}", a.size(), c);
                a.with_name(name)
            }
        })
        .collect();
    Ok(named)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{direct_product, power_subalgebra};
    use crate::bases::membership;

    fn wke_system() -> DirectSystem {
        let text = "\
system wke
index i0 i1
bottom i0
join
i0 i1
i1 i1
fiber i0 inline
algebra two
elements 1 0
const 0 0
const 1 1
op neg 0 1
op or
1 1
1 0
op and
1 0
0 0
end
fiber i1 inline
algebra half
elements H
const 0 H
const 1 H
op neg H
op or
H
op and
H
end
hom i0 i1 : 1->H 0->H
end
";
        parse_system(text, None).unwrap()
    }

    fn figure_two_system() -> DirectSystem {
        let b4 = b4().boolean_reduct();
        let two = FiniteAlgebra::new("two", vec!["top".into(), "bot".into()], 1, 0, vec![1, 0], vec![0, 0, 0, 1], vec![0, 1, 1, 1], JTables::None).unwrap();
        let p = Homomorphism::parse("1->top 0->bot a->top na->bot", &b4, &two).unwrap();
        let mut homs = BTreeMap::new();
        homs.insert((0, 0), Homomorphism::identity(4));
        homs.insert((1, 1), Homomorphism::identity(2));
        homs.insert((0, 1), p);
        DirectSystem { name: "fig2".into(), indices: vec!["i0".into(), "i1".into()], join: vec![0, 1, 1, 1], bottom: 0, fibers: vec![b4, two], homs, designated: None }
    }

    #[test]
    fn wke_from_its_system() {
        let s = wke_system();
        let sum = plonka_sum(&s).unwrap();
        assert_eq!(sum, wke().boolean_reduct().with_name("wke"));
        let full = attach_j(&s).unwrap();
        let w = wke();
        for k in 0..3 {
            assert_eq!(full.j_table(k), w.j_table(k));
        }
        assert_eq!(parse_system(&render_system(&s), None).unwrap().fibers, s.fibers);
    }

    #[test]
    fn figure_two_sum() {
        let s = figure_two_system();
        let sum = plonka_sum(&s).unwrap();
        let (a, bot, top) = (sum.element("a").unwrap(), sum.element("bot").unwrap(), sum.element("top").unwrap());
        assert_eq!(sum.join(a, bot), top);
        let full = attach_j(&s).unwrap();
        assert_eq!(full.jk(2, top), a);
        assert_eq!(full.jk(1, top), full.element("na").unwrap());
        assert_eq!(full.jk(1, bot), full.element("na").unwrap());
        assert_eq!(full.jk(0, top), full.zero());
        assert!(find_isomorphism(&full, &b4_plus_b2()).is_some());
        assert!(membership(&full).unwrap().is_member() == Some(true));
    }

    #[test]
    fn single_fiber() {
        let b = b2().boolean_reduct();
        let mut homs = BTreeMap::new();
        homs.insert((0, 0), Homomorphism::identity(2));
        let s = DirectSystem { name: "b".into(), indices: vec!["i".into()], join: vec![0], bottom: 0, fibers: vec![b.clone()], homs, designated: None };
        assert_eq!(plonka_sum(&s).unwrap(), b.with_name("b"));
        let full = attach_j(&s).unwrap();
        assert_eq!(full.j_table(2), Some(&[0, 1][..]));
        assert_eq!(full.j_table(1), Some(&[1, 1][..]));
        assert_eq!(full.j_table(0), Some(&[1, 0][..]));
    }

    #[test]
    fn invalid_systems() {
        let mut s = figure_two_system();
        s.homs.insert((0, 1), Homomorphism::new(vec![0, 0, 0, 0]));
        assert!(matches!(plonka_sum(&s), Err(PlonkaError::InvalidSystem(_))));
        // an isomorphic copy above the bottom
        let b = b2().boolean_reduct();
        let copy = b.clone().with_name("copy");
        let mut homs = BTreeMap::new();
        homs.insert((0, 0), Homomorphism::identity(2));
        homs.insert((1, 1), Homomorphism::identity(2));
        homs.insert((0, 1), Homomorphism::identity(2));
        let s = DirectSystem { name: "c".into(), indices: vec!["i0".into(), "i1".into()], join: vec![0, 1, 1, 1], bottom: 0, fibers: vec![b, copy], homs, designated: None };
        assert!(plonka_sum(&s).is_ok());
        match attach_j(&s) {
            Err(PlonkaError::Condition { condition, index }) => {
                assert_eq!(condition, "p_{i0 i} not injective");
                assert_eq!(index, "i1");
            }
            other => panic!("{other:?}"),
        }
        let report = verify_decomposition_conditions(&s);
        assert!(report.failures().iter().any(|c| c.condition == "p_{i0 i} not injective"));
    }

    #[test]
    fn decompositions() {
        let d = decompose(&wke()).unwrap();
        assert_eq!(d.system.len(), 2);
        assert_eq!(d.system.fibers[0].labels(), &["1", "0"]);
        assert_eq!(d.system.fibers[1].labels(), &["H"]);
        assert_eq!(d.designated(), Some(&[0, 1][..]));
        assert!(verify_decomposition_conditions(&d.system).passed());

        let a = b4_plus_b2();
        let d = decompose(&a).unwrap();
        assert_eq!(d.system.fibers[0].labels(), &["1", "0", "a", "na"]);
        assert_eq!(d.system.fibers[1].labels(), &["top", "bot"]);
        let ai = d.designated().unwrap()[1];
        assert_eq!(d.system.fibers[0].label(ai), "a");
        assert!(verify_decomposition_conditions(&d.system).passed());

        assert_eq!(decompose(&b4()).unwrap().system.len(), 1);
    }

    #[test]
    fn decompose_rejects_non_members() {
        let w = wke();
        let h = w.element("H").unwrap();
        let bad = w.with_entry("or", w.one() * 3 + h, w.one()).unwrap();
        assert!(matches!(decompose(&bad), Err(PlonkaError::NotIbsl(_))));
        let double = direct_product(&wke(), &wke());
        // (H,H) is the only fixpoint; a product of WK^e with itself still decomposes
        assert!(decompose(&double).is_ok());
    }

    #[test]
    fn enumeration_small_sizes() {
        let names = |n| enumerate_bca(n).unwrap().iter().map(|a| a.name().to_string()).collect::<Vec<_>>();
        assert_eq!(names(3), ["trivial", "b2", "wke"]);
        assert_eq!(names(4), ["trivial", "b2", "wke", "b4"]);
        let six = enumerate_bca(6).unwrap();
        let bb = six.iter().find(|a| a.name() == "b4+b2").unwrap();
        assert!(find_isomorphism(bb, &direct_product(&wke(), &b2())).is_some());
        assert!(matches!(enumerate_bca(13), Err(PlonkaError::SizeGuard { .. })));
    }

    #[test]
    fn enumerated_algebras_are_members() {
        for a in enumerate_bca(8).unwrap() {
            assert_eq!(membership(&a).unwrap().is_member(), Some(true), "{}", a.name());
        }
    }

    /// Subalgebras of small powers of WK^e all show up in the enumeration.
    #[test]
    fn enumeration_covers_power_subalgebras() {
        let limit = 8;
        let all = enumerate_bca(limit).unwrap();
        let w = wke();
        for width in 1..=3usize {
            let tuples: Vec<Vec<Elem>> = (0..3usize.pow(width as u32))
                .map(|mut c| {
                    (0..width)
                        .map(|_| {
                            let d = c % 3;
                            c /= 3;
                            d
                        })
                        .collect()
                })
                .collect();
            for (i, s) in tuples.iter().enumerate() {
                for t in &tuples[i..] {
                    let sub = power_subalgebra(&w, &[s.clone(), t.clone()], "sub").algebra;
                    if sub.size() <= limit {
                        assert!(all.iter().any(|a| find_isomorphism(a, &sub).is_some()), "{}", render_algebra(&sub));
                    }
                }
            }
        }
    }

    #[test]
    fn roundtrip_and_laws() {
        for a in enumerate_bca(8).unwrap() {
            let d = decompose(&a).unwrap();
            assert!(verify_decomposition_conditions(&d.system).passed(), "{}", a.name());
            let back = attach_j(&d.system).unwrap();
            assert!(find_isomorphism(&back, &a).is_some(), "{}", a.name());
            assert_eq!(fiber_laws(&a, &d), Vec::<String>::new(), "{}", a.name());
        }
    }
}
