//! Named algebras available without a file.

use super::{AlgebraError, Elem, FiniteAlgebra, JTables};

pub fn builtin_names() -> &'static [&'static str] {
    &["wke", "b2", "b4", "b4+b2", "trivial"]
}

pub fn builtin(name: &str) -> Result<FiniteAlgebra, AlgebraError> {
    match name {
        "wke" => Ok(wke()),
        "b2" => Ok(b2()),
        "b4" => Ok(b4()),
        "b4+b2" => Ok(b4_plus_b2()),
        "trivial" => Ok(trivial()),
        other => Err(AlgebraError::UnknownBuiltin(other.to_string())),
    }
}

fn labels(ls: &[&str]) -> Vec<String> {
    ls.iter().map(|s| s.to_string()).collect()
}

/// The three-element algebra with the infectious value `H`. Carrier order `1 0 H`.
pub fn wke() -> FiniteAlgebra {
    const ONE: Elem = 0;
    const ZERO: Elem = 1;
    const H: Elem = 2;
    let boolean = |x: Elem| x != H;
    let table = |f: fn(bool, bool) -> bool| -> Vec<Elem> {
        let mut t = Vec::with_capacity(9);
        for x in 0..3 {
            for y in 0..3 {
                t.push(if boolean(x) && boolean(y) {
                    if f(x == ONE, y == ONE) {
                        ONE
                    } else {
                        ZERO
                    }
                } else {
                    H
                });
            }
        }
        t
    };
    FiniteAlgebra::new(
        "wke",
        labels(&["1", "0", "H"]),
        ZERO,
        ONE,
        vec![ZERO, ONE, H],
        table(|a, b| a || b),
        table(|a, b| a && b),
        JTables::Full([vec![ZERO, ONE, ZERO], vec![ZERO, ZERO, ONE], vec![ONE, ZERO, ZERO]]),
    )
    .expect("built-in tables are valid")
}

/// Boolean algebra on the subsets of `atoms` atoms, with `J2 = id`, `J1 = 0`,
/// `J0 = ~`. Elements are listed by `order` (bitmasks), labelled by `names`.
pub(crate) fn boolean_from_masks(
    name: &str,
    atoms: u32,
    order: &[u32],
    names: Vec<String>,
    with_j: bool,
) -> FiniteAlgebra {
    let full = (1u32 << atoms) - 1;
    let n = order.len();
    let index = |m: u32| order.iter().position(|&o| o == m).expect("mask listed");
    let neg: Vec<Elem> = order.iter().map(|&m| index(!m & full)).collect();
    let mut join = Vec::with_capacity(n * n);
    let mut meet = Vec::with_capacity(n * n);
    for &x in order {
        for &y in order {
            join.push(index(x | y));
            meet.push(index(x & y));
        }
    }
    let j = if with_j {
        let zero = index(0);
        JTables::Full([neg.clone(), vec![zero; n], (0..n).collect()])
    } else {
        JTables::None
    };
    FiniteAlgebra::new(name, names, index(0), index(full), neg, join, meet, j).expect("Boolean tables are valid")
}

/// The Boolean algebra with `2^atoms` elements, listed `1`, `0`, then the
/// remaining bitmasks in increasing order (labelled `m<mask>`).
pub fn boolean_algebra(atoms: u32, with_j: bool) -> FiniteAlgebra {
    let full = (1u32 << atoms) - 1;
    let mut order = vec![full];
    if full != 0 {
        order.push(0);
    }
    order.extend((1..full).filter(|&m| m != full));
    let names = order
        .iter()
        .map(|&m| match m {
            m if m == full => "1".to_string(),
            0 => "0".to_string(),
            m => format!("m{m}"),
        })
        .collect();
    boolean_from_masks(&format!("b{}", 1u32 << atoms), atoms, &order, names, with_j)
}

pub fn trivial() -> FiniteAlgebra {
    FiniteAlgebra::new("trivial", labels(&["1"]), 0, 0, vec![0], vec![0], vec![0], JTables::Full([vec![0], vec![0], vec![0]]))
        .expect("trivial tables are valid")
}

/// Two-element Boolean algebra, carrier `1 0`.
pub fn b2() -> FiniteAlgebra {
    boolean_from_masks("b2", 1, &[1, 0], labels(&["1", "0"]), true)
}

/// Four-element Boolean algebra, carrier `1 0 a na`.
pub fn b4() -> FiniteAlgebra {
    boolean_from_masks("b4", 2, &[0b11, 0b00, 0b01, 0b10], labels(&["1", "0", "a", "na"]), true)
}

/// Two fibers: B4 at the bottom and B2 above it, with `a ↦ top`.
/// Carrier `1 0 a na top bot`.
pub fn b4_plus_b2() -> FiniteAlgebra {
    // (fiber, mask); fiber 1 is the image of the projection m ↦ m & 1.
    let elems: [(u8, u32); 6] = [(0, 0b11), (0, 0b00), (0, 0b01), (0, 0b10), (1, 1), (1, 0)];
    let index = |e: (u8, u32)| elems.iter().position(|&x| x == e).unwrap();
    let push = |(f, m): (u8, u32), to: u8| if f == to { m } else { m & 1 };
    let full = |f: u8| if f == 0 { 0b11 } else { 1 };
    let mut join = Vec::new();
    let mut meet = Vec::new();
    for &x in &elems {
        for &y in &elems {
            let k = x.0.max(y.0);
            join.push(index((k, push(x, k) | push(y, k))));
            meet.push(index((k, push(x, k) & push(y, k))));
        }
    }
    let neg = elems.iter().map(|&(f, m)| index((f, !m & full(f)))).collect();
    let j2 = elems.iter().map(|&(f, m)| if f == 0 { index((0, m)) } else { index((0, m & 0b01)) }).collect();
    FiniteAlgebra::new("b4+b2", labels(&["1", "0", "a", "na", "top", "bot"]), 1, 0, neg, join, meet, JTables::Reduced(j2))
        .and_then(|a| a.into_full())
        .expect("built-in tables are valid")
}

impl FiniteAlgebra {
    /// Marks synthesized J0/J1 tables as given.
    pub fn into_full(self) -> Result<FiniteAlgebra, AlgebraError> {
        match self.j.clone() {
            Some(t) => self.with_j(JTables::Full(t)),
            None => Err(AlgebraError::NoJ(self.name.clone())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wke_tables() {
        let a = wke();
        let e = |l| a.element(l).unwrap();
        assert_eq!(a.neg(e("H")), e("H"));
        assert_eq!(a.join(e("1"), e("H")), e("H"));
        assert_eq!(a.meet(e("1"), e("0")), e("0"));
        assert_eq!(a.jk(0, e("H")), e("0"));
        assert_eq!(a.jk(1, e("H")), e("1"));
        assert_eq!(a.jk(2, e("H")), e("0"));
        assert_eq!(a.jk(0, e("0")), e("1"));
        assert_eq!(a.jk(2, e("1")), e("1"));
    }

    #[test]
    fn b4_plus_b2_tables() {
        let a = b4_plus_b2();
        let e = |l| a.element(l).unwrap();
        assert_eq!(a.join(e("a"), e("bot")), e("top"));
        assert_eq!(a.join(e("na"), e("bot")), e("bot"));
        assert_eq!(a.meet(e("1"), e("bot")), e("bot"));
        assert_eq!(a.neg(e("top")), e("bot"));
        assert_eq!(a.jk(2, e("top")), e("a"));
        assert_eq!(a.jk(2, e("bot")), e("0"));
        assert_eq!(a.jk(1, e("top")), e("na"));
        assert_eq!(a.jk(1, e("bot")), e("na"));
        assert_eq!(a.jk(0, e("top")), e("0"));
        assert_eq!(a.jk(0, e("bot")), e("a"));
        for x in ["1", "0", "a", "na"] {
            assert_eq!(a.jk(2, e(x)), e(x));
            assert_eq!(a.jk(1, e(x)), e("0"));
            assert_eq!(a.jk(0, e(x)), a.neg(e(x)));
        }
    }

    #[test]
    fn boolean_sizes() {
        assert_eq!(boolean_algebra(0, true).size(), 1);
        assert_eq!(boolean_algebra(3, true).size(), 8);
        assert_eq!(b4().labels(), &["1", "0", "a", "na"]);
        assert!(builtin("nope").is_err());
    }
}
