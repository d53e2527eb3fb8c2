//! Line-based algebra files.
//!
//! ```text
//! algebra wke
//! elements 1 0 H
//! const 0 0
//! const 1 1
//! op neg 0 1 H
//! op J2 1 0 0          # J0 / J1 optional; absent means derived from J2
//! op or
//! 1 1 H
//! 1 0 H
//! H H H
//! op and
//! ...
//! end
//! ```

use std::collections::HashMap;

use super::{AlgebraError, Elem, FiniteAlgebra, JTables, Signature};

fn err(line: usize, message: impl Into<String>) -> AlgebraError {
    AlgebraError::Format { line, message: message.into() }
}

/// Numbered, comment-stripped, non-blank lines of `text`.
pub(crate) fn significant_lines(text: &str) -> Vec<(usize, String)> {
    text.lines()
        .enumerate()
        .filter_map(|(i, l)| {
            let l = l.split('#').next().unwrap_or("").trim();
            (!l.is_empty()).then(|| (i + 1, l.to_string()))
        })
        .collect()
}

/// Parses a complete algebra file.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra, AlgebraError> {
    let lines = significant_lines(text);
    let mut it = lines.into_iter().peekable();
    let a = parse_algebra_block(&mut it)?;
    if let Some((line, l)) = it.next() {
        return Err(err(line, format!("trailing content `{l}`")));
    }
    Ok(a)
}

/// Parses one `algebra ... end` block from a line stream, leaving the rest.
pub fn parse_algebra_block(
    lines: &mut impl Iterator<Item = (usize, String)>,
) -> Result<FiniteAlgebra, AlgebraError> {
    let (line, header) = lines.next().ok_or_else(|| err(0, "expected `algebra <name>`"))?;
    let name = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["algebra", name] => name.to_string(),
        _ => return Err(err(line, "expected `algebra <name>`")),
    };
    let (line, elems) = lines.next().ok_or_else(|| err(line, "expected `elements ...`"))?;
    let mut words = elems.split_whitespace();
    if words.next() != Some("elements") {
        return Err(err(line, "expected `elements ...`"));
    }
    let labels: Vec<String> = words.map(str::to_string).collect();
    if labels.is_empty() {
        return Err(err(line, "empty carrier"));
    }
    let n = labels.len();
    let index: HashMap<&str, Elem> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let lookup = |line: usize, w: &str| -> Result<Elem, AlgebraError> {
        index.get(w).copied().ok_or_else(|| err(line, format!("unknown element `{w}`")))
    };
    let row = |line: usize, words: &[&str]| -> Result<Vec<Elem>, AlgebraError> {
        if words.len() != n {
            return Err(err(line, format!("expected {n} entries, found {}", words.len())));
        }
        words.iter().map(|w| lookup(line, w)).collect()
    };

    let mut zero = None;
    let mut one = None;
    let mut unary: HashMap<String, Vec<Elem>> = HashMap::new();
    let mut binary: HashMap<String, Vec<Elem>> = HashMap::new();
    let mut last = line;
    loop {
        let (line, text) = lines.next().ok_or_else(|| err(last, "missing `end`"))?;
        last = line;
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            ["end"] => break,
            ["const", c, e] => {
                let e = lookup(line, e)?;
                match *c {
                    "0" => zero = Some(e),
                    "1" => one = Some(e),
                    _ => return Err(err(line, format!("unknown constant `{c}`"))),
                }
            }
            ["op", op @ ("or" | "and")] => {
                let mut table = Vec::with_capacity(n * n);
                for _ in 0..n {
                    let (line, text) = lines.next().ok_or_else(|| err(last, format!("table `{op}` truncated")))?;
                    last = line;
                    let words: Vec<&str> = text.split_whitespace().collect();
                    table.extend(row(line, &words)?);
                }
                if binary.insert(op.to_string(), table).is_some() {
                    return Err(err(line, format!("table `{op}` given twice")));
                }
            }
            ["op", op, rest @ ..] if matches!(*op, "neg" | "J0" | "J1" | "J2") => {
                if unary.insert(op.to_string(), row(line, rest)?).is_some() {
                    return Err(err(line, format!("table `{op}` given twice")));
                }
            }
            ["op", op, ..] => return Err(err(line, format!("unknown operation `{op}`"))),
            _ => return Err(err(line, format!("unexpected `{text}`"))),
        }
    }
    let zero = zero.ok_or_else(|| err(last, "missing `const 0`"))?;
    let one = one.ok_or_else(|| err(last, "missing `const 1`"))?;
    let neg = unary.remove("neg").ok_or_else(|| err(last, "missing `op neg`"))?;
    let join = binary.remove("or").ok_or_else(|| err(last, "missing `op or`"))?;
    let meet = binary.remove("and").ok_or_else(|| err(last, "missing `op and`"))?;
    let j = match (unary.remove("J0"), unary.remove("J1"), unary.remove("J2")) {
        (None, None, None) => JTables::None,
        (None, None, Some(j2)) => JTables::Reduced(j2),
        (Some(j0), Some(j1), Some(j2)) => JTables::Full([j0, j1, j2]),
        _ => return Err(err(last, "J0 and J1 must be given together with J2")),
    };
    FiniteAlgebra::new(name, labels, zero, one, neg, join, meet, j)
}

/// Renders in the file format; [`parse_algebra`] reads it back unchanged.
pub fn render_algebra(a: &FiniteAlgebra) -> String {
    let n = a.size();
    let l = |x: Elem| a.label(x);
    let row = |t: &[Elem]| t.iter().map(|&x| l(x)).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    out.push_str(&format!("algebra {}\n", a.name()));
    out.push_str(&format!("elements {}\n", a.labels().join(" ")));
    out.push_str(&format!("const 0 {}\n", l(a.zero())));
    out.push_str(&format!("const 1 {}\n", l(a.one())));
    out.push_str(&format!("op neg {}\n", row(a.neg_table())));
    match a.signature() {
        Signature::Boolean => {}
        Signature::Reduced => out.push_str(&format!("op J2 {}\n", row(a.j_table(2).unwrap()))),
        Signature::Full => {
            for k in 0..3 {
                out.push_str(&format!("op J{k} {}\n", row(a.j_table(k).unwrap())));
            }
        }
    }
    for (name, t) in [("or", a.join_table()), ("and", a.meet_table())] {
        out.push_str(&format!("op {name}\n"));
        for x in 0..n {
            out.push_str(&row(&t[x * n..(x + 1) * n]));
            out.push('\n');
        }
    }
    out.push_str("end\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{b4_plus_b2, wke};

    #[test]
    fn roundtrip_builtins() {
        for a in [wke(), b4_plus_b2(), wke().boolean_reduct()] {
            let text = render_algebra(&a);
            assert_eq!(parse_algebra(&text).unwrap(), a);
        }
    }

    #[test]
    fn reduced_signature_synthesizes_j() {
        let text = "\
algebra w   # comment
elements 1 0 H
const 0 0
const 1 1
op neg 0 1 H
op J2 1 0 0
op or
1 1 H
1 0 H
H H H
op and
1 0 H
0 0 H
H H H
end
";
        let a = parse_algebra(text).unwrap();
        assert_eq!(a.signature(), Signature::Reduced);
        assert_eq!(a.j_table(0), wke().j_table(0));
        assert_eq!(a.j_table(1), wke().j_table(1));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_algebra("algebra x\nelements 1\nend\n"), Err(AlgebraError::Format { .. })));
        let bad = "algebra x\nelements 1 0\nconst 0 0\nconst 1 1\nop neg 0 q\nend\n";
        match parse_algebra(bad) {
            Err(AlgebraError::Format { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        let only_j0 = render_algebra(&wke()).replace("op J1 0 0 1\n", "").replace("op J2 1 0 0\n", "");
        assert!(parse_algebra(&only_j0).is_err());
    }
}
