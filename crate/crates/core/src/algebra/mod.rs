//! Finite algebras given by operation tables.

mod builtin;
mod congruence;
mod construct;
mod eval;
mod hom;
mod io;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::term::{BinaryOp, Constant, ParseError, UnaryOp};

pub use builtin::{builtin, builtin_names, b2, b4, b4_plus_b2, boolean_algebra, trivial, wke};
pub use congruence::{all_congruences, principal_congruence, quotient, Congruence};
pub use construct::{direct_product, power_subalgebra, subalgebra_generated, PowerSubalgebra};
pub use eval::{format_valuation, CompiledTerm, Valuation, Verdict};
pub(crate) use eval::for_each_assignment;
pub use hom::{
    enumerate_homomorphisms, find_embedding, find_isomorphism, separates_into, Homomorphism, Separation,
};
pub use io::{parse_algebra, parse_algebra_block, render_algebra};
pub(crate) use io::significant_lines;

/// Carrier index.
pub type Elem = usize;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("invalid algebra: {0}")]
    Invalid(String),
    #[error("variable `{0}` has no value")]
    Unbound(String),
    #[error("algebra `{0}` has no J operations")]
    NoJ(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("unknown built-in algebra `{0}`")]
    UnknownBuiltin(String),
    #[error("signature mismatch: {0}")]
    Signature(String),
    #[error(transparent)]
    Term(#[from] ParseError),
}

/// Which operations a table set provides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    /// `~ | & 0 1` only (fibers of a Płonka sum).
    Boolean,
    /// `J2` given, `J0`/`J1` synthesized from it.
    Reduced,
    /// All three `J` tables given.
    Full,
}

/// A finite algebra of the external signature (or its Boolean reduct).
///
/// Binary tables are stored row-major: `join[x * n + y] = x ∨ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    labels: Vec<String>,
    zero: Elem,
    one: Elem,
    neg: Vec<Elem>,
    join: Vec<Elem>,
    meet: Vec<Elem>,
    j: Option<[Vec<Elem>; 3]>,
    signature: Signature,
}

/// J tables handed to [`FiniteAlgebra::new`].
#[derive(Clone, Debug)]
pub enum JTables {
    None,
    Reduced(Vec<Elem>),
    Full([Vec<Elem>; 3]),
}

impl FiniteAlgebra {
    /// Builds and validates an algebra. Reduced tables get `J0 = J2 ~` and
    /// `J1 = ~(J2 x | J2 ~x)` filled in.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        labels: Vec<String>,
        zero: Elem,
        one: Elem,
        neg: Vec<Elem>,
        join: Vec<Elem>,
        meet: Vec<Elem>,
        j: JTables,
    ) -> Result<Self, AlgebraError> {
        let n = labels.len();
        let bad = |m: String| Err(AlgebraError::Invalid(m));
        if n == 0 {
            return bad("empty carrier".into());
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == '#' || c == '=') {
                return bad(format!("bad element label `{l}`"));
            }
            if labels[..i].contains(l) {
                return bad(format!("duplicate element label `{l}`"));
            }
        }
        if zero >= n || one >= n {
            return bad("constant out of range".into());
        }
        let check_unary = |name: &str, t: &[Elem]| -> Result<(), AlgebraError> {
            if t.len() != n || t.iter().any(|&v| v >= n) {
                return Err(AlgebraError::Invalid(format!("table `{name}` malformed")));
            }
            Ok(())
        };
        check_unary("neg", &neg)?;
        for (name, t) in [("or", &join), ("and", &meet)] {
            if t.len() != n * n || t.iter().any(|&v| v >= n) {
                return bad(format!("table `{name}` malformed"));
            }
        }
        let (j, signature) = match j {
            JTables::None => (None, Signature::Boolean),
            JTables::Reduced(j2) => {
                check_unary("J2", &j2)?;
                let j0: Vec<Elem> = (0..n).map(|x| j2[neg[x]]).collect();
                let j1: Vec<Elem> = (0..n).map(|x| neg[join[j2[x] * n + j2[neg[x]]]]).collect();
                (Some([j0, j1, j2]), Signature::Reduced)
            }
            JTables::Full(tables) => {
                for (k, t) in tables.iter().enumerate() {
                    check_unary(&format!("J{k}"), t)?;
                }
                (Some(tables), Signature::Full)
            }
        };
        Ok(FiniteAlgebra { name: name.into(), labels, zero, one, neg, join, meet, j, signature })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, x: Elem) -> &str {
        &self.labels[x]
    }

    pub fn element(&self, label: &str) -> Result<Elem, AlgebraError> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| AlgebraError::UnknownElement(label.to_string()))
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn has_j(&self) -> bool {
        self.j.is_some()
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn constant(&self, c: Constant) -> Elem {
        match c {
            Constant::Zero => self.zero,
            Constant::One => self.one,
        }
    }

    pub fn neg(&self, x: Elem) -> Elem {
        self.neg[x]
    }

    pub fn join(&self, x: Elem, y: Elem) -> Elem {
        self.join[x * self.size() + y]
    }

    pub fn meet(&self, x: Elem, y: Elem) -> Elem {
        self.meet[x * self.size() + y]
    }

    /// `J_k x`. Panics on a Boolean-signature algebra.
    pub fn jk(&self, k: usize, x: Elem) -> Elem {
        self.j.as_ref().expect("algebra has no J operations")[k][x]
    }

    pub fn unary(&self, op: UnaryOp, x: Elem) -> Elem {
        match op {
            UnaryOp::Neg => self.neg[x],
            UnaryOp::J0 => self.jk(0, x),
            UnaryOp::J1 => self.jk(1, x),
            UnaryOp::J2 => self.jk(2, x),
        }
    }

    pub fn binary(&self, op: BinaryOp, x: Elem, y: Elem) -> Elem {
        match op {
            BinaryOp::And => self.meet(x, y),
            BinaryOp::Or => self.join(x, y),
        }
    }

    pub fn neg_table(&self) -> &[Elem] {
        &self.neg
    }

    pub fn join_table(&self) -> &[Elem] {
        &self.join
    }

    pub fn meet_table(&self) -> &[Elem] {
        &self.meet
    }

    pub fn j_table(&self, k: usize) -> Option<&[Elem]> {
        self.j.as_ref().map(|t| t[k].as_slice())
    }

    /// Unary operations present in this algebra.
    pub fn unary_ops(&self) -> &'static [UnaryOp] {
        if self.has_j() {
            &UnaryOp::ALL
        } else {
            &[UnaryOp::Neg]
        }
    }

    /// The ⟨~, |, &, 0, 1⟩ reduct.
    pub fn boolean_reduct(&self) -> FiniteAlgebra {
        FiniteAlgebra { j: None, signature: Signature::Boolean, ..self.clone() }
    }

    /// Returns a copy with the given J tables replacing the current ones.
    pub fn with_j(&self, j: JTables) -> Result<FiniteAlgebra, AlgebraError> {
        FiniteAlgebra::new(
            self.name.clone(),
            self.labels.clone(),
            self.zero,
            self.one,
            self.neg.clone(),
            self.join.clone(),
            self.meet.clone(),
            j,
        )
    }

    /// Same algebra with a single table entry changed; used for mutation tests.
    /// `table` is one of `neg`, `or`, `and`, `J0`, `J1`, `J2`.
    pub fn with_entry(&self, table: &str, index: usize, value: Elem) -> Result<FiniteAlgebra, AlgebraError> {
        let mut out = self.clone();
        let n = self.size();
        if value >= n {
            return Err(AlgebraError::Invalid("value out of range".into()));
        }
        let slot = match table {
            "neg" => out.neg.get_mut(index),
            "or" => out.join.get_mut(index),
            "and" => out.meet.get_mut(index),
            "J0" | "J1" | "J2" => {
                let k = (table.as_bytes()[1] - b'0') as usize;
                match out.j.as_mut() {
                    Some(t) => t[k].get_mut(index),
                    None => return Err(AlgebraError::NoJ(self.name.clone())),
                }
            }
            _ => return Err(AlgebraError::Invalid(format!("no table `{table}`"))),
        };
        *slot.ok_or_else(|| AlgebraError::Invalid("index out of range".into()))? = value;
        if table == "J2" && out.signature == Signature::Reduced {
            out.signature = Signature::Full;
        }
        Ok(out)
    }

    /// Elements `x` with `~x = x`.
    pub fn fixpoints(&self) -> Vec<Elem> {
        (0..self.size()).filter(|&x| self.neg[x] == x).collect()
    }

    /// Labels keyed by element, for reports.
    pub fn label_map(&self, v: &Valuation) -> BTreeMap<String, String> {
        v.iter().map(|(k, &e)| (k.clone(), self.labels[e].clone())).collect()
    }
}

impl fmt::Display for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_algebra(self))
    }
}
