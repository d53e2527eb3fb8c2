//! Proof checking for the Hilbert calculus of external logic: axiom schemas
//! A1 to A29 and modus ponens.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{format_valuation, Verdict};
use crate::matrix::LogicalMatrix;
use crate::term::{expand_equiv, is_external, parse_term, render_term, standard_variables, substitute, terms_up_to, ParseError, Substitution, Term};

/// Metavariables ranging over external formulas only.
const EXTERNAL_SLOTS: [&str; 3] = ["alpha", "beta", "gamma"];

fn symbol(meta: &str) -> &str {
    match meta {
        "phi" => "φ",
        "psi" => "ψ",
        "chi" => "χ",
        "alpha" => "α",
        "beta" => "β",
        "gamma" => "γ",
        other => other,
    }
}

/// An axiom schema. Indexed schemas (A12 to A16) have one pattern per index
/// choice; equivalences are stored already expanded.
#[derive(Clone, Debug)]
pub struct Schema {
    pub id: String,
    pub patterns: Vec<Term>,
}

impl Schema {
    /// Metavariables of the first pattern, all patterns share them.
    pub fn metavariables(&self) -> Vec<String> {
        self.patterns[0].variables().into_iter().collect()
    }
}

fn pattern(s: &str) -> Term {
    parse_term(s).unwrap_or_else(|e| panic!("schema `{s}`: {e}"))
}

fn equiv(lhs: &str, rhs: &str) -> Term {
    expand_equiv(&pattern(lhs), &pattern(rhs))
}

fn schema(id: usize, patterns: Vec<Term>) -> Schema {
    Schema { id: format!("A{id}"), patterns }
}

/// The 29 schemas in order.
pub fn schemas() -> Vec<Schema> {
    let single = |id, l: &str, r: &str| schema(id, vec![equiv(l, r)]);
    let mut out = vec![
        single(1, "phi | phi", "phi"),
        single(2, "phi | psi", "psi | phi"),
        single(3, "(phi | psi) | chi", "phi | (psi | chi)"),
        single(4, "phi & (psi | chi)", "(phi & psi) | (phi & chi)"),
        single(5, "~~phi", "phi"),
        single(6, "~1", "0"),
        single(7, "~(phi | psi)", "~phi & ~psi"),
        single(8, "0 | phi", "phi"),
        single(9, "J2 alpha", "alpha"),
        single(10, "J0 alpha", "~alpha"),
        single(11, "J1 alpha", "0"),
    ];
    out.push(schema(12, (0..3).map(|i| equiv(&format!("J{i} ~phi"), &format!("J{} phi", 2 - i))).collect()));
    let mut perms = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if i != j && j != k && i != k {
                    perms.push(equiv(&format!("J{i} phi"), &format!("~(J{j} phi | J{k} phi)")));
                }
            }
        }
    }
    out.push(schema(13, perms));
    out.push(schema(14, (0..3).map(|i| equiv(&format!("J{i} phi | ~J{i} phi"), "1")).collect()));
    let mut pairs = Vec::new();
    for i in 0..3 {
        for k in 0..3 {
            pairs.push(equiv(&format!("(J{i} phi | J{k} psi) & J{i} phi"), &format!("J{i} phi")));
        }
    }
    out.push(schema(15, pairs));
    out.push(schema(16, [1, 2].iter().map(|i| equiv(&format!("phi | J{i} phi"), "phi")).collect()));
    out.push(single(17, "J0(phi | psi)", "J0 phi & J0 psi"));
    out.push(single(18, "J2(phi | psi)", "(J2 phi & J2 psi) | (J2 phi & J2 ~psi) | (J2 ~phi & J2 psi)"));
    let classical = [
        "alpha -> (beta -> alpha)",
        "(alpha -> (beta -> gamma)) -> ((alpha -> beta) -> (alpha -> gamma))",
        "alpha & beta -> alpha",
        "alpha & beta -> beta",
        "(alpha -> beta) -> ((alpha -> gamma) -> (alpha -> beta & gamma))",
        "alpha -> alpha | beta",
        "beta -> alpha | beta",
        "(alpha -> gamma) -> ((beta -> gamma) -> (alpha | beta -> gamma))",
        "(alpha -> beta) -> ((alpha -> ~beta) -> ~alpha)",
        "alpha -> (~alpha -> beta)",
        "~~alpha -> alpha",
    ];
    for (n, p) in classical.iter().enumerate() {
        out.push(schema(19 + n, vec![pattern(p)]));
    }
    out
}

pub fn find_schema(id: &str) -> Option<Schema> {
    schemas().into_iter().find(|s| s.id.eq_ignore_ascii_case(id))
}

/// Why a formula is not an instance of a schema.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Mismatch {
    UnknownSchema(String),
    Shape,
    /// A metavariable restricted to external formulas got something else.
    NotExternal(String),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::UnknownSchema(id) => write!(f, "unknown schema {id}"),
            Mismatch::Shape => f.write_str("formula does not have the shape of the schema"),
            Mismatch::NotExternal(m) => write!(f, "{} not external", symbol(m)),
        }
    }
}

fn bind(pattern: &Term, t: &Term, sigma: &mut Substitution) -> bool {
    match (pattern, t) {
        (Term::Var(m), _) => match sigma.get(m) {
            Some(bound) => bound == t,
            None => {
                sigma.insert(m.clone(), t.clone());
                true
            }
        },
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Unary(p, ps), Term::Unary(q, ts)) => p == q && bind(ps, ts, sigma),
        (Term::Binary(p, pl, pr), Term::Binary(q, tl, tr)) => p == q && bind(pl, tl, sigma) && bind(pr, tr, sigma),
        _ => false,
    }
}

/// Matches `phi` against each pattern of `schema` in turn. A structural match
/// whose external slots get non-external terms is reported as such if no
/// other pattern fits.
pub fn match_schema(schema: &Schema, phi: &Term) -> Result<Substitution, Mismatch> {
    let mut guard_failure = None;
    for p in &schema.patterns {
        let mut sigma = Substitution::new();
        if !bind(p, phi, &mut sigma) {
            continue;
        }
        match EXTERNAL_SLOTS.iter().find(|m| sigma.get(**m).is_some_and(|t| !is_external(t))) {
            Some(m) => guard_failure = guard_failure.or(Some(Mismatch::NotExternal(m.to_string()))),
            None => return Ok(sigma),
        }
    }
    Err(guard_failure.unwrap_or(Mismatch::Shape))
}

pub fn match_schema_id(id: &str, phi: &Term) -> Result<Substitution, Mismatch> {
    match find_schema(id) {
        Some(s) => match_schema(&s, phi),
        None => Err(Mismatch::UnknownSchema(id.to_string())),
    }
}

/// `{α↦J2(x), β↦J0(y)}`.
pub fn describe_substitution(sigma: &Substitution) -> String {
    let parts: Vec<String> = sigma.iter().map(|(m, t)| format!("{}↦{}", symbol(m), render_term(t))).collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    Axiom(String),
    /// Zero-based index into the hypotheses.
    Hypothesis(usize),
    /// Zero-based step indices of the minor and major premise.
    ModusPonens(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub justification: Justification,
    pub formula: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub name: String,
    pub hypotheses: Vec<Term>,
    pub steps: Vec<Step>,
}

impl Derivation {
    /// The last formula, if any.
    pub fn conclusion(&self) -> Option<&Term> {
        self.steps.last().map(|s| &s.formula)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum DerivationVerdict {
    Valid { conclusion: String },
    Invalid { step: usize, reason: String },
}

impl DerivationVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, DerivationVerdict::Valid { .. })
    }
}

impl fmt::Display for DerivationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationVerdict::Valid { conclusion } => write!(f, "valid: {conclusion}"),
            DerivationVerdict::Invalid { step, reason } => write!(f, "invalid at step {step}: {reason}"),
        }
    }
}

/// Step numbers in verdicts are one-based, as in the file format.
pub fn check_derivation(d: &Derivation) -> DerivationVerdict {
    let invalid = |i: usize, reason: String| DerivationVerdict::Invalid { step: i + 1, reason };
    if d.steps.is_empty() {
        return invalid(0, "empty derivation".into());
    }
    for (i, step) in d.steps.iter().enumerate() {
        match &step.justification {
            Justification::Axiom(id) => {
                if let Err(m) = match_schema_id(id, &step.formula) {
                    return invalid(i, format!("{id}: {m}"));
                }
            }
            Justification::Hypothesis(h) => match d.hypotheses.get(*h) {
                None => return invalid(i, format!("no hypothesis {}", h + 1)),
                Some(t) if *t != step.formula => return invalid(i, format!("formula differs from hypothesis {}", h + 1)),
                Some(_) => {}
            },
            &Justification::ModusPonens(minor, major) => {
                if minor >= i || major >= i {
                    return invalid(i, "modus ponens cites a later step".into());
                }
                let expected = Term::implies(d.steps[minor].formula.clone(), step.formula.clone());
                if d.steps[major].formula != expected {
                    return invalid(i, "major premise shape mismatch".into());
                }
            }
        }
    }
    DerivationVerdict::Valid { conclusion: render_term(d.conclusion().expect("nonempty")) }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DerivationFormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Term { line: usize, source: ParseError },
}

/// Reads every `derive ... end` block of a derivation file.
///
/// ```text
/// derive identity
/// hyp J2 x
/// 1 hyp 1 : J2 x
/// 2 axiom A19 : J2 x -> (J2 y -> J2 x)
/// 3 mp 1 2 : J2 y -> J2 x
/// end
/// ```
pub fn parse_derivations(text: &str) -> Result<Vec<Derivation>, DerivationFormatError> {
    let mut out = Vec::new();
    let mut current: Option<Derivation> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let syntax = |message: String| DerivationFormatError::Syntax { line, message };
        let term = |s: &str| parse_term(s).map_err(|source| DerivationFormatError::Term { line, source });
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        match (head, current.as_mut()) {
            ("derive", None) => {
                if rest.is_empty() {
                    return Err(syntax("derivation needs a name".into()));
                }
                current = Some(Derivation { name: rest.to_string(), hypotheses: Vec::new(), steps: Vec::new() });
            }
            ("derive", Some(_)) => return Err(syntax("`derive` inside a derivation".into())),
            ("end", Some(_)) => out.push(current.take().expect("inside a derivation")),
            (_, None) => return Err(syntax(format!("expected `derive`, found `{head}`"))),
            ("hyp", Some(d)) => {
                if !d.steps.is_empty() {
                    return Err(syntax("hypotheses must precede the steps".into()));
                }
                d.hypotheses.push(term(rest)?);
            }
            (number, Some(d)) => {
                let expected = d.steps.len() + 1;
                if number.parse::<usize>().ok() != Some(expected) {
                    return Err(syntax(format!("expected step {expected}, found `{number}`")));
                }
                let (just, formula) =
                    rest.split_once(':').ok_or_else(|| syntax("step needs `: <formula>`".into()))?;
                let words: Vec<&str> = just.split_whitespace().collect();
                let index = |s: &str| match s.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(syntax(format!("bad index `{s}`"))),
                };
                let justification = match words.as_slice() {
                    ["axiom", id] => Justification::Axiom(id.to_string()),
                    ["hyp", h] => Justification::Hypothesis(index(h)?),
                    ["mp", i, j] => Justification::ModusPonens(index(i)?, index(j)?),
                    _ => return Err(syntax(format!("bad justification `{}`", just.trim()))),
                };
                d.steps.push(Step { justification, formula: term(formula)? });
            }
        }
    }
    match current {
        Some(d) => Err(DerivationFormatError::Syntax { line: text.lines().count(), message: format!("derivation `{}` has no `end`", d.name) }),
        None => Ok(out),
    }
}

pub fn render_derivation(d: &Derivation) -> String {
    let mut out = format!("derive {}\n", d.name);
    for h in &d.hypotheses {
        out.push_str(&format!("hyp {}\n", render_term(h)));
    }
    for (i, s) in d.steps.iter().enumerate() {
        let just = match &s.justification {
            Justification::Axiom(id) => format!("axiom {id}"),
            Justification::Hypothesis(h) => format!("hyp {}", h + 1),
            Justification::ModusPonens(a, b) => format!("mp {} {}", a + 1, b + 1),
        };
        out.push_str(&format!("{} {} : {}\n", i + 1, just, render_term(&s.formula)));
    }
    out.push_str("end\n");
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessViolation {
    pub schema: String,
    pub formula: String,
    pub counterexample: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SoundnessReport {
    pub depth: usize,
    pub variables: usize,
    pub seed: u64,
    /// Instances generated per schema, in schema order.
    pub instances: Vec<(String, usize)>,
    pub violations: Vec<SoundnessViolation>,
}

impl SoundnessReport {
    pub fn total(&self) -> usize {
        self.instances.iter().map(|(_, n)| n).sum()
    }
}

/// Instantiates each schema up to `per_schema` times with terms of depth at
/// most `depth` in `k` variables (external terms for the external slots) and
/// checks every instance is a theorem of the external matrix.
pub fn soundness_scan(depth: usize, k: usize, per_schema: usize, seed: u64) -> SoundnessReport {
    let pool = terms_up_to(depth, &standard_variables(k));
    let external: Vec<Term> = pool.iter().filter(|t| is_external(t)).cloned().collect();
    let m = LogicalMatrix::external();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    let mut violations = Vec::new();
    for s in schemas() {
        let metas = s.metavariables();
        for i in 0..per_schema {
            let p = &s.patterns[i % s.patterns.len()];
            let sigma: Substitution = metas
                .iter()
                .map(|v| {
                    let from = if EXTERNAL_SLOTS.contains(&v.as_str()) { &external } else { &pool };
                    (v.clone(), from.choose(&mut rng).expect("nonempty term pool").clone())
                })
                .collect();
            let phi = substitute(p, &sigma);
            debug_assert!(match_schema(&s, &phi).is_ok());
            if let Verdict::Fails(v) = m.is_theorem(&phi).expect("full signature") {
                violations.push(SoundnessViolation {
                    schema: s.id.clone(),
                    formula: render_term(&phi),
                    counterexample: format_valuation(&m.algebra, &v),
                });
            }
        }
        instances.push((s.id.clone(), per_schema));
    }
    SoundnessReport { depth, variables: k, seed, instances, violations }
}

/// Builds `J2 ψ -> J2 φ` for a one-hypothesis derivation of `φ` from `ψ`.
pub fn packaged_conclusion(d: &Derivation) -> Option<Term> {
    match (d.hypotheses.as_slice(), d.conclusion()) {
        ([psi], Some(phi)) => Some(Term::implies(Term::j(2, psi.clone()), Term::j(2, phi.clone()))),
        _ => None,
    }
}
