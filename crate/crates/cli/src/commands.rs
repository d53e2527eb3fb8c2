use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use bochvar::algebra::{b2, builtin, builtin_names, parse_algebra, render_algebra, FiniteAlgebra, Homomorphism, Valuation, Verdict};
use bochvar::amalgam::{amalgamate, fixpoint_obstruction, verify_amalgam, AmalgamOutcome, Quasivariety, VFormation};
use bochvar::bases::Violation;
use bochvar::classify::{build_retraction, classify, Class};
use bochvar::corpus::{basis_equivalence_check, default_scope, run_corpus, Outcome};
use bochvar::hilbert::{check_derivation, parse_derivations, soundness_scan};
use bochvar::matrix::{deduction_scan, theoremhood_agreement, LogicalMatrix};
use bochvar::plonka::{attach_j, decompose, enumerate_bca, parse_system, render_system, verify_decomposition_conditions};
use bochvar::term::{parse_quasi_identity, parse_rule, parse_term, render_term, Term};
use serde_json::{json, Value};

use crate::{Command, MatrixArgs, Target};

/// What a command prints in each mode, and its exit code.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Report { text, json, code: 0 }
    }

    fn failing_if(self, failed: bool) -> Self {
        Report { code: if failed { 1 } else { self.code }, ..self }
    }
}

pub fn run(command: Command) -> Result<Report> {
    match command {
        Command::Eval { algebra, term, assignments } => eval(&algebra, &term, &assignments),
        Command::Check { algebra, law } => check(&algebra, &law),
        Command::Consequence { matrix, query } => consequence(&matrix, &query),
        Command::Theorem { matrix, term: Some(term), .. } => theorem(&matrix, &term),
        Command::Theorem { depth: Some(depth), vars, .. } => agreement(depth, vars),
        Command::Theorem { .. } => bail!("give a term or --depth"),
        Command::Deduction { query: Some(query), .. } => deduction_instance(&query),
        Command::Deduction { depth, vars, .. } => deduction(depth, vars),
        Command::ProveCheck { soundness: true, depth, vars, per_schema, seed, .. } => soundness(depth, vars, per_schema, seed),
        Command::ProveCheck { file, .. } => prove_check(&file.expect("clap requires a file")),
        Command::Compose { system } => compose(&system),
        Command::Decompose { algebra } => decompose_cmd(&algebra),
        Command::Classify { algebra } => classify_cmd(&algebra),
        Command::Retract { algebra } => retract(&algebra),
        Command::Amalgamate { class, a, b, c, i, j } => amalgamate_cmd(class, [&a, &b, &c], &i, &j),
        Command::Enumerate { max_size, full } => enumerate(max_size, full),
        Command::VerifyPaper { size, mutants } => verify_paper(size, mutants),
    }
}

/// A file path, or one of the built-in names.
fn load_algebra(arg: &str) -> Result<FiniteAlgebra> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return parse_algebra(&text).with_context(|| format!("in {arg}"));
    }
    if builtin_names().contains(&arg) {
        return Ok(builtin(arg)?);
    }
    bail!("no file or built-in algebra named `{arg}` (built-ins: {})", builtin_names().join(", "))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn valuation_json(a: &FiniteAlgebra, v: &Valuation) -> Value {
    json!(a.label_map(v))
}

fn format_valuation(a: &FiniteAlgebra, v: &Valuation) -> String {
    bochvar::algebra::format_valuation(a, v)
}

fn verdict_report(a: &FiniteAlgebra, v: &Verdict, yes: &str, no: &str, mut json: Value) -> Report {
    json["holds"] = json!(v.holds());
    match v {
        Verdict::Holds => {
            json["counterexample"] = Value::Null;
            Report::ok(format!("{yes}\n"), json)
        }
        Verdict::Fails(val) => {
            json["counterexample"] = valuation_json(a, val);
            Report { text: format!("{no}: {}\n", format_valuation(a, val)), json, code: 1 }
        }
    }
}

fn eval(algebra: &str, term: &str, assignments: &[String]) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let t = parse_term(term)?;
    let mut v = Valuation::new();
    for item in assignments {
        let (x, e) = item.split_once('=').ok_or_else(|| anyhow!("expected `x=v`, found `{item}`"))?;
        v.insert(x.trim().to_string(), a.element(e.trim())?);
    }
    let value = a.eval(&t, &v)?;
    let label = a.label(value).to_string();
    let json = json!({ "algebra": a.name(), "term": render_term(&t), "valuation": valuation_json(&a, &v), "value": label });
    Ok(Report::ok(format!("{label}\n"), json))
}

fn check(algebra: &str, law: &str) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let q = parse_quasi_identity(law)?;
    let v = a.holds_quasi_identity(&q)?;
    Ok(verdict_report(&a, &v, "holds", "fails", json!({ "algebra": a.name(), "law": q.to_string() })))
}

fn matrix(args: &MatrixArgs) -> Result<LogicalMatrix> {
    let a = load_algebra(&args.algebra)?;
    let designated = args.designated.iter().map(|l| a.element(l.trim())).collect::<Result<Vec<_>, _>>()?;
    Ok(LogicalMatrix::new(a, &designated)?)
}

fn designated_labels(m: &LogicalMatrix) -> Vec<String> {
    let a = &m.algebra;
    (0..a.size()).filter(|&x| m.is_designated(x)).map(|x| a.label(x).to_string()).collect()
}

fn consequence(args: &MatrixArgs, query: &str) -> Result<Report> {
    let m = matrix(args)?;
    let rule = parse_rule(query)?;
    let v = m.consequence(&rule.premises, &rule.conclusion)?;
    let json = json!({ "algebra": m.algebra.name(), "designated": designated_labels(&m), "query": rule.to_string() });
    Ok(verdict_report(&m.algebra, &v, "holds", "fails", json))
}

fn theorem(args: &MatrixArgs, term: &str) -> Result<Report> {
    let m = matrix(args)?;
    let t = parse_term(term)?;
    let v = m.is_theorem(&t)?;
    let json = json!({ "algebra": m.algebra.name(), "designated": designated_labels(&m), "term": render_term(&t) });
    Ok(verdict_report(&m.algebra, &v, "theorem", "not a theorem", json))
}

fn agreement(depth: usize, vars: usize) -> Result<Report> {
    let r = theoremhood_agreement(depth, vars);
    let mut text = format!("terms: {}\nclasses: {}\ndiscrepancies: {}\n", r.terms, r.classes, r.discrepancies.len());
    for d in &r.discrepancies {
        writeln!(text, "  {} (external: {}, nonparaconsistent: {})", d.term, d.external, d.nonparaconsistent)?;
    }
    let json = json!({
        "depth": depth,
        "variables": vars,
        "terms": r.terms.to_string(),
        "classes": r.classes,
        "discrepancies": r.discrepancies,
    });
    Ok(Report::ok(text, json).failing_if(!r.discrepancies.is_empty()))
}

fn deduction_instance(query: &str) -> Result<Report> {
    let rule = parse_rule(query)?;
    let (psi, gamma) = rule.premises.split_last().ok_or_else(|| anyhow!("need at least one premise to discharge"))?;
    let m = LogicalMatrix::external();
    let with_psi: Vec<Term> = gamma.iter().cloned().chain([psi.clone()]).collect();
    let left = m.consequence(&with_psi, &rule.conclusion)?;
    let packaged = Term::implies(Term::j(2, psi.clone()), Term::j(2, rule.conclusion.clone()));
    let right = m.consequence(gamma, &packaged)?;
    let agree = m.check_deduction_instance(gamma, psi, &rule.conclusion)?;
    let show = |v: &Verdict| match v {
        Verdict::Holds => "holds".to_string(),
        Verdict::Fails(val) => format!("fails at {}", format_valuation(&m.algebra, val)),
    };
    let premises = |ts: &[Term]| ts.iter().map(render_term).collect::<Vec<_>>().join(", ");
    let text = format!(
        "{} |- {}: {}\n{} |- {}: {}\n{}\n",
        premises(&with_psi),
        render_term(&rule.conclusion),
        show(&left),
        premises(gamma),
        render_term(&packaged),
        show(&right),
        if agree { "agree" } else { "disagree" }
    );
    let json = json!({
        "premises": gamma.iter().map(render_term).collect::<Vec<_>>(),
        "psi": render_term(psi),
        "phi": render_term(&rule.conclusion),
        "with_psi": show(&left),
        "packaged": show(&right),
        "agree": agree,
    });
    Ok(Report::ok(text, json).failing_if(!agree))
}

fn deduction(depth: usize, vars: usize) -> Result<Report> {
    let r = deduction_scan(depth, vars);
    let mut text = format!("instances: {}\nclass triples: {}\nfailures: {}\n", r.instances, r.checked, r.failures.len());
    for f in &r.failures {
        writeln!(text, "  [{}] {} / {}", f.premise.as_deref().unwrap_or(""), f.psi, f.phi)?;
    }
    let json = json!({
        "depth": depth,
        "variables": vars,
        "instances": r.instances.to_string(),
        "class_triples": r.checked.to_string(),
        "failures": r.failures,
    });
    Ok(Report::ok(text, json).failing_if(!r.failures.is_empty()))
}

fn prove_check(path: &Path) -> Result<Report> {
    let ds = parse_derivations(&read(path)?)?;
    let mut text = String::new();
    let mut all = Vec::new();
    let mut failed = false;
    for d in &ds {
        let v = check_derivation(d);
        failed |= !v.is_valid();
        writeln!(text, "{}: {v}", d.name)?;
        let mut entry = serde_json::to_value(&v)?;
        entry["name"] = json!(d.name);
        all.push(entry);
    }
    Ok(Report::ok(text, json!({ "derivations": all })).failing_if(failed))
}

fn soundness(depth: usize, vars: usize, per_schema: usize, seed: u64) -> Result<Report> {
    let r = soundness_scan(depth, vars, per_schema, seed);
    let mut text = format!("schemas: {}\ninstances: {}\nviolations: {}\n", r.instances.len(), r.total(), r.violations.len());
    for v in &r.violations {
        writeln!(text, "  {}: {} fails at {}", v.schema, v.formula, v.counterexample)?;
    }
    let json = json!({
        "depth": depth,
        "variables": vars,
        "seed": seed,
        "schemas": r.instances.len(),
        "instances": r.total(),
        "violations": r.violations,
    });
    Ok(Report::ok(text, json).failing_if(!r.violations.is_empty()))
}

fn compose(path: &Path) -> Result<Report> {
    let s = parse_system(&read(path)?, path.parent())?;
    let conditions = verify_decomposition_conditions(&s);
    if !conditions.passed() {
        let mut text = String::new();
        for c in conditions.failures() {
            writeln!(text, "condition fails at {}: {}", c.index, c.condition)?;
        }
        return Ok(Report { text, json: json!({ "algebra": Value::Null, "failures": conditions.failures() }), code: 1 });
    }
    let rendered = render_algebra(&attach_j(&s)?);
    Ok(Report::ok(rendered.clone(), json!({ "algebra": rendered, "failures": [] })))
}

fn decompose_cmd(algebra: &str) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let rendered = render_system(&decompose(&a)?.system);
    Ok(Report::ok(rendered.clone(), json!({ "system": rendered })))
}

fn violation_line(v: &Option<Violation>) -> String {
    match v {
        None => "holds".into(),
        Some(v) => format!("fails, item {}: {} at {}", v.item, v.instance, v.counterexample),
    }
}

fn exit_code(c: &Class) -> u8 {
    match c {
        Class::NotBca(_) => 1,
        Class::Trivial => 3,
        Class::Jba => 4,
        Class::NbcaProper => 5,
        Class::BcaProper => 6,
    }
}

fn classify_cmd(algebra: &str) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let c = classify(&a)?;
    let witness = match (&c.witness, &c.witness_source) {
        (Some(h), Some(src)) => Some(format!("{} -> {}: {}", src.name(), a.name(), h.describe(src, &a))),
        _ => None,
    };
    let e = &c.evidence;
    let separation = match &e.separation_witness {
        None => "separated".to_string(),
        Some((x, y)) => format!("{x} and {y} not separated"),
    };
    let mut text = format!("class: {}\n", c.class);
    if let Some(w) = &witness {
        writeln!(text, "witness: {w}")?;
    }
    writeln!(text, "original basis: {}", violation_line(&e.original_basis))?;
    writeln!(text, "reduced basis: {}", violation_line(&e.reduced_basis))?;
    writeln!(text, "separation into wke: {separation}")?;
    if c.class.is_bca() && a.size() > 1 {
        writeln!(text, "fixpoint: {}", e.fixpoint.as_deref().unwrap_or("none"))?;
    }
    if let Some(abs) = e.absorption {
        writeln!(text, "absorption: {}", if abs { "holds" } else { "fails" })?;
    }
    let json = json!({
        "algebra": a.name(),
        "class": c.class.tag(),
        "reason": match &c.class { Class::NotBca(r) => Some(r.clone()), _ => None },
        "witness": witness,
        "evidence": e,
    });
    Ok(Report { text, json, code: exit_code(&c.class) })
}

fn retract(algebra: &str) -> Result<Report> {
    let a = load_algebra(algebra)?;
    let two = b2();
    let r = build_retraction(&a)?;
    let (rm, im) = (r.r.describe(&a, &two), r.iota.describe(&two, &a));
    let atom = a.label(r.atom).to_string();
    let text = format!("atom: {atom}\nr: {rm}\niota: {im}\n");
    Ok(Report::ok(text, json!({ "algebra": a.name(), "atom": atom, "r": rm, "iota": im })))
}

fn amalgamate_cmd(class: Target, specs: [&String; 3], i: &str, j: &str) -> Result<Report> {
    let [a, b, c] = specs.map(|s| load_algebra(s));
    let (a, b, c) = (a?, b?, c?);
    let i = Homomorphism::parse(i, &a, &b).map_err(|e| anyhow!("--i: {e}"))?;
    let j = Homomorphism::parse(j, &a, &c).map_err(|e| anyhow!("--j: {e}"))?;
    let q = match class {
        Target::Bca => Quasivariety::Bca,
        Target::Nbca => Quasivariety::Nbca,
    };
    let v = VFormation::new(a, b, c, i, j)?;
    match amalgamate(&v, q)? {
        AmalgamOutcome::Found(am) => {
            verify_amalgam(&v, &am.d, &am.h, &am.k, q).map_err(|e| anyhow!("amalgam failed verification: {e}"))?;
            let rendered = render_algebra(&am.d);
            let (h, k) = (am.h.describe(&v.b, &am.d), am.k.describe(&v.c, &am.d));
            let text = format!("{rendered}h: {h}\nk: {k}\n");
            Ok(Report::ok(text, json!({ "class": q.to_string(), "amalgam": rendered, "h": h, "k": k, "pairs": am.pairs })))
        }
        AmalgamOutcome::Failed(u) => {
            let side = if u.side == 'B' { v.b.name() } else { v.c.name() };
            let mut text = format!("no amalgam in {q}: {} and {} of {side} are not separated\n", u.x, u.y);
            let obstruction = fixpoint_obstruction(&v);
            if let Some(o) = &obstruction {
                writeln!(text, "J1(h({}) | k({})) = 1 in any amalgam, so it has a fixpoint", o.b, o.c)?;
            }
            let json = json!({ "class": q.to_string(), "amalgam": Value::Null, "unseparated": u, "obstruction": obstruction });
            Ok(Report { text, json, code: 1 })
        }
    }
}

fn enumerate(max_size: usize, full: bool) -> Result<Report> {
    let mut text = String::new();
    let mut entries = Vec::new();
    for a in enumerate_bca(max_size)? {
        let class = classify(&a)?.class;
        writeln!(text, "{} {} {}", a.size(), a.name(), class.tag())?;
        let rendered = render_algebra(&a);
        if full {
            text.push_str(&rendered);
        }
        let mut entry = json!({ "name": a.name(), "size": a.size(), "class": class.tag() });
        if full {
            entry["algebra"] = json!(rendered);
        }
        entries.push(entry);
    }
    Ok(Report::ok(text, json!({ "algebras": entries })))
}

fn verify_paper(size: usize, mutants: Option<usize>) -> Result<Report> {
    let scope = default_scope(size)?;
    let r = run_corpus(Some(&scope))?;
    let mut text = String::new();
    for c in &r.results {
        write!(text, "{} {:<14} {}", if c.matches { "ok  " } else { "FAIL" }, c.id, c.location)?;
        if let Outcome::Fails { algebra, counterexample, .. } = &c.outcome {
            write!(text, " [fails in {algebra} at {counterexample}]")?;
        }
        if let Some(note) = c.note {
            write!(text, " ({note})")?;
        }
        text.push('\n');
    }
    let mismatches = r.mismatches().count();
    let names: Vec<&str> = scope.iter().map(FiniteAlgebra::name).collect();
    writeln!(text, "{} claims, {mismatches} mismatches, scope: {}", r.results.len(), names.join(" "))?;
    let mut json = json!({ "scope": names, "claims": r.results, "mismatches": mismatches });
    let mut failed = mismatches > 0;
    if let Some(n) = mutants {
        let b = basis_equivalence_check(size.min(8), n, 0)?;
        writeln!(
            text,
            "membership tests: {} algebras, {} mutants ({} still members), {} disagreements",
            b.algebras,
            b.mutants,
            b.member_mutants,
            b.disagreements.len()
        )?;
        for d in &b.disagreements {
            writeln!(text, "  {d}")?;
        }
        failed |= !b.disagreements.is_empty();
        json["membership"] = serde_json::to_value(&b)?;
    }
    Ok(Report::ok(text, json).failing_if(failed))
}
