//! Text and JSON output of every subcommand against checked-in files.
//! Run with `UPDATE_GOLDEN=1` to rewrite them.

use std::path::{Path, PathBuf};
use std::process::Command;

const CASES: &[(&str, &[&str])] = &[
    ("eval", &["eval", "--algebra", "wke", "J1(x)", "--set", "x=H"]),
    ("eval-two-vars", &["eval", "--algebra", "b4+b2", "x | y", "--set", "x=a,y=bot"]),
    ("check-holds", &["check", "J2 x | J2 ~x | J1 x = 1"]),
    ("check-fails", &["check", "--algebra", "wke", "x & (x|y) = x"]),
    ("check-quasi", &["check", "--algebra", "b4+b2", "J1 x = 1 => y = 1"]),
    ("consequence", &["consequence", "x, x -> y |- y"]),
    ("consequence-paraconsistent", &["consequence", "--designated", "1,H", "x, x -> y |- y"]),
    ("theorem", &["theorem", "J2 x | ~J2 x"]),
    ("not-theorem", &["theorem", "x | ~x"]),
    ("theorem-scan", &["theorem", "--depth", "2"]),
    ("deduction", &["deduction", "x, y |- x & y"]),
    ("deduction-scan", &["deduction", "--depth", "1"]),
    ("prove-check", &["prove-check", "data/identity.drv"]),
    ("soundness", &["prove-check", "--soundness", "--depth", "1", "--per-schema", "10"]),
    ("compose", &["compose", "data/wke.sys"]),
    ("compose-inline", &["compose", "data/b4+b2.sys"]),
    ("compose-not-injective", &["compose", "data/injective.sys"]),
    ("decompose", &["decompose", "b4+b2"]),
    ("classify-nbca", &["classify", "data/b4+b2.alg"]),
    ("classify-bca", &["classify", "wke"]),
    ("classify-jba", &["classify", "b4"]),
    ("classify-trivial", &["classify", "trivial"]),
    ("classify-edited", &["classify", "data/wke-edited.alg"]),
    ("retract", &["retract", "b4+b2"]),
    (
        "amalgamate-bca",
        &["amalgamate", "--class", "bca", "b2", "wke", "b4", "--i", "1->1 0->0", "--j", "1->1 0->0"],
    ),
    (
        "amalgamate-nbca-twisted",
        &[
            "amalgamate", "--class", "nbca", "b4", "b4+b2", "b4+b2", "--i", "1->1 0->0 a->a na->na", "--j",
            "1->1 0->0 a->na na->a",
        ],
    ),
    ("enumerate", &["enumerate", "--max-size", "6"]),
    ("verify-paper", &["verify-paper", "--size", "6", "--mutants", "20"]),
];

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str], json: bool) -> String {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bochvar"));
    cmd.current_dir(workspace());
    if json {
        cmd.arg("--json");
    }
    let out = cmd.args(args).output().expect("binary runs");
    assert!(out.stderr.is_empty(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    format!("exit {}\n{}", out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

#[test]
fn golden() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let mut stale = Vec::new();
    for (name, args) in CASES {
        for (json, ext) in [(false, "txt"), (true, "json")] {
            let path = dir.join(format!("{name}.{ext}"));
            let got = run(args, json);
            if update {
                std::fs::write(&path, &got).unwrap();
            } else if std::fs::read_to_string(&path).ok().as_deref() != Some(got.as_str()) {
                stale.push(format!("{}:\n{got}", path.display()));
            }
        }
    }
    assert!(stale.is_empty(), "output differs from golden files:\n{}", stale.join("\n"));
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_bochvar")).current_dir(workspace()).args(args).output().unwrap().status.code()
    };
    assert_eq!(code(&["classify", "data/wke-edited.alg"]), Some(1));
    assert_eq!(code(&["classify", "trivial"]), Some(3));
    assert_eq!(code(&["classify", "b2"]), Some(4));
    assert_eq!(code(&["classify", "b4+b2"]), Some(5));
    assert_eq!(code(&["classify", "wke"]), Some(6));
    assert_eq!(code(&["classify", "no-such-algebra"]), Some(1));
    assert_eq!(code(&["eval", "x &"]), Some(1));
    assert_eq!(code(&["frobnicate"]), Some(2));
}

/// Every file shipped in data/ is accepted by the command it is meant for.
#[test]
fn sample_files_load() {
    for entry in std::fs::read_dir(workspace().join("data")).unwrap() {
        let path = entry.unwrap().path();
        let args: Vec<&str> = match path.extension().and_then(|e| e.to_str()) {
            Some("alg") => vec!["classify"],
            Some("sys") => vec!["compose"],
            Some("drv") => vec!["prove-check"],
            _ => continue,
        };
        let out = Command::new(env!("CARGO_BIN_EXE_bochvar")).args(&args).arg(&path).output().unwrap();
        assert!(out.stderr.is_empty(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
    }
}
