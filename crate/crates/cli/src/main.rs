mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Finite-model workbench for Bochvar external logic and Bochvar algebras.
///
/// Algebra arguments take a file path or a built-in name (trivial, b2, b4,
/// wke, b4+b2).
#[derive(Parser)]
#[command(name = "bochvar", version)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a term under a valuation.
    Eval {
        #[arg(long, default_value = "wke")]
        algebra: String,
        term: String,
        /// `x=v`; repeat or separate with commas.
        #[arg(long = "set", value_delimiter = ',')]
        assignments: Vec<String>,
    },
    /// Check an identity or quasi-identity (`s = t, ... => u = v`).
    Check {
        #[arg(long, default_value = "wke")]
        algebra: String,
        law: String,
    },
    /// Decide `premises |- conclusion` in a matrix.
    Consequence {
        #[command(flatten)]
        matrix: MatrixArgs,
        query: String,
    },
    /// Theoremhood of one term, or agreement of the two matrices over all
    /// small terms.
    Theorem {
        #[command(flatten)]
        matrix: MatrixArgs,
        term: Option<String>,
        /// Scan every term up to this depth instead.
        #[arg(long, conflicts_with = "term")]
        depth: Option<usize>,
        #[arg(long, default_value_t = 2)]
        vars: usize,
    },
    /// Check one deduction-theorem instance, or scan all small ones.
    Deduction {
        /// `premises, psi |- phi`; the last premise is the one discharged.
        query: Option<String>,
        #[arg(long, default_value_t = 2, conflicts_with = "query")]
        depth: usize,
        #[arg(long, default_value_t = 2, conflicts_with = "query")]
        vars: usize,
    },
    /// Check derivation files, or test the axiom schemas for soundness.
    ProveCheck {
        #[arg(required_unless_present = "soundness")]
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        soundness: bool,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        vars: usize,
        #[arg(long, default_value_t = 50)]
        per_schema: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the algebra of a system file, attaching J.
    Compose { system: PathBuf },
    /// Split an algebra into its direct system.
    Decompose { algebra: String },
    /// Place an algebra in JBA ⊂ NBCA ⊂ BCA. Exit code: 1 not a Bochvar
    /// algebra, 3 trivial, 4 JBA, 5 NBCA_proper, 6 BCA_proper.
    Classify { algebra: String },
    /// Retraction onto B2 of a fixpoint-free Bochvar algebra.
    Retract { algebra: String },
    /// Amalgamate B and C over A along the embeddings i and j.
    Amalgamate {
        #[arg(long, value_enum)]
        class: Target,
        a: String,
        b: String,
        c: String,
        /// `x->y ...` from A to B.
        #[arg(long)]
        i: String,
        /// `x->y ...` from A to C.
        #[arg(long)]
        j: String,
    },
    /// List Bochvar algebras up to isomorphism.
    Enumerate {
        #[arg(long, default_value_t = 8)]
        max_size: usize,
        /// Print every algebra in file format.
        #[arg(long)]
        full: bool,
    },
    /// Run the claim corpus.
    VerifyPaper {
        /// Largest enumerated algebra in the default scope.
        #[arg(long, default_value_t = 8)]
        size: usize,
        /// Also compare the membership tests on mutated tables.
        #[arg(long)]
        mutants: Option<usize>,
    },
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, default_value = "wke")]
    algebra: String,
    /// Designated elements, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    designated: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Bca,
    Nbca,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            let written = if cli.json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("json values serialize"))
            } else {
                write!(out, "{}", report.text)
            };
            if written.is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
