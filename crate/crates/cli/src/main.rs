//! `bernays`: batch front end over workspace files.
//!
//! Exit codes: 0 affirmative, 1 negative finding, 2 unknown under budget,
//! 3 usage or parse error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use bernays_core::Budget;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

#[derive(Debug, Parser)]
#[command(name = "bernays", version, about = "Finite-valued approximations of Hilbert calculi")]
struct Cli {
    /// Workspace files to load; later files may refer to earlier ones and vice versa.
    #[arg(short = 'f', long = "file", global = true)]
    files: Vec<PathBuf>,
    /// Search limits: `default` or depth=<d>,states=<s>,candidates=<c>,time=<t>.
    #[arg(long, global = true, default_value = "default")]
    budget: Budget,
    /// Write the produced matrix or certificate here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Args)]
struct MatrixFormula {
    #[arg(long)]
    matrix: String,
    /// A formula name from the workspace or a formula in concrete syntax.
    #[arg(long)]
    formula: String,
}

#[derive(Debug, Args)]
struct Pair {
    #[arg(long)]
    first: String,
    #[arg(long)]
    second: String,
    /// Candidate formulas checked before any search.
    #[arg(long = "hint")]
    hints: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Value of a formula under a valuation.
    Eval {
        #[command(flatten)]
        mf: MatrixFormula,
        /// `X=v, Y=w` over value names.
        #[arg(long, default_value = "")]
        valuation: String,
    },
    /// Tautology check with the first countermodel.
    Taut {
        #[command(flatten)]
        mf: MatrixFormula,
    },
    /// Direct product of matrices.
    Product {
        #[arg(long = "matrix", required = true, num_args = 1..)]
        matrices: Vec<String>,
        #[arg(long, default_value = "product")]
        name: String,
    },
    /// Compression of a host matrix around a countermodel of a formula.
    /// `GINF` names the infinite Gödel chain.
    Phi {
        #[command(flatten)]
        mf: MatrixFormula,
        /// Countermodel to keep; the first one is used when omitted.
        #[arg(long)]
        valuation: Option<String>,
        #[arg(long, default_value = "phi")]
        name: String,
    },
    /// Quotient by a partition such as `0 1 | 2`.
    Quotient {
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        partition: String,
        #[arg(long, default_value = "quotient")]
        name: String,
    },
    /// Isomorphism search.
    Iso {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
    },
    /// Whether a matrix is a cover of a calculus.
    Cover {
        #[arg(long)]
        calculus: String,
        #[arg(long)]
        matrix: String,
    },
    /// Checks a derivation from the workspace.
    CheckDerivation {
        #[arg(long)]
        derivation: String,
    },
    /// Whether every rule premise uses only variables of its conclusion.
    Analytic {
        #[arg(long)]
        calculus: String,
    },
    /// Counts m-valued matrices, or covers when a calculus is given.
    Enumerate {
        /// Language of the matrices; taken from the calculus when omitted.
        #[arg(long)]
        language: Option<String>,
        #[arg(long)]
        calculus: Option<String>,
        #[arg(long)]
        values: usize,
        /// Keep every matrix instead of one per isomorphism class.
        #[arg(long)]
        all: bool,
        /// Emit the matrices found.
        #[arg(long)]
        list: bool,
    },
    /// The minimal m-valued covers of a calculus.
    MinimalCovers {
        #[arg(long)]
        calculus: String,
        #[arg(long)]
        values: usize,
    },
    /// A tautology of the second matrix falsified in the first.
    Separate {
        #[command(flatten)]
        pair: Pair,
        /// Emit a certificate when the first matrix is a cover of this calculus.
        #[arg(long)]
        calculus: Option<String>,
    },
    /// Compares tautology sets.
    Compare {
        #[command(flatten)]
        pair: Pair,
    },
    /// Membership in the many-valued closure of a calculus.
    Mc {
        #[arg(long)]
        calculus: String,
        #[arg(long)]
        formula: String,
    },
    /// Checks an underivability certificate from the workspace.
    Certify {
        #[arg(long)]
        certificate: String,
    },
    /// Truth of a formula in a Kripke model, world by world.
    KripkeEval {
        #[arg(long)]
        kripke: String,
        #[arg(long)]
        formula: String,
    },
    /// The bit-sequence matrix of a Kripke model.
    Kripke2matrix {
        #[arg(long)]
        kripke: String,
        #[arg(long, default_value = "mk")]
        name: String,
    },
    /// Chains products of matrices of the smallest refuting models.
    ApproxChain {
        #[arg(long = "kripke", required = true, num_args = 1..)]
        models: Vec<String>,
        #[arg(long = "candidate", required = true, num_args = 1..)]
        candidates: Vec<String>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value = "chain")]
        name: String,
    },
    /// Formulas-as-values matrix agreeing with a matrix logic up to a depth.
    Lindenbaum {
        /// The logic, given by one of its matrices.
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        vars: usize,
        #[arg(long, default_value = "lindenbaum")]
        name: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => emit(&cli, outcome),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn emit(cli: &Cli, mut outcome: Outcome) -> ExitCode {
    if let (Some(path), Some(artifact)) = (&cli.out, &outcome.artifact) {
        if let Err(e) = std::fs::write(path, artifact) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(3);
        }
        outcome.line("written", path.display().to_string());
        outcome.artifact = None;
    }
    match cli.format {
        Format::Text => {
            for (key, value) in &outcome.lines {
                println!("{key}: {value}");
            }
            if let Some(a) = &outcome.artifact {
                print!("{a}");
                if !a.ends_with('\n') {
                    println!();
                }
            }
        }
        Format::Structured => {
            let mut obj = outcome.json.clone();
            obj.insert("exit".into(), outcome.code.into());
            if let Some(a) = &outcome.artifact {
                obj.insert("artifact".into(), a.clone().into());
            }
            println!("{}", serde_json::Value::Object(obj));
        }
    }
    ExitCode::from(outcome.code)
}
