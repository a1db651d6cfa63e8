//! Library side of the `routed` command-line tool: the document format and
//! the subcommands.

pub mod commands;
pub mod document;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use routed::circuit::Algorithm;

pub use commands::{ModeArg, Outcome};
pub use document::{load, parse, Document, DocumentRepr, LoadError, Payload, FORMAT_VERSION};

/// Overrides the default numerical tolerance.
pub const TOLERANCE_VAR: &str = "ROUTED_TOLERANCE";

#[derive(Debug, Parser)]
#[command(
    name = "routed",
    version,
    about = "Check, evaluate and analyse routed circuits and index-matching circuits"
)]
pub struct Cli {
    /// Print a human-readable report instead of JSON.
    #[arg(long, global = true)]
    pub human: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the properness checks of a circuit or lint an IODAG.
    Validate {
        file: PathBuf,
        /// iso, uni or channel (defaults: isometry for pure circuits, channel
        /// for CP circuits, iso for IODAGs).
        #[arg(long)]
        mode: Option<ModeArg>,
    },
    /// Evaluate a circuit or an interpreted IODAG and certify the result.
    Eval {
        file: PathBuf,
        /// iso or uni for IODAGs (default: uni when the lint allows it).
        #[arg(long)]
        mode: Option<ModeArg>,
    },
    /// Accessible sector tuples of a slice of wires.
    Accessible {
        file: PathBuf,
        /// Comma-separated wire ids.
        #[arg(long, value_delimiter = ',', required = true)]
        slice: Vec<String>,
        /// Run only one algorithm (default: both, checking they agree).
        #[arg(long)]
        algorithm: Option<AlgorithmArg>,
    },
    /// Witnesses for every improper composition.
    Explain {
        file: PathBuf,
        #[arg(long)]
        mode: Option<ModeArg>,
    },
    /// Graphviz rendering of the diagram.
    ExportDot {
        file: PathBuf,
        /// Output file (default: stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AlgorithmArg {
    Definition,
    Recipe,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Definition => Algorithm::Definition,
            AlgorithmArg::Recipe => Algorithm::Recipe,
        }
    }
}

/// Tolerance from `ROUTED_TOLERANCE`, falling back to the library default.
pub fn tolerance() -> Result<f64, String> {
    match std::env::var(TOLERANCE_VAR) {
        Err(_) => Ok(routed::linalg::DEFAULT_TOL),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t.is_finite() && t > 0.0 => Ok(t),
            _ => Err(format!(
                "{TOLERANCE_VAR} must be a positive number, got `{s}`"
            )),
        },
    }
}

pub fn run(cli: &Cli, tol: f64) -> Outcome {
    match &cli.command {
        Command::Validate { file, mode } => commands::validate(file, *mode, tol),
        Command::Eval { file, mode } => commands::eval(file, *mode, tol),
        Command::Accessible {
            file,
            slice,
            algorithm,
        } => commands::accessible(file, slice, algorithm.map(Algorithm::from), tol),
        Command::Explain { file, mode } => commands::explain(file, *mode, tol),
        Command::ExportDot { file, output } => commands::export_dot(file, output.as_deref(), tol),
    }
}
