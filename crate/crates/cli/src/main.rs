//! `xover`: optimal approximate cross-over designs, efficiencies of exact
//! designs and reduced-design constructions from the command line.

mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xover_core::Error;

#[derive(Debug, Parser)]
#[command(name = "xover", version, about = "Universally optimal cross-over designs for total effects")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the optimal symmetric design of `k` periods and `t` treatments.
    Optimize(OptimizeArgs),
    /// Optimal proportions and `h*` over a range of `t`, one column per `t`.
    Table(TableArgs),
    /// List the equivalence classes of sequences.
    Classes(ClassesArgs),
    /// Efficiencies of an exact (CSV) or approximate (JSON) design.
    Evaluate(EvaluateArgs),
    /// Build a reduced design on `t(t−1)` subjects from a starting design.
    Construct(ConstructArgs),
    /// The symmetric exact design generated by one class.
    Generate(GenerateArgs),
    /// Strong balance, automorphisms, complete symmetry and period-model comparison.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Recover and verify exact rational proportions and `h*`.
    #[arg(long)]
    pub rational: bool,
    /// Relative tolerance for selecting active classes.
    #[arg(long, value_name = "TOL")]
    pub tol_active: Option<f64>,
    /// Only consider classes whose labels form runs.
    #[arg(long)]
    pub run_form: bool,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// Number of periods.
    #[arg(short)]
    pub k: usize,
    /// Number of treatments.
    #[arg(short)]
    pub t: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    /// Write to a file instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(short)]
    pub k: usize,
    /// Treatments as `a..b` (inclusive), a comma list or a single value.
    #[arg(short, value_name = "RANGE")]
    pub t: String,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Append single-class efficiency rows.
    #[arg(long)]
    pub efficiency: bool,
    /// Extra class rows, comma separated (e.g. `11233,11222`).
    #[arg(long, value_delimiter = ',')]
    pub classes: Vec<String>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[arg(short)]
    pub k: usize,
    #[arg(short)]
    pub t: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DesignInput {
    /// Design file: CSV for an exact design, `.json` for an approximate one, `-` for CSV on stdin.
    pub input: PathBuf,
    /// Number of treatments (defaults to the largest label).
    #[arg(short)]
    pub t: Option<usize>,
    /// The CSV has one row per period and one column per subject.
    #[arg(long)]
    pub transpose: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub design: DesignInput,
    /// Include period effects in the model.
    #[arg(long)]
    pub periods_model: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, default_value = "oa")]
    pub method: xover_core::Method,
    #[arg(short)]
    pub t: usize,
    /// Class expanding each triplet, e.g. `1122333`.
    #[arg(long)]
    pub pattern: String,
    /// Seed triplet for the gf method, e.g. `1,2,3`.
    #[arg(long, value_parser = parse_triplet)]
    pub seed_triplet: Option<[usize; 3]>,
    /// Write the design with one row per period.
    #[arg(long)]
    pub transpose: bool,
    /// `csv` (or `table`) writes the exact design; `json` writes it as an approximate design.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; a JSON record of the construction is written next to it.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Class generating the design, e.g. `122`.
    #[arg(long)]
    pub pattern: String,
    #[arg(short)]
    pub t: usize,
    /// Expected number of periods; must match the pattern.
    #[arg(short)]
    pub k: Option<usize>,
    #[arg(long)]
    pub transpose: bool,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub design: DesignInput,
    /// Skip the automorphism search.
    #[arg(long)]
    pub skip_automorphisms: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_triplet(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("invalid label `{p}`")))
        .collect::<Result<_, _>>()?;
    <[usize; 3]>::try_from(parts).map_err(|p| format!("expected three labels, got {}", p.len()))
}

/// An invalid combination of arguments.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CERTIFICATION: u8 = 3;
const EXIT_UNSUPPORTED: u8 = 4;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::Certificate { .. } | Error::NoConvergence { .. } | Error::NoProportions { .. }) => {
            EXIT_CERTIFICATION
        }
        Some(Error::Unsupported(_)) => EXIT_UNSUPPORTED,
        Some(Error::Io(_) | Error::Csv(_) | Error::Json(_)) | None => EXIT_FAILURE,
        Some(_) => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Optimize(a) => commands::optimize(&a),
        Command::Table(a) => commands::table(&a),
        Command::Classes(a) => commands::classes(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Construct(a) => commands::construct(&a),
        Command::Generate(a) => commands::generate(&a),
        Command::Check(a) => commands::check(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
