mod cache;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "quiddity",
    version,
    about = "Polygon dissections, quiddities and their counting formulas"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Recompute instead of reading or writing the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Cache directory; overrides QUIDDITY_CACHE_DIR.
    #[arg(long, global = true, value_name = "DIR")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct FilterArgs {
    /// Only ell-periodic dissections: every cell size is 3 mod ell.
    #[arg(long, conflicts_with_all = ["sizes", "equal"])]
    pub ell: Option<usize>,
    /// Only cells of these sizes, e.g. `3,4`.
    #[arg(long, value_delimiter = ',', conflicts_with = "equal")]
    pub sizes: Option<Vec<usize>>,
    /// Only cells of this one size.
    #[arg(long)]
    pub equal: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct Shape {
    /// Number of polygon vertices.
    #[arg(long)]
    pub n: usize,
    /// Number of cells.
    #[arg(long)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub filter: FilterArgs,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stream dissections, one per line.
    Enumerate {
        #[command(flatten)]
        shape: Shape,
        /// Stop after this many dissections.
        #[arg(long)]
        max_results: Option<usize>,
    },
    /// Count dissections.
    Count {
        #[command(flatten)]
        shape: Shape,
    },
    /// Count distinct quiddities.
    Quiddities {
        #[command(flatten)]
        shape: Shape,
    },
    /// Group dissections by quiddity.
    Classes {
        #[command(flatten)]
        shape: Shape,
        /// Include a dihedral-congruence flag per class.
        #[arg(long)]
        reports: bool,
    },
    /// Quiddity of one dissection.
    Of { dissection: String },
    /// Evaluate a closed-form count.
    Formula {
        /// catalan, kirkman-cayley, fuss, ell-periodic, tri-quad, quiddity-3p, binomial
        name: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<i64>,
    },
    /// Solve a generating-function equation.
    Series {
        /// catalan, kirkman-cayley, ell-periodic, tri-quad, p, q
        equation: String,
        #[arg(long, default_value_t = 12)]
        order: usize,
        #[arg(long)]
        ell: Option<usize>,
    },
    #[command(subcommand)]
    Surgery(SurgeryCommand),
    #[command(subcommand)]
    Cf(CfCommand),
    #[command(subcommand)]
    Modular(ModularCommand),
    /// The table of 3-periodic quiddity counts.
    Table {
        #[arg(long, default_value_t = 14)]
        max_n: i64,
    },
    /// Run the oracle-equivalence suites.
    VerifyAll {
        #[arg(value_enum, default_value_t = ScopeArg::Fast)]
        scope: ScopeArg,
    },
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
pub enum ScopeArg {
    Fast,
    Full,
}

#[derive(Subcommand, Debug)]
pub enum SurgeryCommand {
    /// Legal surgeries on a dissection.
    Moves {
        dissection: String,
        /// Allow surgeries that break 3-periodicity.
        #[arg(long)]
        any: bool,
    },
    /// Apply the surgery removing the two given chords, e.g. `1-3,5-7`.
    Apply { dissection: String, removed: String },
    /// Maximally open dissection with the same quiddity.
    Canon { dissection: String },
    /// Closure under surgeries.
    Class {
        dissection: String,
        #[arg(long)]
        any: bool,
    },
}

#[derive(Subcommand, Debug)]
pub enum CfCommand {
    /// Value of a continued fraction.
    Eval {
        terms: String,
        /// Read the terms as a Hirzebruch-Jung expansion.
        #[arg(long)]
        hj: bool,
    },
    /// Both expansions of a rational `p/q` or of a term list.
    Convert {
        value: String,
        #[arg(long)]
        hj: bool,
    },
    /// Strip triangulation of a regular continued fraction.
    Strip { terms: String },
}

#[derive(Subcommand, Debug)]
pub enum ModularCommand {
    /// Product of elementary matrices.
    Product { entries: String },
    /// Whether the product is +Id, -Id or neither.
    Classify { entries: String },
    /// Check the correspondence with 3-periodic quiddities at one polygon size.
    Verify {
        #[arg(long)]
        n: usize,
        /// Largest tuple entry in the converse sweep; defaults to n - 2.
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl From<quiddity_core::Error> for CliError {
    fn from(e: quiddity_core::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = commands::run(&cli, &mut out);
    let flushed = out.flush();
    match result {
        Ok(code) if flushed.is_ok() => code,
        Ok(_) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(1)
        }
    }
}
