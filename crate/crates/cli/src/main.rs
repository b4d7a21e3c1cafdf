use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use interchange::taxonomy::{Concept, SizeGuard};

mod analyze;
mod errors;
mod report;
mod solve;
mod tools;
mod verify;

use errors::exit_code;
use report::{Format, Report};

/// Interchangeable and substitutable values in finite constraint problems.
#[derive(Debug, Parser)]
#[command(name = "interchange", version)]
struct Cli {
    /// Output style: readable text, or one tab-separated record per line.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Largest number of variables handed to the brute-force oracle.
    #[arg(long, env = "INTERCHANGE_MAX_VARS", default_value_t = 6, global = true)]
    max_vars: usize,

    /// Largest domain size handed to the brute-force oracle.
    #[arg(long, env = "INTERCHANGE_MAX_DOMAIN", default_value_t = 4, global = true)]
    max_domain: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one relation over all value pairs, or over a single pair.
    Analyze(AnalyzeArgs),
    /// Check the implication lattice on the gallery or a random corpus.
    Verify(VerifyArgs),
    /// Enumerate solutions, optionally as bundles of interchangeable values.
    Solve(SolveArgs),
    /// Write a seeded random binary (or k-ary) instance.
    Gen(GenArgs),
    /// Graphviz output for the lattice or an instance's microstructure.
    Dot(DotArgs),
    /// List, print or export the built-in gallery instances.
    Gallery(GalleryArgs),
    /// Remove neighborhood-substitutable values until none remain.
    Closure { file: PathBuf },
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("param").multiple(false))]
pub struct AnalyzeArgs {
    pub file: PathBuf,
    #[arg(long, short, value_parser = parse_concept)]
    pub concept: Concept,
    /// Restrict to one pair: VAR A B (for substitutability, A for B).
    #[arg(long, num_args = 3, value_names = ["VAR", "A", "B"])]
    pub pair: Option<Vec<String>>,
    /// Subproblem size for KI.
    #[arg(long, group = "param")]
    pub k: Option<usize>,
    /// Boundary of change for PI, SPrI, NPI, NTI (comma separated, must contain the variable).
    #[arg(long, group = "param", value_delimiter = ',')]
    pub wrt: Option<Vec<String>>,
    /// Variable ordering for DirI and DirSub (comma separated, all variables).
    #[arg(long, group = "param", value_delimiter = ',')]
    pub ordering: Option<Vec<String>>,
    /// Assignment set for DynNI, FDynI, FDynSub, e.g. `Y=p,Z=r`.
    #[arg(long, group = "param")]
    pub under: Option<String>,
    /// Condition for ConI, ConSub, ConNI, ConNSub; repeatable, e.g. `--given Y=p|q`.
    #[arg(long, group = "param")]
    pub given: Vec<String>,
    /// Two tuples for TupSub and ForwNI, e.g. `--tuple X=a,Y=p --tuple X=b,Y=p`.
    #[arg(long, group = "param", num_args = 2, value_names = ["T", "U"])]
    pub tuple: Option<Vec<String>>,
    /// Constraint index for NI_C and NSub_C.
    #[arg(long, group = "param")]
    pub constraint: Option<usize>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("corpus").required(true).multiple(false))]
pub struct VerifyArgs {
    /// Check every gallery claim, then the lattice on the gallery instances.
    #[arg(long, group = "corpus")]
    pub gallery: bool,
    /// Check the lattice on this many seeded random binary instances.
    #[arg(long, group = "corpus", value_name = "N")]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short = 'n', default_value_t = 5)]
    pub vars: usize,
    #[arg(short = 'd', default_value_t = 3)]
    pub domain: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// Tightness values, cycled through the corpus.
    #[arg(long, value_delimiter = ',', default_values_t = [0.2, 0.4, 0.6])]
    pub tightness: Vec<f64>,
    /// Lattice file replacing the built-in one.
    #[arg(long)]
    pub lattice: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub file: PathBuf,
    /// Branch on blocks of per-constraint interchangeable values.
    #[arg(long)]
    pub bundle: bool,
    /// Static variable order (comma separated); declaration order by default.
    #[arg(long, value_delimiter = ',')]
    pub var_order: Option<Vec<String>>,
    /// Try values from last to first.
    #[arg(long)]
    pub descending: bool,
    /// Stop after this many solutions (or bundles).
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(short = 'n')]
    pub vars: usize,
    #[arg(short = 'd')]
    pub domain: usize,
    #[arg(long)]
    pub density: f64,
    #[arg(long)]
    pub tightness: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub arity: usize,
    /// Write here instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("graph").required(true).multiple(false))]
pub struct DotArgs {
    /// The implication lattice.
    #[arg(long, group = "graph")]
    pub hasse: bool,
    /// Lattice file replacing the built-in one (with --hasse).
    #[arg(long, requires = "hasse")]
    pub lattice: Option<PathBuf>,
    /// Microstructure of a binary instance.
    #[arg(long, group = "graph", value_name = "FILE")]
    pub micro: Option<PathBuf>,
    /// Also join the values of each variable.
    #[arg(long, requires = "micro")]
    pub modified: bool,
}

#[derive(Debug, Args)]
pub struct GalleryArgs {
    #[command(subcommand)]
    pub action: GalleryAction,
}

#[derive(Debug, Subcommand)]
pub enum GalleryAction {
    List,
    Show {
        id: String,
    },
    /// Write every instance as `<id>.csp` into the directory.
    Export {
        dir: PathBuf,
    },
}

fn parse_concept(s: &str) -> Result<Concept, String> {
    s.parse::<Concept>().map_err(|e| {
        let names: Vec<&str> = Concept::ALL.iter().map(|c| c.name()).collect();
        format!("{e}; known concepts: {}", names.join(", "))
    })
}

/// Whether a command found what it was asked to look for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
}

fn run(cli: Cli) -> anyhow::Result<(Report, Status)> {
    let guard = SizeGuard {
        max_vars: cli.max_vars,
        max_domain: cli.max_domain,
    };
    match cli.command {
        Command::Analyze(args) => analyze::run(&args, &guard),
        Command::Verify(args) => verify::run(&args, &guard),
        Command::Solve(args) => solve::run(&args),
        Command::Gen(args) => tools::generate(&args),
        Command::Dot(args) => tools::dot(&args),
        Command::Gallery(args) => tools::gallery(&args.action),
        Command::Closure { file } => tools::closure(&file),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok((report, status))) => {
            print!("{}", report.render(format));
            match status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Violation => ExitCode::from(1),
            }
        }
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}
