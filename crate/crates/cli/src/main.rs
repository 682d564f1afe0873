//! `hyperfix`: command-line driver for the hyperfix experiments.

mod commands;
mod input;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use hyperfix_core::{Norm, TiePolicy};

#[derive(Parser, Debug)]
#[command(
    name = "hyperfix",
    version,
    about = "Hyperspace metrics, trajectories and regularizing perturbations"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    /// Comparison slack for ties and property checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Fixed-point tolerance for trajectories.
    #[arg(long = "fp-tol", global = true, default_value_t = 1e-8)]
    pub fp_tol: f64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Override the norm of set files (l1, l2, linf or sum, euclidean, max).
    #[arg(long, global = true, value_parser = parse_norm)]
    pub norm: Option<Norm>,
    #[arg(long = "tie-break", global = true, value_enum, default_value_t = TieBreak::Lexicographic)]
    pub tie_break: TieBreak,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    Lexicographic,
    Error,
}

impl TieBreak {
    pub fn policy(self) -> TiePolicy {
        match self {
            TieBreak::Lexicographic => TiePolicy::Lexicographic,
            TieBreak::Error => TiePolicy::ErrorOnTie,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Metric,
    Lipschitz,
    Construction,
    Stability,
    All,
}

fn parse_norm(s: &str) -> Result<Norm, String> {
    s.parse().map_err(|e: hyperfix_core::HyperError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Pompeiu–Hausdorff distance between two set files.
    Hausdorff { a: PathBuf, b: PathBuf },
    /// Nearest points of a set to a point.
    Project {
        set: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Image of a point under a map.
    Eval {
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Successive approximations from a start point.
    Trajectory {
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
    /// Builds and verifies the inductive chain G_0, …, G_n.
    Chain {
        map: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        /// Also save G_n as a map file.
        #[arg(long = "save-map")]
        save_map: Option<PathBuf>,
    },
    /// Unique-projection experiment around a spike set.
    Porosity {
        set: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long)]
        n: usize,
        /// Domain file for clipping sampled sets; defaults to the set's
        /// own domain or its bounding box widened by one.
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Property suites against a map.
    Verify {
        map: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Start point for the stability suite; defaults to the domain centroid.
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
    },
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: a property or verification check failed.
    Check(String),
    /// Exit 2: the input could not be used.
    Input(String),
}

impl Failure {
    pub fn input(e: impl std::fmt::Display) -> Failure {
        Failure::Input(e.to_string())
    }
}

impl From<hyperfix_core::HyperError> for Failure {
    fn from(e: hyperfix_core::HyperError) -> Failure {
        use hyperfix_core::HyperError as E;
        match e {
            E::ChainTooFine { .. } | E::BisectionFailed { .. } | E::Unverified(_) => Failure::Check(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("HYPERFIX_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::Input(format!("HYPERFIX_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(Failure::input)
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let c = &cli.common;
    if !(c.tol >= 0.0 && c.tol.is_finite()) || !(c.fp_tol >= 0.0 && c.fp_tol.is_finite()) {
        return Err(Failure::Input("tolerances must be finite and non-negative".into()));
    }
    match cli.command {
        Command::Hausdorff { a, b } => commands::hausdorff(c, &a, &b),
        Command::Project { set, point } => commands::project(c, &set, &point),
        Command::Eval { map, point } => commands::eval(c, &map, &point),
        Command::Trajectory { map, start, steps } => commands::trajectory(c, &map, &start, steps),
        Command::Chain {
            map,
            start,
            n,
            r,
            save_map,
        } => commands::chain(c, &map, &start, n, r, save_map.as_deref()),
        Command::Porosity { set, point, n, domain } => commands::porosity(c, &set, &point, n, domain.as_deref()),
        Command::Verify { map, suite, start } => suites::verify(c, &map, suite, start.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("hyperfix: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("hyperfix: invalid input: {msg}");
            ExitCode::from(2)
        }
    }
}
