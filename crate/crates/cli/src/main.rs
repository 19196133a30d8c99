mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lgl_core::Error;

/// Lattice-valued subgroups of finite groups.
#[derive(Parser, Debug)]
#[command(name = "lgl", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Emit a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, global = true, env = "LGL_THREADS")]
    pub threads: Option<usize>,
    /// Candidate budget for box enumerations.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Seed for verification suites.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Root directory for fixture paths.
    #[arg(long, global = true, value_name = "DIR")]
    pub fixtures: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lattice checks and the S4 value-lattice search.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Group summaries.
    #[command(subcommand)]
    Group(GroupCommand),
    /// L-subset predicates.
    #[command(subcommand)]
    Lsub(LsubCommand),
    /// Generated L-subgroup of a set of L-points or an L-subset.
    Gen {
        /// Ambient L-subgroup file.
        #[arg(long)]
        mu: String,
        /// Comma-separated `value@element` points.
        #[arg(long, conflicts_with = "eta")]
        points: Option<String>,
        /// L-subset file to generate from.
        #[arg(long)]
        eta: Option<String>,
    },
    /// Central chain and nilpotency class.
    Nilpotency { mu: String },
    /// Normalizer of η in μ.
    Normalizer {
        #[arg(long)]
        eta: String,
        #[arg(long)]
        mu: String,
    },
    /// Normal closure of η in μ and the normal closure series.
    Closure {
        #[arg(long)]
        eta: String,
        #[arg(long)]
        mu: String,
    },
    /// Maximality of η in μ by box enumeration.
    Maximal {
        #[arg(long)]
        eta: String,
        #[arg(long)]
        mu: String,
    },
    /// Frattini L-subgroup.
    Frattini {
        mu: String,
        #[arg(long, value_enum, default_value_t = ViaArg::Both)]
        via: ViaArg,
    },
    /// Generating L-points.
    Fingen {
        mu: String,
        /// Largest generating set size tried by the exhaustive search.
        #[arg(long, default_value_t = 3)]
        k_max: usize,
    },
    /// Run a verification suite; `list` shows the registry and `all` runs every suite.
    Verify {
        suite: String,
        #[arg(long, default_value_t = lgl_core::verify::DEFAULT_CASES)]
        cases: u64,
        /// Replay a single case.
        #[arg(long)]
        case: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum LatticeCommand {
    /// Validate a lattice and report distributivity and chain shape.
    Check { lattice: String },
    /// Search for 14-element value lattices of the S4 example.
    Reconstruct,
    /// Print a built-in lattice as JSON.
    Export { lattice: String },
}

#[derive(Subcommand, Debug)]
pub enum GroupCommand {
    /// Order, elements and subgroups.
    Info { group: String },
}

#[derive(Subcommand, Debug)]
pub enum LsubCommand {
    /// L-subgroup test, optionally relative to an ambient L-subgroup.
    Check {
        mu: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Pointwise)]
        mode: ModeArg,
        /// Ambient L-subgroup; adds containment and normality.
        #[arg(long = "in", value_name = "AMBIENT")]
        ambient: Option<String>,
    },
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ModeArg {
    Pointwise,
    Levels,
    StrongLevels,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ViaArg {
    Enumeration,
    NonGenerators,
    Both,
}

/// Exit status of a command that ran to completion.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Violation,
    /// Partial report: some cases ran out of budget.
    OverBudget,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.global.threads.filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match commands::run(&cli) {
        Ok(Status::Ok) => ExitCode::from(EXIT_OK),
        Ok(Status::Violation) => ExitCode::from(EXIT_VIOLATION),
        Ok(Status::OverBudget) => ExitCode::from(EXIT_BUDGET),
        Err(e) => {
            output::error(&cli.global, &e);
            ExitCode::from(match e {
                Error::BudgetExceeded { .. } => EXIT_BUDGET,
                _ => EXIT_INPUT,
            })
        }
    }
}
