//! Command-line front end for exact submeasure analysis, pathology
//! certificates, and the calculus of labeled partitions of unity.

mod commands;
mod output;
mod script;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{CliError, CliResult, OutputMode};

#[derive(Parser)]
#[command(
    name = "pucalc",
    version,
    about = "Exact-rational submeasure analysis, domination certificates, and partition-of-unity group calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output mode: human-readable text or one canonical structured record.
    #[arg(long, global = true, value_enum, default_value = "text")]
    output: OutputMode,

    /// Seed for any sampled (non-exhaustive) check; never defaulted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Lower the atom-count cap (never raises module maxima).
    #[arg(long, global = true, value_name = "K")]
    max_n: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a set function and report diffuseness and two-valued domination.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Maximal dominated measure M(φ) and κ(φ) with a primal/dual certificate.
    Kappa {
        #[arg(long)]
        input: PathBuf,
        /// Re-verify a previously emitted certificate instead of solving.
        #[arg(long, value_name = "CERT")]
        verify: Option<PathBuf>,
    },
    /// Greedy measure extraction from a monotone submodular function.
    Kelley {
        #[arg(long)]
        input: PathBuf,
        /// Atom order as comma-separated indices (default: 0,1,…).
        #[arg(long)]
        order: Option<String>,
    },
    /// Covering-witness search at a level ε ∈ (0,1).
    Christensen {
        #[arg(long)]
        input: PathBuf,
        /// Exact rational level, e.g. 1/3.
        #[arg(long)]
        epsilon: String,
        /// Re-verify a previously emitted witness instead of searching.
        #[arg(long, value_name = "WITNESS")]
        verify: Option<PathBuf>,
    },
    /// Run a group-calculus script (bindings and assertions).
    Group {
        #[arg(long)]
        input: PathBuf,
    },
    /// Lift a positive-type function through a measure and evaluate it.
    Lift {
        #[arg(long)]
        input: PathBuf,
    },
    /// Emit a benchmark set-function record (deterministic for fixed seed).
    Generate {
        /// copoints | ell_subsets_cover | random_cover | concave_cardinality
        kind: String,
        /// Kind-specific parameters.
        params: Vec<String>,
    },
    /// Run the built-in verification suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        level: u8,
    },
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Analyze { input } => commands::cmd_analyze(input, cli.output, cli.seed, cli.max_n),
        Command::Kappa { input, verify } => {
            commands::cmd_kappa(input, cli.output, cli.max_n, verify.as_deref())
        }
        Command::Kelley { input, order } => {
            commands::cmd_kelley(input, order.as_deref(), cli.output, cli.max_n)
        }
        Command::Christensen { input, epsilon, verify } => {
            commands::cmd_christensen(input, epsilon, cli.output, cli.max_n, verify.as_deref())
        }
        Command::Group { input } => {
            let text = std::fs::read_to_string(input)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", input.display())))?;
            script::run_script(&text, cli.output)
        }
        Command::Lift { input } => commands::cmd_lift(input, cli.output),
        Command::Generate { kind, params } => {
            commands::cmd_generate(kind, params, cli.seed, cli.output)
        }
        Command::Selftest { level } => commands::cmd_selftest(*level, cli.seed, cli.output),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
