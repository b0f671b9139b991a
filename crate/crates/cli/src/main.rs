//! Batch driver for the polynomial/preserver verifications: every
//! subcommand reads its inputs, runs one exact verification, and prints a
//! reproducible report (identical command + seed gives identical output up
//! to the elapsed-time field).
//!
//! Exit codes: 0 = pass or value, 1 = fail with witness, 2 = usage or
//! input error.

mod ops;
mod report;

use clap::{Parser, Subcommand, ValueEnum};
use report::Format;
use std::path::PathBuf;
use std::process::exit;
use std::time::Instant;

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "preserver-lab",
    about = "Exact verifications for multilinear polynomials on matrix algebras and the maps preserving their zeros",
    version
)]
struct Cli {
    /// Output format for the run report
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: FormatArg,
    /// Seed for every randomized verification
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient-sum classification of a multilinear polynomial
    Classify {
        /// Polynomial expression or path to a file holding one
        #[arg(long)]
        poly: String,
    },
    /// Decide whether the polynomial vanishes identically on M_n
    IdentityTest {
        #[arg(long)]
        poly: String,
        /// Matrix dimension
        #[arg(long)]
        n: usize,
    },
    /// Sample zeros of the polynomial and check a map preserves them
    PreserveCheck {
        #[arg(long)]
        poly: String,
        /// Map file: matrix JSON (side n²) or standard-form parameters
        #[arg(long)]
        map: PathBuf,
        /// Number of sampled zeros
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Recover standard-form parameters from an invertible map
    Decompose {
        #[arg(long)]
        map: PathBuf,
    },
    /// Staircase witness pair whose zero set the basis swap θ breaks
    WitnessTheta {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n: usize,
    },
    /// Exact solution space of the slot-wise centrality equations
    Lemma23 {
        #[arg(long)]
        poly: String,
        #[arg(long)]
        n: usize,
    },
    /// Re-verify the witnesses embedded in a saved report
    Recheck {
        #[arg(long)]
        report: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Text => Format::Text,
    };
    let started = Instant::now();
    let result = match &cli.command {
        Command::Classify { poly } => ops::cmd_classify(poly, cli.seed),
        Command::IdentityTest { poly, n } => ops::cmd_identity_test(poly, *n, cli.seed),
        Command::PreserveCheck { poly, map, trials } => {
            ops::cmd_preserve_check(poly, map, *trials, cli.seed)
        }
        Command::Decompose { map } => ops::cmd_decompose(map, cli.seed),
        Command::WitnessTheta { poly, n } => ops::cmd_witness_theta(poly, *n, cli.seed),
        Command::Lemma23 { poly, n } => ops::cmd_lemma23(poly, *n, cli.seed),
        Command::Recheck { report } => ops::cmd_recheck(report, cli.seed),
    };
    match result {
        Ok(mut run) => {
            run.elapsed_ms = started.elapsed().as_millis() as u64;
            run.print(format);
            exit(run.exit_code());
        }
        Err(err) => {
            eprintln!("error: {err}");
            exit(2);
        }
    }
}
