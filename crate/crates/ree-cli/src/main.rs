use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ree_cli::commands;

/// Constructive recognition and membership for the small Ree groups
/// Ree(q), q = 3^(2m+1), in their 7-dimensional representation.
#[derive(Parser)]
#[command(name = "ree", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the generators generate the standard copy of Ree(q)
    Recognize {
        #[arg(long)]
        m: u32,
        /// Generator file; defaults to the shipped standard generators
        #[arg(long)]
        gens: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Express an element of Ree(q) as an SLP over the generators
    Membership {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        gens: Option<PathBuf>,
        /// Matrix file with the element to test
        #[arg(long)]
        element: PathBuf,
        /// Output SLP file
        #[arg(long)]
        slp: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        budget: u32,
    },
    /// Conjugate a GL(7,q)-conjugate of Ree(q) to the standard copy
    Conjugate {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        gens: PathBuf,
        /// Output file for the conjugating matrix
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        budget: u32,
    },
    /// Random element of the stabilizer of an ovoid point, as an SLP
    Stabilizer {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        gens: Option<PathBuf>,
        /// Point file; defaults to the point at infinity
        #[arg(long)]
        point: Option<PathBuf>,
        /// Output SLP file
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        budget: u32,
    },
    /// Write a reproducible random GL(7,q)-conjugate of the standard generators
    RandomGroup {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate an SLP file on the generators
    Evaluate {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        gens: Option<PathBuf>,
        #[arg(long)]
        slp: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a quick internal consistency battery
    Selftest {
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Benchmark stabilizer construction and conjugation, CSV output
    Bench {
        /// Comma-separated list of m values, e.g. 1,2,3
        #[arg(long, value_delimiter = ',')]
        m: Vec<u32>,
        #[arg(long, default_value_t = 3)]
        trials: u64,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Recognize { m, gens, seed } => commands::cmd_recognize(*m, gens, *seed),
        Cmd::Membership { m, gens, element, slp, seed, budget } => {
            commands::cmd_membership(*m, gens, element, slp, *seed, *budget)
        }
        Cmd::Conjugate { m, gens, out, seed, budget } => {
            commands::cmd_conjugate(*m, gens, out, *seed, *budget)
        }
        Cmd::Stabilizer { m, gens, point, out, seed, budget } => {
            commands::cmd_stabilizer(*m, gens, point, out, *seed, *budget)
        }
        Cmd::RandomGroup { m, seed, out } => commands::cmd_random_group(*m, *seed, out),
        Cmd::Evaluate { m, gens, slp, out } => commands::cmd_evaluate(*m, gens, slp, out),
        Cmd::Selftest { m, seed } => commands::cmd_selftest(*m, *seed),
        Cmd::Bench { m, trials, csv, seed } => commands::cmd_bench(m, *trials, csv, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(u8::try_from(e.code).unwrap_or(2))
        }
    }
}
