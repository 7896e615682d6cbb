//! `affrank`: construct, analyze, classify and exhaustively verify affine
//! spaces of matrices with bounded-below rank over GF(p).
//!
//! Every command writes one JSON document to stdout (or a table with
//! `--table`). Failures write a JSON error object to stderr and exit with
//! 1 (usage), 2 (precondition), 3 (inconclusive) or 4 (theorem falsified).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "affrank", version, about = "Affine spaces of matrices with bounded-below rank over GF(p)")]
pub struct Cli {
    /// Field order (odd prime, 3..=31).
    #[arg(long, global = true, default_value_t = 3)]
    pub field: u32,
    /// Work cap shared by every search and enumeration (per-operation
    /// defaults when omitted).
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for every randomised choice (ChaCha8).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Human-readable table instead of JSON.
    #[arg(long, global = true, conflicts_with = "json")]
    pub table: bool,
    /// JSON output (the default).
    #[arg(long, global = true)]
    pub json: bool,
    /// Read the input space from this file instead of stdin.
    #[arg(long, short, global = true)]
    pub input: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a space from one of the standard constructions.
    Construct(ConstructArgs),
    /// Invariant report for a space read from the input.
    Analyze(AnalyzeArgs),
    /// Reduce an extremal space to canonical form with a witness.
    Classify(ClassifyArgs),
    /// Exhaustive checks over all subspaces of a small ambient space.
    Verify(VerifyArgs),
    /// Apply a seeded random equivalence `P · S · Q` to the input space.
    Shuffle,
    /// Decide equivalence of the two spaces in an input JSON array `[S, T]`.
    Equiv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    /// `I_r + (P_1 Mata_{n_1} ∨ …)` from `--parts`.
    Canonical,
    /// `i_{n,p}` of the upper unitriangular `r × r` matrices.
    Intro,
    /// Alternate `n × n` matrices.
    Alternate,
    /// `A ∨ B` for an input JSON array `[A, B]`.
    Vee,
    /// `i_{n,p}(W)` for an input space `W`.
    Embed,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    pub kind: ConstructKind,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Block sizes, e.g. `1,1` or `2`.
    #[arg(long, value_delimiter = ',')]
    pub parts: Vec<usize>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Rank used for the core-space report (defaults to the lower rank).
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Lower rank of the input (defaults to its computed lower rank).
    #[arg(long)]
    pub r: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Bound,
    Classification,
    Maximality,
    Facts,
    Nonisotropy,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub target: VerifyTarget,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub r: Option<usize>,
    /// Sampled `(P, Q)` pairs for the conjugation fact.
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            output::usage_error("--jobs must be positive");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            output::usage_error(&format!("cannot start worker pool: {e}"));
            return ExitCode::from(1);
        }
    }
    commands::run(&cli)
}
