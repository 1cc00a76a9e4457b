//! `bimodal`: batch front end for the bimodal workbench.
//!
//! Exit status: 0 success, 1 verification failure, 2 usage or input error,
//! 3 budget exhausted.

mod cmd;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use cmd::Failure;

#[derive(Parser, Debug)]
#[command(name = "bimodal", version, about = "Model checking, bounded search and machine encodings for bimodal product logics")]
pub struct Cli {
    /// Seed for randomised sampling.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for search and verification.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Include elapsed times in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Formulas are given inline or as `@path`.
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a formula and print its desugared form.
    Parse {
        #[arg(long, short)]
        formula: String,
        /// Print primitive connectives only.
        #[arg(long)]
        raw: bool,
    },
    /// Evaluate a formula at a world of a model.
    Check {
        #[arg(long)]
        model: String,
        #[arg(long, short)]
        formula: String,
        /// World label; defaults to the model's root.
        #[arg(long)]
        world: Option<String>,
    },
    /// Validity in the frame of a model file (its valuation is ignored).
    Valid {
        #[arg(long)]
        model: String,
        #[arg(long, short)]
        formula: String,
        /// Largest number of valuations enumerated.
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
        /// When the budget is too small, try this many random valuations.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Bounded satisfiability over a frame class.
    Search {
        #[arg(long, short)]
        formula: String,
        /// product, expanding, decreasing, omega, commuting or expanding-linear.
        #[arg(long, default_value = "product")]
        class: String,
        #[arg(long, default_value_t = 3)]
        hmax: usize,
        #[arg(long, default_value_t = 3)]
        vmax: usize,
        /// World bound for the commuting class.
        #[arg(long)]
        max_worlds: Option<usize>,
        /// Seconds before giving up.
        #[arg(long)]
        timeout: Option<u64>,
        #[arg(long)]
        max_candidates: Option<usize>,
        /// Write the model found here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Compile a machine problem into an encoding formula.
    Compile {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        target: String,
        /// Start state; defaults to the first declared state.
        #[arg(long)]
        q0: Option<String>,
        #[arg(long)]
        qr: Option<String>,
        #[arg(long)]
        out: Option<String>,
    },
    /// Enumerate the runs of a machine up to a depth.
    Simulate {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        q0: Option<String>,
        /// Configurations per run.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Lossy semantics with this counter cap.
        #[arg(long)]
        lossy: Option<u64>,
        #[arg(long, default_value_t = 20)]
        limit: usize,
    },
    /// Bounded-depth answer to one of the machine problems.
    Oracle {
        #[arg(long)]
        machine: String,
        /// nontermination, reachability, recurrence, lossy-reach or lossy-omega.
        #[arg(long)]
        problem: String,
        #[arg(long)]
        q0: Option<String>,
        #[arg(long)]
        qr: Option<String>,
        /// Visits required by the recurrence problems.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        cap: u64,
        /// Steps explored.
        #[arg(long, default_value_t = 10)]
        depth: usize,
    },
    /// Build a witness model for a machine.
    BuildWitness {
        #[arg(long)]
        machine: String,
        /// fw_rec, fw_fin, bw_inf, bw_rec, dense, lossy_exp or lossy_fin.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        q0: Option<String>,
        #[arg(long)]
        qr: Option<String>,
        /// Truncation parameter; number of runs for lossy_exp.
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Chain points per tick block (dense only).
        #[arg(long, default_value_t = 2)]
        width: usize,
        /// Oracle depth used to find runs.
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Check every conjunct of an encoding in a witness model.
    VerifyWitness {
        #[arg(long)]
        model: String,
        #[arg(long)]
        enc: String,
        /// Also check the backward staircase claims up to this K.
        #[arg(long)]
        backward: Option<usize>,
    },
    /// Read machine runs back out of a model.
    Decode {
        #[arg(long)]
        model: String,
        #[arg(long)]
        enc: String,
        #[arg(long)]
        machine: String,
        /// Witness kind; defaults to the model's own note or the encoding target.
        #[arg(long)]
        kind: Option<String>,
        /// Configurations read from truncated models.
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Shrink the vertical carrier of a grid model.
    Shrink {
        #[arg(long)]
        model: String,
        #[arg(long, short)]
        formula: String,
        #[arg(long)]
        out: Option<String>,
        /// Write the closure trace here.
        #[arg(long)]
        trace: Option<String>,
    },
    /// compile, build-witness, verify and decode, then compare the runs.
    Roundtrip {
        #[arg(long)]
        machine: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        q0: Option<String>,
        #[arg(long)]
        qr: Option<String>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 12)]
        depth: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = std::io::stdout().lock();
    match cmd::run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
