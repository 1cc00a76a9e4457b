//! Explicit satisfying models for the machine encodings, per-conjunct
//! verification against a compiled encoding, and decoding of runs back out
//! of models.
//!
//! Infinite witnesses are truncated. Every truncated witness carries the set
//! of its boundary worlds: the places where the missing part of the model
//! would have supplied a successor.

mod backward;
mod build;
mod decode;
mod verify;

use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::machines::{bounded_oracle, Machine, Problem, Run, Semantics, StateId, Verdict};
use crate::reductions::Target;
use crate::semantics::Model;

pub use backward::{verify_backward_claims, BackwardReport};
pub use build::build;
pub use decode::{decode_run, DecodeError, DecodedRun};
pub use verify::{verify, verify_model, ConjunctReport, Report, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    FwRec,
    FwFin,
    BwInf,
    BwRec,
    Dense,
    LossyExp,
    LossyFin,
}

impl WitnessKind {
    pub const ALL: [WitnessKind; 7] = [
        WitnessKind::FwRec,
        WitnessKind::FwFin,
        WitnessKind::BwInf,
        WitnessKind::BwRec,
        WitnessKind::Dense,
        WitnessKind::LossyExp,
        WitnessKind::LossyFin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::FwRec => "fw_rec",
            WitnessKind::FwFin => "fw_fin",
            WitnessKind::BwInf => "bw_inf",
            WitnessKind::BwRec => "bw_rec",
            WitnessKind::Dense => "dense",
            WitnessKind::LossyExp => "lossy_exp",
            WitnessKind::LossyFin => "lossy_fin",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Name of the encoding target the witness is meant to satisfy.
    pub fn target_name(self) -> &'static str {
        match self {
            WitnessKind::FwRec => "fw_recurrence",
            WitnessKind::FwFin => "fw_finite_reach",
            WitnessKind::BwInf => "bw_nontermination",
            WitnessKind::BwRec => "bw_recurrence",
            WitnessKind::Dense => "dense_nontermination",
            WitnessKind::LossyExp => "lossy_omega_reach",
            WitnessKind::LossyFin => "lossy_finite_reach",
        }
    }

    pub fn for_target(t: &Target) -> Self {
        match t {
            Target::FwRecurrence { .. } => WitnessKind::FwRec,
            Target::FwFiniteReach { .. } => WitnessKind::FwFin,
            Target::BwNonTermination { .. } => WitnessKind::BwInf,
            Target::BwRecurrence { .. } => WitnessKind::BwRec,
            Target::DenseNonTermination { .. } => WitnessKind::Dense,
            Target::LossyOmegaReach { .. } => WitnessKind::LossyExp,
            Target::LossyFiniteReach { .. } => WitnessKind::LossyFin,
        }
    }

    /// Exact kinds are finite models of their encoding; the rest are
    /// truncations of infinite ones.
    pub fn is_exact(self) -> bool {
        matches!(self, WitnessKind::FwFin | WitnessKind::LossyFin)
    }

    pub fn semantics(self) -> Semantics {
        match self {
            WitnessKind::LossyExp | WitnessKind::LossyFin => Semantics::Lossy { cap: u64::MAX },
            _ => Semantics::Reliable,
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct WitnessSpec {
    pub kind: WitnessKind,
    pub machine: Machine,
    /// One run, except for `lossy_exp` which takes `rho_1, ..., rho_n`.
    pub runs: Vec<Run>,
    /// Truncation parameter of the infinite kinds.
    pub k: usize,
    /// Chain points per tick block (dense kind only).
    pub width: usize,
    /// Recurrence / reachability target state.
    pub qr: Option<StateId>,
}

impl WitnessSpec {
    pub fn new(kind: WitnessKind, machine: Machine, runs: Vec<Run>, k: usize, qr: Option<StateId>) -> Self {
        WitnessSpec { kind, machine, runs, k, width: 2, qr }
    }

    /// Number of configurations the kind needs from its (single) run.
    pub fn required_len(&self) -> usize {
        match self.kind {
            WitnessKind::FwRec => self.k,
            WitnessKind::BwInf | WitnessKind::BwRec | WitnessKind::Dense => self.k + 1,
            WitnessKind::FwFin | WitnessKind::LossyFin | WitnessKind::LossyExp => 1,
        }
    }

    /// Finds suitable runs with the bounded oracle and assembles a spec.
    /// For `lossy_exp`, `k` is the number of runs.
    pub fn from_oracle(
        kind: WitnessKind,
        machine: &Machine,
        q0: StateId,
        qr: Option<StateId>,
        k: usize,
        depth: usize,
    ) -> Result<Self, WitnessError> {
        let start = machine.initial(q0);
        let need_qr = || qr.ok_or(WitnessError::MissingTarget(kind));
        let find = |p: Problem| match bounded_oracle(machine, &p, depth) {
            Verdict::YesWithinBound { run, .. } => Ok(run),
            Verdict::NoWithinBound { .. } => Err(WitnessError::NoRun { kind, depth }),
        };
        let runs = match kind {
            WitnessKind::FwFin => vec![find(Problem::Reachability { start, target: need_qr()? })?],
            WitnessKind::LossyFin => {
                vec![find(Problem::LossyReachability { start, target: need_qr()?, cap: LOSSY_CAP })?]
            }
            WitnessKind::FwRec | WitnessKind::BwRec => {
                // the full-length run with the most visits to qr, first found on ties
                let target = need_qr()?;
                let len = WitnessSpec::new(kind, machine.clone(), vec![], k, qr).required_len();
                let visits = |r: &Run| r.configs.iter().skip(1).filter(|c| c.state == target).count();
                let mut best: Option<Run> = None;
                for r in machine.bounded_runs(start, len, Semantics::Reliable).take(RUN_SCAN) {
                    if r.len() == len && best.as_ref().is_none_or(|b| visits(&r) > visits(b)) {
                        best = Some(r);
                    }
                }
                vec![best.ok_or(WitnessError::NoRun { kind, depth: len.saturating_sub(1) })?]
            }
            WitnessKind::BwInf | WitnessKind::Dense => {
                let len = WitnessSpec::new(kind, machine.clone(), vec![], k, qr).required_len();
                let steps = len.saturating_sub(1);
                match bounded_oracle(machine, &Problem::NonTermination { start }, steps) {
                    Verdict::YesWithinBound { run, .. } => vec![run],
                    Verdict::NoWithinBound { .. } => return Err(WitnessError::NoRun { kind, depth: steps }),
                }
            }
            WitnessKind::LossyExp => {
                let target = need_qr()?;
                let at_start = usize::from(q0 == target);
                (1..=k)
                    .map(|n| {
                        find(Problem::LossyOmegaReach { start: start.clone(), target, k: n + at_start, cap: LOSSY_CAP })
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        Ok(WitnessSpec::new(kind, machine.clone(), runs, k, qr))
    }
}

/// Counter cap used when the oracle looks for lossy runs.
const LOSSY_CAP: u64 = 4;

/// Upper limit on runs enumerated when picking a recurrence run.
const RUN_SCAN: usize = 100_000;

/// A built witness: the model (root set) and its truncation boundary.
#[derive(Clone, Debug)]
pub struct Witness {
    pub kind: WitnessKind,
    pub model: Model,
    /// Worlds on the truncation edge; empty for exact kinds.
    pub boundary: FixedBitSet,
    /// One-line description of the boundary, for reports.
    pub boundary_note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("{kind} needs {need} run(s), got {got}")]
    RunCount { kind: WitnessKind, need: String, got: usize },
    #[error("run {index} is not a valid {sem} run (step {step})")]
    InvalidRun { index: usize, step: usize, sem: &'static str },
    #[error("run {index} does not start with all-0 counters")]
    NonZeroStart { index: usize },
    #[error("{kind} with K = {k} needs a run of at least {need} configurations, got {got}")]
    TooShort { kind: WitnessKind, k: usize, need: usize, got: usize },
    #[error("run {index} does not end in the target state")]
    MissedTarget { index: usize },
    #[error("run {index} visits the target state fewer than {need} times after its start")]
    TooFewVisits { index: usize, need: usize },
    #[error("{0} needs a target state")]
    MissingTarget(WitnessKind),
    #[error("runs start in different states")]
    MixedStarts,
    #[error("the bounded oracle found no suitable run for {kind} within depth {depth}")]
    NoRun { kind: WitnessKind, depth: usize },
    #[error("interval width must be at least 1")]
    Width,
}
