use std::collections::HashSet;
use std::fmt;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use super::Witness;
use crate::formula::Formula;
use crate::frames::World;
use crate::reductions::CompiledEncoding;
use crate::semantics::{Checker, Model};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub world: World,
    pub name: String,
    pub boundary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjunctReport {
    pub label: String,
    pub holds: bool,
    /// Worlds where the failure bottoms out, in world order.
    pub violations: Vec<Violation>,
}

impl ConjunctReport {
    pub fn interior(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| !v.boundary)
    }

    pub fn boundary_only(&self) -> bool {
        self.holds || (!self.violations.is_empty() && self.interior().next().is_none())
    }
}

impl fmt::Display for ConjunctReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            return write!(f, "{}: HOLDS", self.label);
        }
        let shown = self.interior().next().or(self.violations.first());
        match shown {
            Some(v) => {
                let tag = if v.boundary { "boundary" } else { "interior" };
                write!(f, "{}: FAILS at {} [{tag}]", self.label, v.name)?;
                if self.violations.len() > 1 {
                    let inner = self.interior().count();
                    write!(f, " (+{} more; {inner} interior in total)", self.violations.len() - 1)?;
                }
                Ok(())
            }
            None => write!(f, "{}: FAILS", self.label),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub target: String,
    pub exact: bool,
    pub lines: Vec<ConjunctReport>,
}

impl Report {
    /// Exact witnesses must satisfy every conjunct; truncated ones may only
    /// fail on the truncation boundary.
    pub fn contract_holds(&self) -> bool {
        if self.exact {
            self.lines.iter().all(|l| l.holds)
        } else {
            self.lines.iter().all(|l| l.boundary_only())
        }
    }

    pub fn failing(&self) -> impl Iterator<Item = &ConjunctReport> {
        self.lines.iter().filter(|l| !l.holds)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Checks every conjunct of `enc` at the witness root.
pub fn verify(w: &Witness, enc: &CompiledEncoding, jobs: usize) -> Report {
    let mut r = verify_model(&w.model, enc, &w.boundary, jobs);
    r.exact = w.kind.is_exact();
    r
}

/// Per-conjunct check of `enc` at `m.root`, classifying each failure world
/// against `boundary`. The report is marked exact when `boundary` is empty.
pub fn verify_model(m: &Model, enc: &CompiledEncoding, boundary: &FixedBitSet, jobs: usize) -> Report {
    let root = m.root.expect("model has a root");
    let one = |(label, f): &(String, Formula)| {
        let mut ck = Checker::new(m);
        let holds = ck.holds(root, f);
        let mut worlds = FixedBitSet::with_capacity(m.len());
        if !holds {
            blame(&mut ck, root, f, &mut worlds, &mut HashSet::new());
        }
        let violations = worlds
            .ones()
            .map(|w| Violation { world: w, name: m.world_name(w), boundary: boundary.contains(w) })
            .collect();
        ConjunctReport { label: label.clone(), holds, violations }
    };
    let lines = if jobs > 1 {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(|| enc.conjuncts.par_iter().map(one).collect()),
            Err(_) => enc.conjuncts.iter().map(one).collect(),
        }
    } else {
        enc.conjuncts.iter().map(one).collect()
    };
    Report { target: enc.target.clone(), exact: boundary.is_clear(), lines }
}

/// Collects the worlds where a failure of `f` at `w` bottoms out: boxes
/// descend into the failing successors, implications into the consequent,
/// conjunctions into the failing conjuncts.
fn blame(ck: &mut Checker, w: World, f: &Formula, out: &mut FixedBitSet, seen: &mut HashSet<(World, *const Formula)>) {
    use Formula::*;
    if !seen.insert((w, f as *const Formula)) {
        return;
    }
    match f {
        And(a, b) => {
            for g in [a, b] {
                if !ck.holds(w, g) {
                    blame(ck, w, g, out, seen);
                }
            }
        }
        Neg(inner) => match &**inner {
            Neg(a) => blame(ck, w, a, out, seen),
            And(_, nb) if matches!(&**nb, Neg(_)) => {
                let Neg(b) = &**nb else { unreachable!() };
                blame(ck, w, b, out, seen)
            }
            Dia0(na) | Dia1(na) if matches!(&**na, Neg(_)) => {
                let Neg(body) = &**na else { unreachable!() };
                let i = if matches!(&**inner, Dia0(_)) { 0 } else { 1 };
                let succ: Vec<World> = ck.model().frame.rel(i).successors(w).collect();
                for y in succ {
                    if !ck.holds(y, body) {
                        blame(ck, y, body, out, seen);
                    }
                }
            }
            _ => out.insert(w),
        },
        _ => out.insert(w),
    }
}
