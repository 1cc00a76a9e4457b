//! The derived horizontal relation of the tick construction.
//!
//! A model satisfying the tick formula at its root flips `Tick` column by
//! column; `x R^M y` holds when some `z` between `x` (exclusive) and `y`
//! (inclusive) has the opposite tick value. Points are `~`-equivalent when
//! they are related by `R` but not by `R^M`.

use thiserror::Error;

use super::{Relation, World};
use crate::formula::{and, box_plus, boxm, dia, implies, or, var, Formula};
use crate::semantics::{Checker, Model};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TickError {
    #[error("model has no grid layout")]
    NotAGrid,
    #[error("model has no root")]
    NoRoot,
    #[error("tick formula fails at the root")]
    TickFails,
}

/// `[1]+[0]+(Tick | <1>Tick -> Tick & [1]Tick)`
pub fn tick_formula(tick: &str) -> Formula {
    let t = var(tick);
    box_plus(1, box_plus(0, implies(or(t.clone(), dia(1, t.clone())), and(t.clone(), boxm(1, t)))))
}

#[derive(Debug, Clone)]
pub struct TickStructure {
    /// `R^M` on the horizontal carrier.
    pub rm: Relation,
    /// `~` on the horizontal carrier.
    pub sim: Relation,
    /// Tick value of each column (columns are tick-uniform).
    pub tick: Vec<bool>,
    horizontal: Relation,
}

/// Computes `R^M` and `~` for a grid model whose root satisfies the tick
/// formula for the proposition `tick`.
pub fn derive_tick_structure(m: &Model, tick: &str) -> Result<TickStructure, TickError> {
    let layout = m.layout.as_ref().ok_or(TickError::NotAGrid)?;
    let root = m.root.ok_or(TickError::NoRoot)?;
    if !Checker::new(m).holds(root, &tick_formula(tick)) {
        return Err(TickError::TickFails);
    }
    let r = &layout.horizontal.rel;
    let hn = r.len();
    let tick_at = |x: usize, u: usize| layout.world_at(x, u).is_some_and(|w| m.holds_var(tick, w));
    let flipped = |x: usize, z: usize| layout.domain(z).into_iter().all(|u| tick_at(x, u) != tick_at(z, u));
    let mut rm = Relation::empty(hn);
    for x in 0..hn {
        for z in r.successors(x) {
            if !flipped(x, z) {
                continue;
            }
            rm.insert(x, z);
            for y in r.successors(z) {
                rm.insert(x, y);
            }
        }
    }
    let mut sim = Relation::empty(hn);
    for y in 0..hn {
        for z in 0..hn {
            if y == z || (r.holds(y, z) && !rm.holds(y, z)) || (r.holds(z, y) && !rm.holds(z, y)) {
                sim.insert(y, z);
            }
        }
    }
    let tick = (0..hn).map(|x| layout.domain(x).into_iter().any(|u| tick_at(x, u))).collect();
    Ok(TickStructure { rm, sim, tick, horizontal: r.clone() })
}

impl TickStructure {
    /// Checks transitivity of `R^M`, that `~` is an equivalence, and the
    /// three interaction properties; returns one message per violation.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.rm.len();
        let rm = &self.rm;
        let sim = &self.sim;
        if !rm.is_transitive() {
            out.push("R^M is not transitive".into());
        }
        if !(sim.is_reflexive() && sim.is_symmetric() && sim.is_transitive()) {
            out.push("~ is not an equivalence".into());
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    if sim.holds(y, z) && rm.holds(x, y) && !rm.holds(x, z) {
                        out.push(format!("sameroot fails for x={x}, y={y}, z={z}"));
                    }
                    if sim.holds(y, z) && rm.holds(y, x) && !rm.holds(z, x) {
                        out.push(format!("wcon fails for x={x}, y={y}, z={z}"));
                    }
                    if rm.holds(x, y)
                        && rm.holds(x, z)
                        && !(sim.holds(y, z) || rm.holds(y, z) || rm.holds(z, y))
                    {
                        out.push(format!("wconM fails for x={x}, y={y}, z={z}"));
                    }
                }
            }
        }
        out
    }

    /// The `~`-class of a column.
    pub fn interval(&self, x: usize) -> Vec<usize> {
        self.sim.successors(x).collect()
    }

    pub fn horizontal(&self) -> &Relation {
        &self.horizontal
    }

    /// Worlds where the `R^M`-diamond of `psi` disagrees with the
    /// tick-relativised diamond of `psi`.
    pub fn diamond_disagreements(&self, m: &Model, psi: &Formula, tick: &str) -> Vec<World> {
        let layout = m.layout.as_ref().expect("grid model");
        let mut ch = Checker::new(m);
        let inner = ch.eval(psi).clone();
        let black = ch.eval(&crate::formula::black_dia0(psi.clone(), tick)).clone();
        let mut bad = Vec::new();
        for w in 0..m.len() {
            let (x, u) = layout.coords[w];
            let semantic = self
                .rm
                .successors(x)
                .any(|y| layout.world_at(y, u).is_some_and(|w2| inner.contains(w2)));
            if semantic != black.contains(w) {
                bad.push(w);
            }
        }
        bad
    }
}
