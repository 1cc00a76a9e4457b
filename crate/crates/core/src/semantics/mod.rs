//! Models, the labelling model checker, frame validity and bounded search.

mod dag;
pub mod sat;
mod search;
mod text;

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::Formula;
use crate::frames::{GridLayout, GridTwoFrame, TwoFrame, World};

pub use dag::{Dag, Node, NodeId};
pub use search::{
    bounded_sat, enumerate_candidates, Budget, Candidate, ExhaustionReport, Found, FrameClass,
    SearchError, SearchOutcome, SearchSpec,
};
pub use text::{parse_model, print_model, ModelParseError};

/// A 2-frame with a valuation. Propositions missing from the valuation are
/// false everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub frame: TwoFrame,
    pub layout: Option<GridLayout>,
    pub val: BTreeMap<String, FixedBitSet>,
    pub root: Option<World>,
}

impl Model {
    pub fn new(frame: TwoFrame) -> Self {
        Model { frame, layout: None, val: BTreeMap::new(), root: None }
    }

    pub fn on_grid(g: GridTwoFrame) -> Self {
        Model { frame: g.frame, layout: Some(g.layout), val: BTreeMap::new(), root: None }
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn set(&mut self, p: &str, w: World) {
        let n = self.len();
        self.val.entry(p.to_string()).or_insert_with(|| FixedBitSet::with_capacity(n)).insert(w);
    }

    pub fn unset(&mut self, p: &str, w: World) {
        if let Some(s) = self.val.get_mut(p) {
            s.set(w, false);
        }
    }

    /// Makes sure `p` is present in the valuation (possibly empty).
    pub fn declare(&mut self, p: &str) {
        let n = self.len();
        self.val.entry(p.to_string()).or_insert_with(|| FixedBitSet::with_capacity(n));
    }

    pub fn holds_var(&self, p: &str, w: World) -> bool {
        self.val.get(p).is_some_and(|s| s.contains(w))
    }

    pub fn truth_set(&self, p: &str) -> FixedBitSet {
        self.val.get(p).cloned().unwrap_or_else(|| FixedBitSet::with_capacity(self.len()))
    }

    /// Grid world at horizontal index `h`, vertical index `v`.
    pub fn at(&self, h: usize, v: usize) -> Option<World> {
        self.layout.as_ref().and_then(|l| l.world_at(h, v))
    }

    pub fn coords(&self, w: World) -> Option<(usize, usize)> {
        self.layout.as_ref().map(|l| l.coords[w])
    }

    /// Human-readable name: grid coordinates when available.
    pub fn world_name(&self, w: World) -> String {
        match &self.layout {
            Some(l) => l.coord_label(w),
            None => self.frame.labels[w].clone(),
        }
    }
}

/// Memoised labelling: every distinct subformula is evaluated once, on all
/// worlds at the same time.
pub struct Checker<'m> {
    model: &'m Model,
    dag: Dag,
    sets: Vec<FixedBitSet>,
}

impl<'m> Checker<'m> {
    pub fn new(model: &'m Model) -> Self {
        Checker { model, dag: Dag::new(), sets: Vec::new() }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// The set of worlds where `f` holds.
    pub fn eval(&mut self, f: &Formula) -> &FixedBitSet {
        let id = self.dag.add(f);
        self.fill();
        &self.sets[id]
    }

    pub fn holds(&mut self, w: World, f: &Formula) -> bool {
        self.eval(f).contains(w)
    }

    fn fill(&mut self) {
        let n = self.model.len();
        while self.sets.len() < self.dag.len() {
            let id = self.sets.len();
            let s = match &self.dag.nodes[id] {
                Node::Var(p) => self.model.truth_set(p),
                Node::Top => {
                    let mut s = FixedBitSet::with_capacity(n);
                    s.insert_range(..);
                    s
                }
                Node::Bot => FixedBitSet::with_capacity(n),
                Node::Neg(a) => {
                    let mut s = self.sets[*a].clone();
                    s.toggle_range(..);
                    s
                }
                Node::And(a, b) => {
                    let mut s = self.sets[*a].clone();
                    s.intersect_with(&self.sets[*b]);
                    s
                }
                Node::Dia(i, a) => {
                    let rel = self.model.frame.rel(*i);
                    let target = &self.sets[*a];
                    let mut s = FixedBitSet::with_capacity(n);
                    for w in 0..n {
                        if !rel.successor_set(w).is_disjoint(target) {
                            s.insert(w);
                        }
                    }
                    s
                }
            };
            self.sets.push(s);
        }
    }
}

pub fn check(m: &Model, w: World, f: &Formula) -> bool {
    Checker::new(m).holds(w, f)
}

/// Least world where `f` holds.
pub fn satisfiable_in(m: &Model, f: &Formula) -> Option<World> {
    Checker::new(m).eval(f).ones().next()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("valuation budget of {budget} exhausted ({needed} valuations needed)")]
pub struct ValidityBudgetError {
    pub budget: u64,
    pub needed: String,
}

/// Either validity or a falsifying model and world.
#[derive(Debug, Clone)]
pub enum Validity {
    Valid,
    Refuted { model: Box<Model>, world: World },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Validity in a finite frame by enumerating every valuation of the
/// formula's variables. Fails when more than `budget` valuations would be
/// needed.
pub fn valid_in_frame(frame: &TwoFrame, f: &Formula, budget: u64) -> Result<Validity, ValidityBudgetError> {
    let vars: Vec<String> = f.vars().iter().map(|v| v.to_string()).collect();
    let n = frame.len();
    let bits = vars.len() * n;
    if bits >= 63 || (1u64 << bits) > budget {
        let needed = if bits >= 63 { format!("2^{bits}") } else { (1u64 << bits).to_string() };
        return Err(ValidityBudgetError { budget, needed });
    }
    let mut model = Model::new(frame.clone());
    for v in &vars {
        model.declare(v);
    }
    for code in 0..1u64 << bits {
        for (k, v) in vars.iter().enumerate() {
            let s = model.val.get_mut(v).unwrap();
            for w in 0..n {
                s.set(w, (code >> (k * n + w)) & 1 == 1);
            }
        }
        let mut ch = Checker::new(&model);
        let truth = ch.eval(f);
        if truth.count_ones(..) != n {
            let world = (0..n).find(|&w| !truth.contains(w)).unwrap();
            return Ok(Validity::Refuted { model: Box::new(model), world });
        }
    }
    Ok(Validity::Valid)
}
