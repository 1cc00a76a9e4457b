//! One-variable first-order temporal logic with the difference quantifier.
//!
//! Formulas are interpreted over finite linear timelines with a domain per
//! instant. The star map is a syntactic bijection onto bimodal formulas
//! (`F>` becomes `<0>`, `E!=` becomes `<1>`); the dagger map turns a model
//! into a grid model on a linear-by-difference 2-frame.

mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::formula::{self, Formula};
use crate::frames::{assemble, make_difference, make_linear, GridTag};
use crate::semantics::Model;

pub use parse::parse_foltl;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Foltl {
    Pred(Arc<str>),
    Top,
    Bot,
    Neg(Arc<Foltl>),
    And(Arc<Foltl>, Arc<Foltl>),
    /// Strict future: some later instant whose domain contains the element.
    DiaF(Arc<Foltl>),
    /// Some other element of the current domain.
    ExistsNe(Arc<Foltl>),
}

pub fn pred(p: &str) -> Foltl {
    Foltl::Pred(Arc::from(p))
}

pub fn fnot(a: Foltl) -> Foltl {
    Foltl::Neg(Arc::new(a))
}

pub fn fand(a: Foltl, b: Foltl) -> Foltl {
    Foltl::And(Arc::new(a), Arc::new(b))
}

pub fn f_or(a: Foltl, b: Foltl) -> Foltl {
    fnot(fand(fnot(a), fnot(b)))
}

pub fn f_implies(a: Foltl, b: Foltl) -> Foltl {
    fnot(fand(a, fnot(b)))
}

pub fn f_iff(a: Foltl, b: Foltl) -> Foltl {
    fand(f_implies(a.clone(), b.clone()), f_implies(b, a))
}

pub fn dia_f(a: Foltl) -> Foltl {
    Foltl::DiaF(Arc::new(a))
}

pub fn box_f(a: Foltl) -> Foltl {
    fnot(dia_f(fnot(a)))
}

pub fn exists_ne(a: Foltl) -> Foltl {
    Foltl::ExistsNe(Arc::new(a))
}

/// `E x a` is `a | E!= x a`.
pub fn exists(a: Foltl) -> Foltl {
    f_or(a.clone(), exists_ne(a))
}

/// `E>=2 x a` is `E x (a & E!= x a)`.
pub fn exists_ge2(a: Foltl) -> Foltl {
    exists(fand(a.clone(), exists_ne(a)))
}

/// `E=1 x a` is `E x (a & ~E!= x ~~a)`, the image of `<1>=1` under star.
pub fn exists_eq1(a: Foltl) -> Foltl {
    exists(fand(a.clone(), fnot(exists_ne(fnot(fnot(a))))))
}

impl Foltl {
    pub fn children(&self) -> Vec<&Foltl> {
        match self {
            Foltl::Pred(_) | Foltl::Top | Foltl::Bot => vec![],
            Foltl::Neg(a) | Foltl::DiaF(a) | Foltl::ExistsNe(a) => vec![a],
            Foltl::And(a, b) => vec![a, b],
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Foltl> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }
}

impl fmt::Display for Foltl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Foltl::Pred(p) => write!(f, "{p}(x)"),
            Foltl::Top => f.write_str("true"),
            Foltl::Bot => f.write_str("false"),
            Foltl::Neg(a) => {
                if let Foltl::DiaF(b) = &**a {
                    if let Foltl::Neg(c) = &**b {
                        return write!(f, "[F] {}", Atomic(c));
                    }
                }
                write!(f, "~{}", Atomic(a))
            }
            Foltl::And(a, b) => write!(f, "{} & {}", Atomic(a), Atomic(b)),
            Foltl::DiaF(a) => write!(f, "F> {}", Atomic(a)),
            Foltl::ExistsNe(a) => write!(f, "E!= x {}", Atomic(a)),
        }
    }
}

/// Wraps non-atomic subformulas in parentheses when printing.
struct Atomic<'a>(&'a Foltl);

impl fmt::Display for Atomic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Foltl::And(..) => write!(f, "({})", self.0),
            other => write!(f, "{other}"),
        }
    }
}

/// The star map onto bimodal formulas.
pub fn star(f: &Foltl) -> Formula {
    match f {
        Foltl::Pred(p) => formula::var(p),
        Foltl::Top => Formula::Top,
        Foltl::Bot => Formula::Bot,
        Foltl::Neg(a) => formula::not(star(a)),
        Foltl::And(a, b) => formula::and(star(a), star(b)),
        Foltl::DiaF(a) => formula::dia(0, star(a)),
        Foltl::ExistsNe(a) => formula::dia(1, star(a)),
    }
}

/// Inverse of [`star`]; total on the desugared bimodal syntax.
pub fn unstar(f: &Formula) -> Foltl {
    match f {
        Formula::Var(p) => Foltl::Pred(p.clone()),
        Formula::Top => Foltl::Top,
        Formula::Bot => Foltl::Bot,
        Formula::Neg(a) => fnot(unstar(a)),
        Formula::And(a, b) => fand(unstar(a), unstar(b)),
        Formula::Dia0(a) => dia_f(unstar(a)),
        Formula::Dia1(a) => exists_ne(unstar(a)),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DomainMode {
    Constant,
    Decreasing,
    Expanding,
    Free,
}

impl DomainMode {
    pub fn tag(self) -> GridTag {
        match self {
            DomainMode::Constant => GridTag::Product,
            DomainMode::Decreasing => GridTag::Decreasing,
            DomainMode::Expanding => GridTag::Expanding,
            DomainMode::Free => GridTag::Free,
        }
    }

    pub fn from_tag(t: GridTag) -> Self {
        match t {
            GridTag::Product => DomainMode::Constant,
            GridTag::Decreasing => DomainMode::Decreasing,
            GridTag::Expanding => DomainMode::Expanding,
            GridTag::Free => DomainMode::Free,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoltlModelError {
    #[error("instant {0} has an empty domain")]
    EmptyDomain(usize),
    #[error("domains violate the {0:?} mode between instants {1} and {2}")]
    Mode(DomainMode, usize, usize),
    #[error("predicate {0} holds at ({1}, {2}) outside the domain")]
    OutsideDomain(String, usize, usize),
    #[error("not a grid model")]
    NotAGrid,
}

/// A model over the timeline `0 < 1 < ... < instants - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoltlModel {
    pub mode: DomainMode,
    pub domains: Vec<BTreeSet<usize>>,
    pub preds: BTreeMap<String, BTreeSet<(usize, usize)>>,
}

impl FoltlModel {
    pub fn new(
        mode: DomainMode,
        domains: Vec<BTreeSet<usize>>,
        preds: BTreeMap<String, BTreeSet<(usize, usize)>>,
    ) -> Result<Self, FoltlModelError> {
        for (t, d) in domains.iter().enumerate() {
            if d.is_empty() {
                return Err(FoltlModelError::EmptyDomain(t));
            }
        }
        for t in 0..domains.len() {
            for u in t + 1..domains.len() {
                let ok = match mode {
                    DomainMode::Constant => domains[t] == domains[u],
                    DomainMode::Expanding => domains[t].is_subset(&domains[u]),
                    DomainMode::Decreasing => domains[u].is_subset(&domains[t]),
                    DomainMode::Free => true,
                };
                if !ok {
                    return Err(FoltlModelError::Mode(mode, t, u));
                }
            }
        }
        for (p, s) in &preds {
            for &(t, a) in s {
                if t >= domains.len() || !domains[t].contains(&a) {
                    return Err(FoltlModelError::OutsideDomain(p.clone(), t, a));
                }
            }
        }
        Ok(FoltlModel { mode, domains, preds })
    }

    pub fn instants(&self) -> usize {
        self.domains.len()
    }

    pub fn universe(&self) -> BTreeSet<usize> {
        self.domains.iter().flatten().copied().collect()
    }

    /// Truth of `f` at instant `t` for element `a` (which must lie in
    /// `domains[t]`), straight from the definition.
    pub fn eval(&self, t: usize, a: usize, f: &Foltl) -> bool {
        match f {
            Foltl::Pred(p) => self.preds.get(&**p).is_some_and(|s| s.contains(&(t, a))),
            Foltl::Top => true,
            Foltl::Bot => false,
            Foltl::Neg(g) => !self.eval(t, a, g),
            Foltl::And(g, h) => self.eval(t, a, g) && self.eval(t, a, h),
            Foltl::DiaF(g) => {
                (t + 1..self.instants()).any(|u| self.domains[u].contains(&a) && self.eval(u, a, g))
            }
            Foltl::ExistsNe(g) => self.domains[t].iter().any(|&b| b != a && self.eval(t, b, g)),
        }
    }
}

/// The grid model with worlds `(t, a)`, `a` in the domain of `t`.
pub fn dagger(m: &FoltlModel) -> Model {
    let universe: Vec<usize> = m.universe().into_iter().collect();
    let pos = |a: usize| universe.binary_search(&a).unwrap();
    let domains: Vec<Vec<usize>> = m.domains.iter().map(|d| d.iter().map(|&a| pos(a)).collect()).collect();
    let mut g = make_difference(universe.len());
    g.labels = universe.iter().map(|a| a.to_string()).collect();
    let grid = assemble(&make_linear(m.instants()), &g, &domains, m.mode.tag()).expect("validated model");
    let mut model = Model::on_grid(grid);
    for (p, s) in &m.preds {
        model.declare(p);
        for &(t, a) in s {
            let w = model.at(t, pos(a)).unwrap();
            model.set(p, w);
        }
    }
    model
}

/// Reads a grid model on `<T, <>` back as a first-order temporal model.
pub fn undagger(model: &Model) -> Result<FoltlModel, FoltlModelError> {
    let layout = model.layout.as_ref().ok_or(FoltlModelError::NotAGrid)?;
    let elem = |v: usize| layout.vertical.labels[v].parse::<usize>().unwrap_or(v);
    let domains: Vec<BTreeSet<usize>> =
        (0..layout.horizontal.len()).map(|t| layout.domain(t).into_iter().map(elem).collect()).collect();
    let mut preds = BTreeMap::new();
    for (p, s) in &model.val {
        let set: BTreeSet<(usize, usize)> = s
            .ones()
            .map(|w| {
                let (t, v) = layout.coords[w];
                (t, elem(v))
            })
            .collect();
        preds.insert(p.clone(), set);
    }
    FoltlModel::new(DomainMode::from_tag(layout.tag), domains, preds)
}
