//! Unimodal frames, 2-frames and grid-shaped 2-frames.

mod tick;

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub use tick::{derive_tick_structure, tick_formula, TickError, TickStructure};

pub type World = usize;

/// A binary relation on `0..n`, stored as successor bitsets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Relation {
    succ: Vec<FixedBitSet>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation { succ: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (World, World)>) -> Self {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.insert(a, b);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn insert(&mut self, a: World, b: World) {
        self.succ[a].insert(b);
    }

    pub fn remove(&mut self, a: World, b: World) {
        self.succ[a].set(b, false);
    }

    pub fn holds(&self, a: World, b: World) -> bool {
        self.succ[a].contains(b)
    }

    pub fn successors(&self, a: World) -> impl Iterator<Item = World> + '_ {
        self.succ[a].ones()
    }

    pub fn successor_set(&self, a: World) -> &FixedBitSet {
        &self.succ[a]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (World, World)> + '_ {
        (0..self.len()).flat_map(move |a| self.successors(a).map(move |b| (a, b)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(|s| s.count_ones(..)).sum()
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.len()).all(|x| self.holds(x, x))
    }

    pub fn is_irreflexive(&self) -> bool {
        (0..self.len()).all(|x| !self.holds(x, x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.holds(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        (0..self.len()).all(|x| {
            self.successors(x).all(|y| self.succ[y].is_subset(&self.succ[x]))
        })
    }

    /// `x R y & x R z -> y R z | y = z | z R y`
    pub fn is_weakly_connected(&self) -> bool {
        (0..self.len()).all(|x| {
            self.successors(x).all(|y| {
                self.successors(x).all(|z| y == z || self.holds(y, z) || self.holds(z, y))
            })
        })
    }

    pub fn is_weak_order(&self) -> bool {
        self.is_transitive() && self.is_weakly_connected()
    }

    /// Symmetric and `x R y R z -> x = z | x R z`.
    pub fn is_pseudo_equivalence(&self) -> bool {
        self.is_symmetric()
            && (0..self.len()).all(|x| {
                self.successors(x)
                    .all(|y| self.successors(y).all(|z| x == z || self.holds(x, z)))
            })
    }

    /// Strict (irreflexive) linear order.
    pub fn is_linear_order(&self) -> bool {
        self.is_irreflexive()
            && self.is_transitive()
            && (0..self.len())
                .all(|x| (0..self.len()).all(|y| x == y || self.holds(x, y) || self.holds(y, x)))
    }

    /// Every non-empty subset has an `R`-least element. On a finite strict
    /// linear order this reduces to acyclicity, which transitivity plus
    /// irreflexivity already give.
    pub fn is_well_order(&self) -> bool {
        self.is_linear_order() && self.is_acyclic()
    }

    pub fn is_acyclic(&self) -> bool {
        self.longest_paths().iter().all(|r| *r != Rank::Infinite)
    }

    /// No world `w` whose strict predecessors (those `x` with `x R w` but
    /// not `w R x`) carry an infinite walk with distinct consecutive
    /// elements. On a finite frame such a walk exists iff the restriction
    /// of `R` (minus loops) to those predecessors has a cycle.
    pub fn is_modally_discrete(&self) -> bool {
        let n = self.len();
        for w in 0..n {
            let pred: Vec<bool> = (0..n).map(|x| self.holds(x, w) && !self.holds(w, x)).collect();
            let mut sub = Relation::empty(n);
            for (a, b) in self.pairs() {
                if a != b && pred[a] && pred[b] {
                    sub.insert(a, b);
                }
            }
            if !sub.is_acyclic() {
                return false;
            }
        }
        true
    }

    pub fn is_dense(&self) -> bool {
        self.pairs().all(|(x, y)| self.successors(x).any(|z| self.holds(z, y)))
    }

    /// Worlds reachable from `r` in zero or more steps.
    pub fn reachable(&self, r: World) -> FixedBitSet {
        let mut seen = FixedBitSet::with_capacity(self.len());
        seen.insert(r);
        let mut stack = vec![r];
        while let Some(x) = stack.pop() {
            for y in self.successors(x) {
                if !seen.put(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn roots(&self) -> Vec<World> {
        (0..self.len()).filter(|&r| self.reachable(r).count_ones(..) == self.len()).collect()
    }

    /// Length of the longest path starting at each world.
    pub fn longest_paths(&self) -> Vec<Rank> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let n = self.len();
        let mut mark = vec![Mark::New; n];
        let mut rank = vec![Rank::Finite(0); n];
        for start in 0..n {
            if mark[start] != Mark::New {
                continue;
            }
            // iterative DFS; the frame carries the successor list position
            let mut stack: Vec<(World, Vec<World>, usize)> = Vec::new();
            mark[start] = Mark::Open;
            stack.push((start, self.successors(start).collect(), 0));
            while let Some(top) = stack.last_mut() {
                let (x, ref succ, ref mut i) = *top;
                if *i < succ.len() {
                    let y = succ[*i];
                    *i += 1;
                    match mark[y] {
                        Mark::New => {
                            mark[y] = Mark::Open;
                            let s = self.successors(y).collect();
                            stack.push((y, s, 0));
                        }
                        Mark::Open => rank[x] = Rank::Infinite,
                        Mark::Done => {}
                    }
                } else {
                    let mut r = rank[x];
                    for &y in succ {
                        r = r.max(rank[y].succ());
                    }
                    rank[x] = r;
                    mark[x] = Mark::Done;
                    stack.pop();
                }
            }
        }
        rank
    }
}

/// Length of a longest path; `Infinite` when a cycle is reachable.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Rank {
    Finite(usize),
    Infinite,
}

impl Rank {
    fn succ(self) -> Rank {
        match self {
            Rank::Finite(k) => Rank::Finite(k + 1),
            Rank::Infinite => Rank::Infinite,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(k) => write!(f, "{k}"),
            Rank::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FrameProperty {
    WeakOrder,
    PseudoEquivalence,
    LinearOrder,
    WellOrder,
    ModallyDiscrete,
    Dense,
    Rooted,
}

impl FrameProperty {
    pub fn holds(self, r: &Relation) -> bool {
        match self {
            FrameProperty::WeakOrder => r.is_weak_order(),
            FrameProperty::PseudoEquivalence => r.is_pseudo_equivalence(),
            FrameProperty::LinearOrder => r.is_linear_order(),
            FrameProperty::WellOrder => r.is_well_order(),
            FrameProperty::ModallyDiscrete => r.is_modally_discrete(),
            FrameProperty::Dense => r.is_dense(),
            FrameProperty::Rooted => !r.roots().is_empty(),
        }
    }
}

/// A unimodal frame with printable world labels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Frame {
    pub rel: Relation,
    pub labels: Vec<String>,
}

impl Frame {
    pub fn new(rel: Relation) -> Self {
        let labels = (0..rel.len()).map(|i| i.to_string()).collect();
        Frame { rel, labels }
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn check(&self, p: FrameProperty) -> bool {
        p.holds(&self.rel)
    }
}

/// `<n, <>`: worlds `0..n`, `i R j` iff `i < j`.
pub fn make_linear(n: usize) -> Frame {
    Frame::new(Relation::from_pairs(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))))
}

/// `<n, !=>`: worlds `0..n`, `i R j` iff `i != j`.
pub fn make_difference(n: usize) -> Frame {
    Frame::new(Relation::from_pairs(
        n,
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))),
    ))
}

/// Truncation of the reversed `omega + 1`: worlds `0..=k` plus `top`
/// (index `k + 1`); `top` sees every number and `n R m` iff `n > m`.
pub fn make_omega_plus_one_reversed(k: usize) -> Frame {
    let top = k + 1;
    let mut rel = Relation::empty(k + 2);
    for n in 0..=k {
        rel.insert(top, n);
        for m in 0..n {
            rel.insert(n, m);
        }
    }
    let mut labels: Vec<String> = (0..=k).map(|i| i.to_string()).collect();
    labels.push("top".into());
    Frame { rel, labels }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TwoFrameProperty {
    /// `R0;R1 = R1;R0`
    Commute,
    /// `x R0 y & x R1 z -> exists u. y R1 u & z R0 u`
    Confluent,
    Horizontal(FrameProperty),
    Vertical(FrameProperty),
}

/// Successors of `x` as a word; only for relations on at most 64 worlds.
fn small_word(r: &Relation, x: World) -> u64 {
    r.successor_set(x).as_slice().first().map_or(0, |&w| w as u64)
}

fn word_ones(mut w: u64) -> impl Iterator<Item = World> {
    std::iter::from_fn(move || {
        (w != 0).then(|| {
            let i = w.trailing_zeros() as World;
            w &= w - 1;
            i
        })
    })
}

/// A frame with two accessibility relations over the same worlds.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwoFrame {
    pub r0: Relation,
    pub r1: Relation,
    pub labels: Vec<String>,
}

impl TwoFrame {
    pub fn new(r0: Relation, r1: Relation) -> Self {
        assert_eq!(r0.len(), r1.len(), "relations over different world sets");
        let labels = (0..r0.len()).map(|i| i.to_string()).collect();
        TwoFrame { r0, r1, labels }
    }

    pub fn len(&self) -> usize {
        self.r0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r0.is_empty()
    }

    pub fn rel(&self, i: u8) -> &Relation {
        if i == 0 { &self.r0 } else { &self.r1 }
    }

    pub fn world_by_label(&self, label: &str) -> Option<World> {
        self.labels.iter().position(|l| l == label)
    }

    /// `x R_a y R_b z -> exists u. x R_b u R_a z`
    fn swaps(&self, a: &Relation, b: &Relation) -> bool {
        if self.len() <= 64 {
            return (0..self.len()).all(|x| {
                let via_b = word_ones(small_word(b, x)).fold(0u64, |acc, u| acc | small_word(a, u));
                word_ones(small_word(a, x)).all(|y| small_word(b, y) & !via_b == 0)
            });
        }
        (0..self.len()).all(|x| {
            let mut via_b = FixedBitSet::with_capacity(self.len());
            for u in b.successors(x) {
                via_b.union_with(a.successor_set(u));
            }
            a.successors(x).all(|y| b.successor_set(y).is_subset(&via_b))
        })
    }

    pub fn commute(&self) -> bool {
        self.swaps(&self.r0, &self.r1) && self.swaps(&self.r1, &self.r0)
    }

    pub fn confluent(&self) -> bool {
        if self.len() <= 64 {
            return (0..self.len()).all(|x| {
                word_ones(small_word(&self.r0, x)).all(|y| {
                    let above = small_word(&self.r1, y);
                    word_ones(small_word(&self.r1, x)).all(|z| above & small_word(&self.r0, z) != 0)
                })
            });
        }
        (0..self.len()).all(|x| {
            self.r0.successors(x).all(|y| {
                self.r1
                    .successors(x)
                    .all(|z| !self.r1.successor_set(y).is_disjoint(self.r0.successor_set(z)))
            })
        })
    }

    pub fn check(&self, p: TwoFrameProperty) -> bool {
        match p {
            TwoFrameProperty::Commute => self.commute(),
            TwoFrameProperty::Confluent => self.confluent(),
            TwoFrameProperty::Horizontal(q) => q.holds(&self.r0),
            TwoFrameProperty::Vertical(q) => q.holds(&self.r1),
        }
    }

    /// Longest `R0`-path from `w`.
    pub fn horizontal_rank(&self, w: World) -> Rank {
        self.r0.longest_paths()[w]
    }

    pub fn horizontal_ranks(&self) -> Vec<Rank> {
        self.r0.longest_paths()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GridTag {
    Product,
    Expanding,
    Decreasing,
    /// Arbitrary domains (no inclusion between columns).
    Free,
}

impl fmt::Display for GridTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridTag::Product => "product",
            GridTag::Expanding => "expanding",
            GridTag::Decreasing => "decreasing",
            GridTag::Free => "free",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("domain of column {x} is not contained in the domain of column {y} although {x} R {y} ({mode} frame)")]
    Inclusion { x: usize, y: usize, mode: GridTag },
    #[error("column {0} has an empty domain")]
    EmptyDomain(usize),
    #[error("expected {expected} domains, got {got}")]
    DomainCount { expected: usize, got: usize },
    #[error("vertical world {0} out of range")]
    VerticalRange(usize),
}

/// Coordinates of the worlds of a grid-shaped 2-frame.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridLayout {
    pub tag: GridTag,
    pub horizontal: Frame,
    pub vertical: Frame,
    /// `coords[w] = (h, v)`
    pub coords: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), World>,
}

impl GridLayout {
    pub fn new(tag: GridTag, horizontal: Frame, vertical: Frame, coords: Vec<(usize, usize)>) -> Self {
        let index = coords.iter().enumerate().map(|(w, &c)| (c, w)).collect();
        GridLayout { tag, horizontal, vertical, coords, index }
    }

    pub fn world_at(&self, h: usize, v: usize) -> Option<World> {
        self.index.get(&(h, v)).copied()
    }

    pub fn column(&self, h: usize) -> Vec<World> {
        (0..self.coords.len()).filter(|&w| self.coords[w].0 == h).collect()
    }

    pub fn domain(&self, h: usize) -> Vec<usize> {
        self.column(h).into_iter().map(|w| self.coords[w].1).collect()
    }

    pub fn coord_label(&self, w: World) -> String {
        let (h, v) = self.coords[w];
        format!("({}, {})", self.horizontal.labels[h], self.vertical.labels[v])
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridTwoFrame {
    pub frame: TwoFrame,
    pub layout: GridLayout,
}

impl GridTwoFrame {
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn world_at(&self, h: usize, v: usize) -> Option<World> {
        self.layout.world_at(h, v)
    }

    pub fn coords(&self, w: World) -> (usize, usize) {
        self.layout.coords[w]
    }
}

/// Product of two unimodal frames; worlds are ordered column by column.
pub fn product(f: &Frame, g: &Frame) -> GridTwoFrame {
    let domains = vec![(0..g.len()).collect::<Vec<_>>(); f.len()];
    assemble_unchecked(f, g, &domains, GridTag::Product)
}

/// Builds the 2-frame with columns `domains[x]` (subsets of the vertical
/// frame's worlds) over the horizontal frame `f`; each column carries the
/// restriction of `g`.
pub fn assemble(
    f: &Frame,
    g: &Frame,
    domains: &[Vec<usize>],
    tag: GridTag,
) -> Result<GridTwoFrame, FrameError> {
    if domains.len() != f.len() {
        return Err(FrameError::DomainCount { expected: f.len(), got: domains.len() });
    }
    let sets: Vec<FixedBitSet> = domains
        .iter()
        .enumerate()
        .map(|(x, d)| {
            if d.is_empty() {
                return Err(FrameError::EmptyDomain(x));
            }
            let mut s = FixedBitSet::with_capacity(g.len());
            for &v in d {
                if v >= g.len() {
                    return Err(FrameError::VerticalRange(v));
                }
                s.insert(v);
            }
            Ok(s)
        })
        .collect::<Result<_, _>>()?;
    for (x, y) in f.rel.pairs() {
        let ok = match tag {
            GridTag::Product => sets[x] == sets[y],
            GridTag::Expanding => sets[x].is_subset(&sets[y]),
            GridTag::Decreasing => sets[y].is_subset(&sets[x]),
            GridTag::Free => true,
        };
        if !ok {
            let (x, y) = if tag == GridTag::Decreasing { (y, x) } else { (x, y) };
            return Err(FrameError::Inclusion { x, y, mode: tag });
        }
    }
    Ok(assemble_unchecked(f, g, domains, tag))
}

fn assemble_unchecked(f: &Frame, g: &Frame, domains: &[Vec<usize>], tag: GridTag) -> GridTwoFrame {
    let mut coords = Vec::new();
    for (x, d) in domains.iter().enumerate() {
        let mut d = d.clone();
        d.sort_unstable();
        d.dedup();
        coords.extend(d.into_iter().map(|v| (x, v)));
    }
    let layout = GridLayout::new(tag, f.clone(), g.clone(), coords);
    let n = layout.coords.len();
    let mut r0 = Relation::empty(n);
    let mut r1 = Relation::empty(n);
    for (w, &(x, u)) in layout.coords.iter().enumerate() {
        for y in f.rel.successors(x) {
            if let Some(w2) = layout.world_at(y, u) {
                r0.insert(w, w2);
            }
        }
        for v in g.rel.successors(u) {
            if let Some(w2) = layout.world_at(x, v) {
                r1.insert(w, w2);
            }
        }
    }
    let labels = layout
        .coords
        .iter()
        .map(|&(x, u)| format!("{}_{}", f.labels[x], g.labels[u]))
        .collect();
    GridTwoFrame { frame: TwoFrame { r0, r1, labels }, layout }
}
