//! Bounded satisfiability over finite frame classes.
//!
//! Candidate frames are enumerated up to isomorphism in order of total
//! world count, then lexicographically by their description. For each
//! candidate the truth of every subformula at every world is encoded as a
//! clause set and handed to the CDCL solver; decisions are thus made on
//! valuation bits and on subformula labels, with unit propagation through
//! the labelling constraints.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use super::dag::{Dag, Node};
use super::sat::{Lit, SolveResult, Solver};
use super::{Checker, Model};
use crate::formula::Formula;
use crate::frames::{
    assemble, make_difference, make_linear, make_omega_plus_one_reversed, product, GridTag,
    Relation, TwoFrame, World,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FrameClass {
    /// `<h, <> x <v, !=>`
    Product,
    /// `<h, <>` over nested `!=` domains (`W_x` grows to the right).
    Expanding,
    /// `<h, <>` over shrinking `!=` domains.
    Decreasing,
    /// Truncated reversed `omega + 1` (`k + 2` columns) times `<v, !=>`.
    OmegaTruncated,
    /// Arbitrary 2-frames with `R0` a weak order, `R1` a pseudo-equivalence
    /// and commuting relations; `max_worlds` (at most 4) bounds the size.
    Commuting,
    /// `<h, <>` over nested strict linear domains.
    ExpandingLinear,
}

impl FrameClass {
    pub fn name(self) -> &'static str {
        match self {
            FrameClass::Product => "product",
            FrameClass::Expanding => "expanding",
            FrameClass::Decreasing => "decreasing",
            FrameClass::OmegaTruncated => "omega",
            FrameClass::Commuting => "commuting",
            FrameClass::ExpandingLinear => "expanding-linear",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "product" => FrameClass::Product,
            "expanding" => FrameClass::Expanding,
            "decreasing" => FrameClass::Decreasing,
            "omega" => FrameClass::OmegaTruncated,
            "commuting" => FrameClass::Commuting,
            "expanding-linear" => FrameClass::ExpandingLinear,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Budget {
    pub max_candidates: Option<usize>,
    pub max_time: Option<Duration>,
    /// Solver conflicts allowed per candidate frame.
    pub max_conflicts: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct SearchSpec {
    pub class: FrameClass,
    pub max_h: usize,
    pub max_v: usize,
    /// Only used by [`FrameClass::Commuting`].
    pub max_worlds: usize,
    pub budget: Budget,
    pub jobs: usize,
}

impl SearchSpec {
    pub fn new(class: FrameClass, max_h: usize, max_v: usize) -> Self {
        SearchSpec { class, max_h, max_v, max_worlds: max_h * max_v, budget: Budget::default(), jobs: 1 }
    }
}

/// A candidate frame, described compactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Candidate {
    /// Horizontal `<h, <>` with domain sizes (prefix domains of `!=`).
    Sized { tag: GridTag, sizes: Vec<usize> },
    /// Truncated reversed `omega + 1` with parameter `k`, `v` rows.
    Omega { k: usize, v: usize },
    /// Horizontal `<h, <>`, nested linear domains given as bitmasks over
    /// the last domain `0..size`.
    Linear { masks: Vec<u32>, size: usize },
    Raw(TwoFrame),
}

impl Candidate {
    pub fn worlds(&self) -> usize {
        match self {
            Candidate::Sized { sizes, .. } => sizes.iter().sum(),
            Candidate::Omega { k, v } => (k + 2) * v,
            Candidate::Linear { masks, .. } => masks.iter().map(|m| m.count_ones() as usize).sum(),
            Candidate::Raw(f) => f.len(),
        }
    }

    pub fn build(&self) -> Model {
        match self {
            Candidate::Sized { tag, sizes } => {
                let h = sizes.len();
                let vmax = *sizes.iter().max().unwrap();
                let f = make_linear(h);
                let g = make_difference(vmax);
                if *tag == GridTag::Product {
                    return Model::on_grid(product(&f, &g));
                }
                let domains: Vec<Vec<usize>> = sizes.iter().map(|&k| (0..k).collect()).collect();
                Model::on_grid(assemble(&f, &g, &domains, *tag).expect("monotone domains"))
            }
            Candidate::Omega { k, v } => {
                Model::on_grid(product(&make_omega_plus_one_reversed(*k), &make_difference(*v)))
            }
            Candidate::Linear { masks, size } => {
                let f = make_linear(masks.len());
                let g = make_linear(*size);
                let domains: Vec<Vec<usize>> =
                    masks.iter().map(|m| (0..*size).filter(|i| m >> i & 1 == 1).collect()).collect();
                Model::on_grid(assemble(&f, &g, &domains, GridTag::Expanding).expect("nested domains"))
            }
            Candidate::Raw(f) => Model::new(f.clone()),
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::Sized { tag, sizes } => {
                if *tag == GridTag::Product {
                    write!(f, "product {}x{}", sizes.len(), sizes[0])
                } else {
                    write!(f, "{tag} {:?}", sizes)
                }
            }
            Candidate::Omega { k, v } => write!(f, "omega(k={k}) x {v}"),
            Candidate::Linear { masks, size } => {
                let parts: Vec<String> = masks.iter().map(|m| format!("{m:0size$b}")).collect();
                write!(f, "expanding-linear [{}]", parts.join(" "))
            }
            Candidate::Raw(fr) => {
                let r0: Vec<String> = fr.r0.pairs().map(|(a, b)| format!("{a}{b}")).collect();
                let r1: Vec<String> = fr.r1.pairs().map(|(a, b)| format!("{a}{b}")).collect();
                write!(f, "commuting n={} r0={{{}}} r1={{{}}}", fr.len(), r0.join(","), r1.join(","))
            }
        }
    }
}

/// All candidates of the class within the bounds, in search order.
pub fn enumerate_candidates(spec: &SearchSpec) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    match spec.class {
        FrameClass::Product => {
            for h in 1..=spec.max_h {
                for v in 1..=spec.max_v {
                    out.push(Candidate::Sized { tag: GridTag::Product, sizes: vec![v; h] });
                }
            }
        }
        FrameClass::Expanding | FrameClass::Decreasing => {
            let tag = if spec.class == FrameClass::Expanding { GridTag::Expanding } else { GridTag::Decreasing };
            for h in 1..=spec.max_h {
                for mut seq in monotone_sequences(h, spec.max_v) {
                    if tag == GridTag::Decreasing {
                        seq.reverse();
                    }
                    out.push(Candidate::Sized { tag, sizes: seq });
                }
            }
        }
        FrameClass::OmegaTruncated => {
            for k in 0..spec.max_h.saturating_sub(1) {
                for v in 1..=spec.max_v {
                    out.push(Candidate::Omega { k, v });
                }
            }
        }
        FrameClass::ExpandingLinear => {
            for h in 1..=spec.max_h {
                for size in 1..=spec.max_v {
                    for masks in nested_chains(h, size) {
                        out.push(Candidate::Linear { masks, size });
                    }
                }
            }
        }
        FrameClass::Commuting => {
            for n in 1..=spec.max_worlds.min(4) {
                out.extend(commuting_frames(n).into_iter().map(Candidate::Raw));
            }
        }
    }
    out.sort_by(|a, b| a.worlds().cmp(&b.worlds()).then_with(|| order_key(a).cmp(&order_key(b))));
    out
}

fn order_key(c: &Candidate) -> Vec<u64> {
    match c {
        Candidate::Sized { sizes, .. } => {
            let mut k = vec![sizes.len() as u64];
            k.extend(sizes.iter().map(|&s| s as u64));
            k
        }
        Candidate::Omega { k, v } => vec![*k as u64, *v as u64],
        Candidate::Linear { masks, size } => {
            let mut k = vec![masks.len() as u64, *size as u64];
            k.extend(masks.iter().map(|&m| m as u64));
            k
        }
        Candidate::Raw(_) => vec![],
    }
}

/// Non-decreasing sequences of length `h` over `1..=max`.
fn monotone_sequences(h: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(h: usize, lo: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == h {
            out.push(cur.clone());
            return;
        }
        for k in lo..=max {
            cur.push(k);
            go(h, k, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(h, 1, max, &mut Vec::new(), &mut out);
    out
}

/// Chains `m_0 <= m_1 <= ... <= m_{h-1} = full` of non-empty subsets of
/// `0..size`.
fn nested_chains(h: usize, size: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, upper: u32, chain: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == 0 {
            let mut c = chain.clone();
            c.reverse();
            out.push(c);
            return;
        }
        // enumerate non-empty submasks of `upper`
        let mut sub = upper;
        let mut subs = Vec::new();
        while sub != 0 {
            subs.push(sub);
            sub = (sub - 1) & upper;
        }
        subs.sort_unstable();
        for s in subs {
            chain.push(s);
            go(i - 1, s, chain, out);
            chain.pop();
        }
    }
    let full = if size == 32 { u32::MAX } else { (1u32 << size) - 1 };
    let mut out = Vec::new();
    go(h - 1, full, &mut vec![full], &mut out);
    out
}

/// Relation on `0..n` from a bitmask (bit `a * n + b` is `a R b`).
fn relation_from_bits(n: usize, bits: u32) -> Relation {
    Relation::from_pairs(n, (0..n * n).filter(|i| bits >> i & 1 == 1).map(|i| (i / n, i % n)))
}

fn permute_bits(n: usize, bits: u32, perm: &[usize]) -> u32 {
    let mut out = 0;
    for a in 0..n {
        for b in 0..n {
            if bits >> (a * n + b) & 1 == 1 {
                out |= 1 << (perm[a] * n + perm[b]);
            }
        }
    }
    out
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Pairwise non-isomorphic commuting 2-frames of size `n` with a weak
/// order and a pseudo-equivalence.
fn commuting_frames(n: usize) -> Vec<TwoFrame> {
    let total = 1u32 << (n * n);
    let mut weak = Vec::new();
    let mut pseudo = Vec::new();
    for bits in 0..total {
        let r = relation_from_bits(n, bits);
        if r.is_weak_order() {
            weak.push(bits);
        }
        if r.is_pseudo_equivalence() {
            pseudo.push(bits);
        }
    }
    let perms = permutations(n);
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for &a in &weak {
        for &b in &pseudo {
            let key = perms
                .iter()
                .map(|p| (permute_bits(n, a, p), permute_bits(n, b, p)))
                .min()
                .unwrap();
            if !seen.insert(key) {
                continue;
            }
            let f = TwoFrame::new(relation_from_bits(n, key.0), relation_from_bits(n, key.1));
            if f.commute() {
                out.push(f);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Found {
    pub model: Model,
    pub world: World,
    pub candidate: usize,
    pub description: String,
}

#[derive(Debug, Clone)]
pub struct ExhaustionReport {
    pub class: FrameClass,
    pub max_h: usize,
    pub max_v: usize,
    pub candidates: usize,
    pub elapsed: Duration,
}

impl fmt::Display for ExhaustionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no model in class {} within h <= {}, v <= {} ({} candidate frames)",
            self.class.name(),
            self.max_h,
            self.max_v,
            self.candidates
        )
    }
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Found(Found),
    /// Every candidate within the bounds was refuted. This is not a proof
    /// of unsatisfiability.
    Exhausted(ExhaustionReport),
}

#[derive(Debug, Clone, Error)]
pub enum SearchError {
    #[error("search budget exhausted after {tried} of {total} candidate frames")]
    Budget { tried: usize, total: usize, elapsed: Duration },
}

enum Step {
    Sat(Model),
    Unsat,
    Unknown,
}

/// Encodes "`f` holds somewhere" over the given frame.
fn solve_on(frame_model: &Model, dag: &Dag, max_conflicts: Option<u64>) -> Step {
    let fr = &frame_model.frame;
    let n = fr.len();
    let mut s = Solver::new();
    let truth = s.new_var();
    s.add_clause(&[Lit::pos(truth)]);
    let mut lits: Vec<Vec<Lit>> = Vec::with_capacity(dag.len());
    let mut var_lits: Vec<(String, Vec<Lit>)> = Vec::new();
    for node in &dag.nodes {
        let row: Vec<Lit> = match node {
            Node::Var(p) => {
                let row: Vec<Lit> = (0..n).map(|_| Lit::pos(s.new_var())).collect();
                var_lits.push((p.to_string(), row.clone()));
                row
            }
            Node::Top => vec![Lit::pos(truth); n],
            Node::Bot => vec![Lit::neg(truth); n],
            Node::Neg(a) => lits[*a].iter().map(|&l| !l).collect(),
            Node::And(a, b) => (0..n)
                .map(|w| {
                    let (la, lb) = (lits[*a][w], lits[*b][w]);
                    let x = Lit::pos(s.new_var());
                    s.add_clause(&[!x, la]);
                    s.add_clause(&[!x, lb]);
                    s.add_clause(&[x, !la, !lb]);
                    x
                })
                .collect(),
            Node::Dia(i, a) => {
                let rel = fr.rel(*i);
                (0..n)
                    .map(|w| {
                        let succ: Vec<Lit> = rel.successors(w).map(|u| lits[*a][u]).collect();
                        match succ.len() {
                            0 => Lit::neg(truth),
                            1 => succ[0],
                            _ => {
                                let x = Lit::pos(s.new_var());
                                let mut big = vec![!x];
                                big.extend(&succ);
                                s.add_clause(&big);
                                for &c in &succ {
                                    s.add_clause(&[x, !c]);
                                }
                                x
                            }
                        }
                    })
                    .collect()
            }
        };
        lits.push(row);
    }
    s.add_clause(&lits[dag.root]);
    match s.solve(max_conflicts) {
        SolveResult::Unsat => Step::Unsat,
        SolveResult::Unknown => Step::Unknown,
        SolveResult::Sat(assign) => {
            let mut m = frame_model.clone();
            for (p, row) in &var_lits {
                m.declare(p);
                for (w, l) in row.iter().enumerate() {
                    if assign[l.var() as usize] != l.is_neg() {
                        m.set(p, w);
                    }
                }
            }
            Step::Sat(m)
        }
    }
}

/// Searches the candidate frames of `spec` for a model of `f`.
///
/// The first satisfying candidate in enumeration order is returned (also
/// with several workers). Every returned model is re-checked with the
/// labelling checker.
pub fn bounded_sat(f: &Formula, spec: &SearchSpec) -> Result<SearchOutcome, SearchError> {
    let start = Instant::now();
    let candidates = enumerate_candidates(spec);
    let total = candidates.len();
    let limit = spec.budget.max_candidates.unwrap_or(usize::MAX).min(total);
    let dag = Dag::from_formula(f);
    let timed_out = AtomicBool::new(false);
    let gave_up = AtomicBool::new(false);

    let attempt = |idx: usize| -> Option<Found> {
        if spec.budget.max_time.is_some_and(|t| start.elapsed() > t) {
            timed_out.store(true, Ordering::Relaxed);
            return None;
        }
        let cand = &candidates[idx];
        let base = cand.build();
        match solve_on(&base, &dag, spec.budget.max_conflicts) {
            Step::Unsat => None,
            Step::Unknown => {
                gave_up.store(true, Ordering::Relaxed);
                None
            }
            Step::Sat(model) => {
                let world = Checker::new(&model)
                    .eval(f)
                    .ones()
                    .next()
                    .expect("solver model must satisfy the formula");
                let mut model = model;
                model.root = Some(world);
                Some(Found { model, world, candidate: idx, description: cand.to_string() })
            }
        }
    };

    let found = if spec.jobs <= 1 {
        (0..limit).find_map(|i| {
            if timed_out.load(Ordering::Relaxed) {
                return None;
            }
            attempt(i)
        })
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(spec.jobs).build().expect("thread pool");
        pool.install(|| (0..limit).into_par_iter().find_map_first(attempt))
    };
    if let Some(found) = found {
        return Ok(SearchOutcome::Found(found));
    }
    if limit < total || timed_out.load(Ordering::Relaxed) || gave_up.load(Ordering::Relaxed) {
        return Err(SearchError::Budget { tried: limit, total, elapsed: start.elapsed() });
    }
    Ok(SearchOutcome::Exhausted(ExhaustionReport {
        class: spec.class,
        max_h: spec.max_h,
        max_v: spec.max_v,
        candidates: total,
        elapsed: start.elapsed(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    #[test]
    fn candidate_counts() {
        assert_eq!(enumerate_candidates(&SearchSpec::new(FrameClass::Product, 2, 3)).len(), 6);
        // non-decreasing sequences over 1..=2 of length 1 and 2: 2 + 3
        assert_eq!(enumerate_candidates(&SearchSpec::new(FrameClass::Expanding, 2, 2)).len(), 5);
        // chains for h=2, size 2: 3 submasks of the full set
        let lin = enumerate_candidates(&SearchSpec::new(FrameClass::ExpandingLinear, 2, 2));
        assert_eq!(lin.len(), 1 + 1 + 1 + 3);
        let mut spec = SearchSpec::new(FrameClass::Commuting, 1, 1);
        spec.max_worlds = 2;
        let raw = enumerate_candidates(&spec);
        assert!(raw.iter().all(|c| matches!(c, Candidate::Raw(f) if f.commute())));
    }

    #[test]
    fn ordering_is_by_world_count() {
        let c = enumerate_candidates(&SearchSpec::new(FrameClass::Product, 3, 3));
        let sizes: Vec<usize> = c.iter().map(|c| c.worlds()).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(c[0].to_string(), "product 1x1");
    }

    #[test]
    fn finds_small_models() {
        let f = parse("<0> P & <1> ~P & [0][0] false").unwrap();
        let spec = SearchSpec::new(FrameClass::Product, 3, 3);
        match bounded_sat(&f, &spec).unwrap() {
            SearchOutcome::Found(found) => {
                assert!(super::super::check(&found.model, found.world, &f));
                assert_eq!(found.description, "product 2x2");
            }
            SearchOutcome::Exhausted(_) => panic!("satisfiable within bounds"),
        }
    }

    #[test]
    fn exhaustion_and_budget_are_distinct() {
        let f = parse("<0><0><0> true").unwrap();
        let spec = SearchSpec::new(FrameClass::Product, 3, 2);
        assert!(matches!(bounded_sat(&f, &spec).unwrap(), SearchOutcome::Exhausted(_)));
        let mut spec = SearchSpec::new(FrameClass::Product, 3, 2);
        spec.budget.max_candidates = Some(2);
        assert!(matches!(bounded_sat(&f, &spec), Err(SearchError::Budget { .. })));
    }

    #[test]
    fn parallel_search_agrees() {
        let f = parse("<0> P & <0> ~P & <1> Q & <1> ~Q").unwrap();
        let mut spec = SearchSpec::new(FrameClass::Product, 3, 3);
        let a = bounded_sat(&f, &spec).unwrap();
        spec.jobs = 3;
        let b = bounded_sat(&f, &spec).unwrap();
        match (a, b) {
            (SearchOutcome::Found(a), SearchOutcome::Found(b)) => {
                assert_eq!(a.candidate, b.candidate);
                assert_eq!(a.model, b.model);
            }
            _ => panic!("expected models"),
        }
    }
}
