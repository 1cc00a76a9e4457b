//! Shrinking the vertical carriers of grid models.
//!
//! `cl_n(X)` closes a set of vertical points under witnesses for the
//! `<1>`-subformulas of `phi` true at instant `n`. Iterating it along the
//! horizontal order from the root's vertical point and restricting the
//! model gives a model with small vertical carriers that agrees with the
//! original on every subformula at every surviving point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::formula::Formula;
use crate::frames::{assemble, product, Frame, GridLayout, GridTag, Relation, World};
use crate::semantics::{Checker, Model};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FmpError {
    #[error("model has no grid layout")]
    NotAGrid,
    #[error("carrier mismatch: {0}")]
    Carrier(String),
    #[error("instant {instant} out of range")]
    Instant { instant: usize },
    #[error("point {point} is not in the domain of instant {instant}")]
    OutsideDomain { instant: usize, point: usize },
    #[error("inconsistent model: <1>{psi} holds at ({instant}, {point}) but no other point of the column has {psi}")]
    Inconsistent { instant: usize, point: usize, psi: String },
    #[error("closure at instant {instant} has {got} points, bound is {bound}")]
    Bound { instant: usize, got: usize, bound: usize },
    #[error("{psi} changes truth value at ({instant}, {point}) after shrinking")]
    NotPreserved { instant: usize, point: usize, psi: String },
}

/// One application of `cl_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureStep {
    pub instant: usize,
    pub input: Vec<usize>,
    pub output: Vec<usize>,
    /// `|input| + 2 |sub phi|`
    pub bound: usize,
}

/// Record of a shrinking: the per-instant sets in horizontal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTrace {
    pub tag: GridTag,
    pub subformulas: usize,
    /// Root vertical point the first closure starts from.
    pub seed: usize,
    pub steps: Vec<ClosureStep>,
    /// Vertical size before and after.
    pub before: usize,
    pub after: usize,
}

impl ClosureTrace {
    /// Points kept at `instant` (all of the last set for products).
    pub fn kept(&self, instant: usize) -> Option<&[usize]> {
        if self.tag == GridTag::Product {
            return self.steps.last().map(|s| s.output.as_slice());
        }
        self.steps.iter().find(|s| s.instant == instant).map(|s| s.output.as_slice())
    }

    /// `1 + 2 T |sub phi|`
    pub fn size_bound(&self) -> usize {
        1 + 2 * self.steps.len() * self.subformulas
    }
}

impl fmt::Display for ClosureTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "grid: {}", self.tag)?;
        writeln!(f, "subformulas: {}", self.subformulas)?;
        writeln!(f, "seed: {}", self.seed)?;
        for s in &self.steps {
            writeln!(
                f,
                "cl_{}: {{{}}} -> {{{}}} ({} <= {})",
                s.instant,
                show(&s.input),
                show(&s.output),
                s.output.len(),
                s.bound
            )?;
        }
        writeln!(f, "vertical size: {} -> {} (bound {})", self.before, self.after, self.size_bound())
    }
}

/// Truth sets of `sub phi` and the `<1>`-demands among them.
struct Demands {
    subs: Vec<Formula>,
    truth: Vec<FixedBitSet>,
    /// `(index of <1>psi, index of psi)`
    dia1: Vec<(usize, usize)>,
}

impl Demands {
    fn new(m: &Model, phi: &Formula) -> Self {
        let subs: Vec<Formula> = phi.subformulas().into_iter().collect();
        let index: BTreeMap<&Formula, usize> = subs.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut ck = Checker::new(m);
        let truth = subs.iter().map(|f| ck.eval(f).clone()).collect();
        let dia1 = subs
            .iter()
            .enumerate()
            .filter_map(|(i, f)| match f {
                Formula::Dia1(a) => Some((i, index[&**a])),
                _ => None,
            })
            .collect();
        Demands { subs, truth, dia1 }
    }
}

fn grid(m: &Model) -> Result<&GridLayout, FmpError> {
    m.layout.as_ref().ok_or(FmpError::NotAGrid)
}

fn closure(m: &Model, d: &Demands, n: usize, x: &[usize]) -> Result<Vec<usize>, FmpError> {
    let layout = grid(m)?;
    if n >= layout.horizontal.len() {
        return Err(FmpError::Instant { instant: n });
    }
    let vrel = &layout.vertical.rel;
    let domain = layout.domain(n);
    let at = |v: usize| layout.world_at(n, v).expect("in domain");
    let mut y: BTreeSet<usize> = BTreeSet::new();
    for &v in x {
        if layout.world_at(n, v).is_none() {
            return Err(FmpError::OutsideDomain { instant: n, point: v });
        }
        y.insert(v);
    }
    loop {
        let mut added = None;
        'search: for &v in &y {
            for &(dia, psi) in &d.dia1 {
                if !d.truth[dia].contains(at(v)) {
                    continue;
                }
                let ok = |u: usize| vrel.holds(v, u) && d.truth[psi].contains(at(u));
                if y.iter().any(|&u| ok(u)) {
                    continue;
                }
                let fresh = domain.iter().copied().find(|&u| ok(u)).ok_or_else(|| FmpError::Inconsistent {
                    instant: n,
                    point: v,
                    psi: d.subs[psi].to_string(),
                })?;
                added = Some(fresh);
                break 'search;
            }
        }
        match added {
            Some(u) => {
                y.insert(u);
            }
            None => break,
        }
    }
    let bound = x.iter().collect::<BTreeSet<_>>().len() + 2 * d.subs.len();
    if y.len() > bound {
        return Err(FmpError::Bound { instant: n, got: y.len(), bound });
    }
    Ok(y.into_iter().collect())
}

/// `cl_n(X)` for the vertical points `x` of instant `n`: the least superset
/// of `x` in the column that contains a witness for every `<1>psi` in
/// `sub phi` true at one of its points.
pub fn closure_step(m: &Model, n: usize, x: &[usize], phi: &Formula) -> Result<Vec<usize>, FmpError> {
    closure(m, &Demands::new(m, phi), n, x)
}

/// Horizontal worlds in the order of the strict linear order.
fn instants(h: &Frame) -> Result<Vec<usize>, FmpError> {
    if !h.rel.is_linear_order() || !h.rel.is_irreflexive() {
        return Err(FmpError::Carrier("horizontal frame is not a strict linear order".into()));
    }
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by_key(|&x| std::cmp::Reverse(h.rel.successors(x).count()));
    Ok(order)
}

fn is_difference(r: &Relation) -> bool {
    (0..r.len()).all(|a| (0..r.len()).all(|b| r.holds(a, b) == (a != b)))
}

/// Shrinks the vertical carrier(s) of a product or expanding model over a
/// finite strict linear order and difference verticals.
///
/// Returns the restricted model (root kept) and the trace. Truth of every
/// subformula of `phi` is checked at every surviving point.
pub fn shrink(m: &Model, phi: &Formula, root: World) -> Result<(Model, ClosureTrace), FmpError> {
    let layout = grid(m)?;
    let tag = layout.tag;
    if !matches!(tag, GridTag::Product | GridTag::Expanding) {
        return Err(FmpError::Carrier(format!("{tag:?} grids are not shrunk")));
    }
    if !is_difference(&layout.vertical.rel) {
        return Err(FmpError::Carrier("vertical frame is not a difference frame".into()));
    }
    let order = instants(&layout.horizontal)?;
    let d = Demands::new(m, phi);
    let (_, seed) = layout.coords[root];
    let first = order[0];
    if layout.world_at(first, seed).is_none() {
        return Err(FmpError::OutsideDomain { instant: first, point: seed });
    }
    let mut steps: Vec<ClosureStep> = Vec::new();
    let mut cur = vec![seed];
    for &n in &order {
        let out = closure(m, &d, n, &cur)?;
        steps.push(ClosureStep { instant: n, input: cur, output: out.clone(), bound: 0 });
        cur = out;
    }
    for s in &mut steps {
        s.bound = s.input.len() + 2 * d.subs.len();
    }
    let keep: Vec<usize> = cur.clone();
    let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let vertical = restrict_frame(&layout.vertical, &keep);
    let g = if tag == GridTag::Product {
        product(&layout.horizontal, &vertical)
    } else {
        let mut domains = vec![Vec::new(); layout.horizontal.len()];
        for s in &steps {
            domains[s.instant] = s.output.iter().map(|v| remap[v]).collect();
        }
        assemble(&layout.horizontal, &vertical, &domains, GridTag::Expanding)
            .map_err(|e| FmpError::Carrier(e.to_string()))?
    };
    let mut out = Model::on_grid(g);
    let back = |w2: World| {
        let (h, v) = out.layout.as_ref().expect("grid").coords[w2];
        layout.world_at(h, keep[v]).expect("kept point")
    };
    let pairs: Vec<(World, World)> = (0..out.len()).map(|w2| (w2, back(w2))).collect();
    for (p, set) in &m.val {
        out.declare(p);
        for &(w2, w) in &pairs {
            if set.contains(w) {
                out.set(p, w2);
            }
        }
    }
    let (rh, rv) = layout.coords[root];
    out.root = out.at(rh, remap[&rv]);
    let mut ck = Checker::new(&out);
    for (f, before) in d.subs.iter().zip(&d.truth) {
        let after = ck.eval(f);
        for &(w2, w) in &pairs {
            if after.contains(w2) != before.contains(w) {
                let (instant, point) = layout.coords[w];
                return Err(FmpError::NotPreserved { instant, point, psi: f.to_string() });
            }
        }
    }
    let trace = ClosureTrace {
        tag,
        subformulas: d.subs.len(),
        seed,
        steps,
        before: layout.vertical.len(),
        after: keep.len(),
    };
    Ok((out, trace))
}

fn restrict_frame(f: &Frame, keep: &[usize]) -> Frame {
    let n = keep.len();
    let rel = Relation::from_pairs(
        n,
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| f.rel.holds(keep[i], keep[j])),
    );
    Frame { rel, labels: keep.iter().map(|&v| f.labels[v].clone()).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::frames::{make_difference, make_linear};

    fn grid_model(h: usize, v: usize) -> Model {
        let mut m = Model::on_grid(product(&make_linear(h), &make_difference(v)));
        m.root = Some(0);
        m
    }

    #[test]
    fn least_id_witness() {
        let mut m = grid_model(1, 4);
        for v in [1, 2] {
            let w = m.at(0, v).unwrap();
            m.set("P", w);
        }
        let phi = parse("<1> P").unwrap();
        // 1 is added for 0, then 2 for 1
        assert_eq!(closure_step(&m, 0, &[0], &phi).unwrap(), vec![0, 1, 2]);
        // already closed
        assert_eq!(closure_step(&m, 0, &[1, 2], &phi).unwrap(), vec![1, 2]);
        // no <1> subformula
        assert_eq!(closure_step(&m, 0, &[3], &parse("<0> P & Q").unwrap()).unwrap(), vec![3]);
    }

    #[test]
    fn prefers_included_witness() {
        let mut m = grid_model(1, 5);
        for v in [1, 2, 3] {
            let w = m.at(0, v).unwrap();
            m.set("P", w);
        }
        let phi = parse("<1> P").unwrap();
        assert_eq!(closure_step(&m, 0, &[0, 2, 3], &phi).unwrap(), vec![0, 2, 3]);
        assert_eq!(closure_step(&m, 0, &[3], &phi).unwrap(), vec![1, 3]);
    }

    #[test]
    fn product_shrink_respects_bound() {
        let mut m = grid_model(2, 10);
        for (h, v) in [(0, 7), (0, 8), (1, 9)] {
            let w = m.at(h, v).unwrap();
            m.set("P", w);
        }
        let phi = parse("<1> P").unwrap();
        let root = m.root.unwrap();
        assert!(Checker::new(&m).holds(root, &phi));
        let (small, trace) = shrink(&m, &phi, root).unwrap();
        assert!(trace.after <= 1 + 2 * 2 * 2, "{trace}");
        assert!(Checker::new(&small).holds(small.root.unwrap(), &phi));
        assert_eq!(trace.kept(0), Some(&[0, 7, 8, 9][..]));
    }

    #[test]
    fn small_carrier_is_kept() {
        let m = grid_model(2, 1);
        let phi = parse("P").unwrap();
        let (small, trace) = shrink(&m, &phi, 0).unwrap();
        assert_eq!(small.len(), m.len());
        assert_eq!(trace.after, 1);
    }

    #[test]
    fn inconsistent_demand_is_reported() {
        let mut m = grid_model(1, 2);
        let w = m.at(0, 0).unwrap();
        m.set("P", w);
        // a hand-made truth table that claims <1>P at the P point itself
        let phi = parse("<1> P").unwrap();
        let mut d = Demands::new(&m, &phi);
        d.truth[d.dia1[0].0].insert(w);
        assert!(matches!(closure(&m, &d, 0, &[0]), Err(FmpError::Inconsistent { .. })));
    }

    #[test]
    fn rejects_other_carriers() {
        let m = Model::on_grid(product(&make_difference(2), &make_difference(2)));
        assert!(matches!(shrink(&m, &parse("P").unwrap(), 0), Err(FmpError::Carrier(_))));
    }
}
