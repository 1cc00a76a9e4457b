use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::{Witness, WitnessError, WitnessKind, WitnessSpec};
use crate::frames::{make_difference, make_linear, make_omega_plus_one_reversed, product, Frame, Relation};
use crate::machines::{Machine, Op, Run, Semantics, StateId};
use crate::reductions::names;
use crate::semantics::Model;

/// Builds the witness model for `spec`, with the root set.
pub fn build(spec: &WitnessSpec) -> Result<Witness, WitnessError> {
    check_runs(spec)?;
    let m = &spec.machine;
    Ok(match spec.kind {
        WitnessKind::FwFin => forward(m, &spec.runs[0], spec.runs[0].len(), true),
        WitnessKind::FwRec => forward(m, &spec.runs[0], spec.k, false),
        WitnessKind::BwInf => backward(m, &spec.runs[0], spec.k, None),
        WitnessKind::BwRec => backward(m, &spec.runs[0], spec.k, spec.qr),
        WitnessKind::Dense => dense(m, &spec.runs[0], spec.k, spec.width),
        WitnessKind::LossyExp => lossy_exp(m, &spec.runs, spec.qr.expect("checked")),
        WitnessKind::LossyFin => lossy_fin(m, &spec.runs[0]),
    })
}

fn check_runs(spec: &WitnessSpec) -> Result<(), WitnessError> {
    let kind = spec.kind;
    let m = &spec.machine;
    if kind == WitnessKind::LossyExp {
        if spec.runs.is_empty() {
            return Err(WitnessError::RunCount { kind, need: "at least 1".into(), got: 0 });
        }
    } else if spec.runs.len() != 1 {
        return Err(WitnessError::RunCount { kind, need: "exactly 1".into(), got: spec.runs.len() });
    }
    if kind == WitnessKind::Dense && spec.width == 0 {
        return Err(WitnessError::Width);
    }
    let sem = kind.semantics();
    let sem_name = if sem == Semantics::Reliable { "reliable" } else { "lossy" };
    let q0 = spec.runs[0].configs.first().map(|c| c.state);
    for (index, run) in spec.runs.iter().enumerate() {
        if run.configs.is_empty() {
            return Err(WitnessError::TooShort { kind, k: spec.k, need: 1, got: 0 });
        }
        run.validate(m, sem).map_err(|step| WitnessError::InvalidRun { index, step, sem: sem_name })?;
        if run.configs[0].counters.iter().any(|&c| c != 0) {
            return Err(WitnessError::NonZeroStart { index });
        }
        if Some(run.configs[0].state) != q0 {
            return Err(WitnessError::MixedStarts);
        }
    }
    let need = spec.required_len();
    let got = spec.runs[0].len();
    if got < need || (kind != WitnessKind::FwFin && kind != WitnessKind::LossyFin && kind != WitnessKind::LossyExp && spec.k == 0) {
        return Err(WitnessError::TooShort { kind, k: spec.k, need: need.max(1), got });
    }
    match kind {
        WitnessKind::FwFin | WitnessKind::LossyFin => {
            let qr = spec.qr.ok_or(WitnessError::MissingTarget(kind))?;
            if spec.runs[0].configs.last().map(|c| c.state) != Some(qr) {
                return Err(WitnessError::MissedTarget { index: 0 });
            }
        }
        WitnessKind::BwRec | WitnessKind::FwRec | WitnessKind::LossyExp => {
            spec.qr.ok_or(WitnessError::MissingTarget(kind))?;
        }
        _ => {}
    }
    if kind == WitnessKind::LossyExp {
        let qr = spec.qr.unwrap();
        for (index, run) in spec.runs.iter().enumerate() {
            if visits(run, qr).len() < index + 1 {
                return Err(WitnessError::TooFewVisits { index, need: index + 1 });
            }
        }
    }
    Ok(())
}

/// Positions `j >= 1` at which `run` is in state `q`.
fn visits(run: &Run, q: StateId) -> Vec<usize> {
    (1..run.len()).filter(|&j| run.configs[j].state == q).collect()
}

struct Builder {
    model: Model,
    h: usize,
    v: usize,
}

impl Builder {
    fn new(horizontal: &Frame, vertical: &Frame) -> Self {
        let g = product(horizontal, vertical);
        Builder { model: Model::on_grid(g), h: horizontal.len(), v: vertical.len() }
    }

    fn set(&mut self, p: &str, h: usize, v: usize) {
        if let Some(w) = self.model.at(h, v) {
            self.model.set(p, w);
        }
    }

    fn declare_machine(&mut self, m: &Machine) {
        for p in [names::S, names::N] {
            self.model.declare(p);
        }
        for q in &m.states {
            self.model.declare(&names::state(q));
        }
    }

    fn world(&self, h: usize, v: usize) -> usize {
        self.model.at(h, v).expect("coordinates inside the carrier")
    }

    /// Worlds whose column satisfies `col` or whose row satisfies `row`.
    fn edge(&self, col: impl Fn(usize) -> bool, row: impl Fn(usize) -> bool) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.model.len());
        for w in 0..self.model.len() {
            let (h, v) = self.model.coords(w).unwrap();
            if col(h) || row(v) {
                s.insert(w);
            }
        }
        s
    }

    fn finish(mut self, root: (usize, usize), kind: WitnessKind, boundary: FixedBitSet, note: String) -> Witness {
        debug_assert!(root.0 < self.h && root.1 < self.v);
        self.model.root = Some(self.world(root.0, root.1));
        Witness { kind, model: self.model, boundary, boundary_note: note }
    }
}

/// `rho_n(C+)` and `rho_n(C-)` of the forward witnesses, for `n < len`.
fn forward_counters(run: &Run, counters: usize, len: usize) -> Vec<Vec<(BTreeSet<usize>, BTreeSet<usize>)>> {
    let mut cur = vec![(BTreeSet::new(), BTreeSet::new()); counters];
    let mut out = vec![cur.clone()];
    for n in 0..len.saturating_sub(1) {
        match run.ops[n] {
            Op::Inc(i) => {
                cur[i].0.insert(n);
            }
            Op::Dec(i) => {
                let (p, m) = &mut cur[i];
                let least = *p.difference(m).next().expect("valid run decrements a positive counter");
                m.insert(least);
            }
            Op::Zero(_) => {}
        }
        out.push(cur.clone());
    }
    out
}

/// `M^rec` truncated to `len` columns, or `M^fin` when `finite`.
fn forward(m: &Machine, run: &Run, len: usize, finite: bool) -> Witness {
    let mut b = Builder::new(&make_linear(len), &make_difference(len + 1));
    b.declare_machine(m);
    for i in 0..m.counters {
        b.model.declare(&names::c_plus(i));
        b.model.declare(&names::c_minus(i));
    }
    for n in 0..len {
        b.set(names::S, n, n);
        b.set(&names::state(&m.states[run.configs[n].state]), n, n);
        b.set(names::N, n, n + 1);
    }
    let rho = forward_counters(run, m.counters, len);
    for (col, sets) in rho.iter().enumerate() {
        for (i, (p, mi)) in sets.iter().enumerate() {
            for &w in p {
                b.set(&names::c_plus(i), col, w);
            }
            for &w in mi {
                b.set(&names::c_minus(i), col, w);
            }
        }
    }
    if finite {
        b.model.declare(names::END);
        b.set(names::END, len - 1, len);
        let none = FixedBitSet::with_capacity(b.model.len());
        return b.finish((0, 0), WitnessKind::FwFin, none, "none (exact)".into());
    }
    let edge = b.edge(|h| h + 1 == len, |v| v == len);
    let note = format!("column {} or row {}", len - 1, len);
    b.finish((0, 0), WitnessKind::FwRec, edge, note)
}

/// `mu_m(C_i)` of the backward witness for `m <= len`.
fn backward_counters(run: &Run, counters: usize, len: usize) -> Vec<Vec<BTreeSet<usize>>> {
    let mut cur = vec![BTreeSet::new(); counters];
    let mut out = vec![cur.clone()];
    for n in 0..len {
        match run.ops[n] {
            Op::Inc(i) => {
                cur[i].insert(n);
            }
            Op::Dec(i) => {
                let least = *cur[i].iter().next().expect("valid run decrements a positive counter");
                cur[i].remove(&least);
            }
            Op::Zero(_) => {}
        }
        out.push(cur.clone());
    }
    out
}

/// `M^inf` on `<K+1 + top, >> x <K, !=>`, with the `Q`/`R` valuation of the
/// recurrence gadget when `qr` is given.
fn backward(m: &Machine, run: &Run, k: usize, qr: Option<StateId>) -> Witness {
    let horizontal = make_omega_plus_one_reversed(k);
    let top = k + 1;
    let mut b = Builder::new(&horizontal, &make_difference(k));
    b.declare_machine(m);
    for i in 0..m.counters {
        b.model.declare(&names::c(i));
    }
    for op in m.ops() {
        b.model.declare(&names::instr(op));
    }
    for n in 0..k {
        b.set(names::S, n, n);
        b.set(&names::state(&m.states[run.configs[n].state]), n, n);
        b.set(names::N, n + 1, n);
        if n + 1 < k {
            b.set(&names::instr(run.ops[n]), n + 1, n + 1);
        }
    }
    let mu = backward_counters(run, m.counters, k);
    for (col, sets) in mu.iter().enumerate() {
        for (i, set) in sets.iter().enumerate() {
            for &w in set {
                b.set(&names::c(i), col, w);
            }
        }
    }
    let kind = if let Some(qr) = qr {
        b.model.declare(names::Q);
        b.model.declare(names::R);
        for n in 0..k {
            if n % 2 == 1 {
                b.set(names::Q, n, n);
            }
            if let Some(kn) = (n + 1..k).find(|&j| run.configs[j].state == qr) {
                b.set(names::R, n, kn);
            }
        }
        WitnessKind::BwRec
    } else {
        WitnessKind::BwInf
    };
    let edge = b.edge(|h| h == k, |v| v + 1 == k);
    let note = format!("column {k} or row {}", k - 1);
    b.finish((top, 0), kind, edge, note)
}

/// Horizontal chain of the dense witness, bottom up: `x0`, then `width`
/// points per block `m < k` (the highest of block `m` is `x_{m+1}`), then
/// `top`. Every point sees all lower points.
fn dense_chain(k: usize, width: usize) -> Frame {
    let n = k * width + 2;
    let rel = Relation::from_pairs(n, (0..n).flat_map(|a| (0..a).map(move |b| (a, b))));
    let mut labels = vec!["x0".to_string()];
    for m in 0..k {
        for j in 0..width {
            labels.push(format!("b{m}.{j}"));
        }
    }
    labels.push("top".into());
    Frame { rel, labels }
}

/// The interval-widened backward witness of the tick construction.
fn dense(m: &Machine, run: &Run, k: usize, width: usize) -> Witness {
    let chain = dense_chain(k, width);
    let top = chain.len() - 1;
    // x0 is ~-equivalent to block 0, so it shares that block's valuation
    let block = |blk: usize| if blk == 0 { 0..1 + width } else { (1 + blk * width)..(1 + (blk + 1) * width) };
    let mut b = Builder::new(&chain, &make_difference(k));
    b.declare_machine(m);
    b.model.declare(names::TICK);
    let mu = backward_counters(run, m.counters, k);
    let in_c = |i: usize, col: usize, w: usize| mu[col][i].contains(&w);
    let mut cells: Vec<(String, usize, usize)> = Vec::new();
    for n in 0..=k {
        // mu(S), mu(S_q), mu(N), mu(I) on column n, as (name, column, row)
        if n < k {
            cells.push((names::S.to_string(), n, n));
            cells.push((names::state(&m.states[run.configs[n].state]), n, n));
        }
        if n >= 1 {
            cells.push((names::N.to_string(), n, n - 1));
            if n < k {
                cells.push((names::instr(run.ops[n - 1]), n, n));
            }
        }
    }
    for (p, col, row) in &cells {
        b.model.declare(p);
        b.model.declare(&names::primed(p));
        if *col < k {
            for x in block(*col) {
                b.set(p, x, *row);
            }
        }
        if *col >= 1 {
            for x in block(col - 1) {
                b.set(&names::primed(p), x, *row);
            }
        }
    }
    for i in 0..m.counters {
        let (c, cm) = (names::c(i), names::c_minus(i));
        let cmp = names::primed(&cm);
        for p in [&c, &cm, &cmp] {
            b.model.declare(p);
        }
        for blk in 0..k {
            for w in 0..k {
                let now = in_c(i, blk, w);
                let lost = blk > 0 && !now && in_c(i, blk - 1, w);
                let loses = now && !in_c(i, blk + 1, w);
                for x in block(blk) {
                    if now {
                        b.set(&c, x, w);
                    }
                    if lost {
                        b.set(&cm, x, w);
                    }
                    if loses {
                        b.set(&cmp, x, w);
                    }
                }
            }
        }
    }
    for blk in (0..k).filter(|blk| blk % 2 == 1) {
        for x in block(blk) {
            for w in 0..k {
                b.set(names::TICK, x, w);
            }
        }
    }
    // top is its own interval: its tick differs from the last block's
    if (k - 1) % 2 == 0 {
        for w in 0..k {
            b.set(names::TICK, top, w);
        }
    }
    let last = block(k - 1);
    let edge = b.edge(|h| last.contains(&h), |v| v + 1 == k);
    let note = format!("block {} or row {}", k - 1, k - 1);
    b.finish((top, 0), WitnessKind::Dense, edge, note)
}

/// Counter sets of one backward-running segment: `alpha_j` for each
/// configuration `j`, where an increment at step `j` adds `base - j`.
fn lossy_counters(run: &Run, counters: usize, base: usize) -> Vec<Vec<BTreeSet<usize>>> {
    let mut cur = vec![BTreeSet::new(); counters];
    let mut out = vec![cur.clone()];
    for j in 0..run.len() - 1 {
        for (i, set) in cur.iter_mut().enumerate() {
            let (a, c) = (run.configs[j].counters[i], run.configs[j + 1].counters[i]);
            if c == a + 1 {
                set.insert(base - j);
            } else {
                let drop: Vec<usize> = set.iter().take((a - c) as usize).copied().collect();
                for x in drop {
                    set.remove(&x);
                }
            }
        }
        out.push(cur.clone());
    }
    out
}

/// Places configuration `j` of `run` at column `base - j`.
fn place_segment(b: &mut Builder, m: &Machine, run: &Run, base: usize) {
    let alpha = lossy_counters(run, m.counters, base);
    for (j, cfg) in run.configs.iter().enumerate() {
        let col = base - j;
        b.set(&names::state(&m.states[cfg.state]), col, col);
        for (i, set) in alpha[j].iter().enumerate() {
            for &w in set {
                b.set(&names::c(i), col, w);
            }
        }
    }
}

/// The lossy omega-reachability witness: segment `n` holds `rho_n`
/// backward, delimited by `start` columns.
fn lossy_exp(m: &Machine, runs: &[Run], qr: StateId) -> Witness {
    let mut bases = vec![0usize];
    for r in runs {
        bases.push(bases.last().unwrap() + r.len());
    }
    let last = *bases.last().unwrap();
    let mut b = Builder::new(&make_linear(last + 1), &make_difference(last + 2));
    b.declare_machine(m);
    for p in [names::START, names::R, names::SSTAR] {
        b.model.declare(p);
    }
    for i in 0..m.counters {
        b.model.declare(&names::c(i));
    }
    for c in 0..=last {
        b.set(names::S, c, c);
        b.set(names::N, c, c + 1);
    }
    let q0 = runs[0].configs[0].state;
    b.set(&names::state(&m.states[q0]), 0, 0);
    for &base in &bases {
        for w in 0..b.v {
            b.set(names::START, base, w);
        }
    }
    let mut prev_stars: Vec<usize> = Vec::new();
    for (k, run) in runs.iter().enumerate() {
        let base = bases[k + 1];
        place_segment(&mut b, m, run, base);
        let mut stars: Vec<usize> = visits(run, qr).into_iter().take(k + 1).map(|j| base - j).collect();
        stars.sort_unstable();
        for &c in &stars {
            b.set(names::SSTAR, c, c);
        }
        let mut sources = vec![bases[k]];
        sources.extend(prev_stars.iter().copied());
        sources.sort_unstable();
        for (src, &dst) in sources.into_iter().zip(&stars) {
            b.set(names::R, src, dst);
        }
        prev_stars = stars;
    }
    let from = bases[bases.len() - 2];
    let edge = b.edge(|h| h > from, |v| v == last + 1);
    let note = format!("columns {}..={last} (last segment) or row {}", from + 1, last + 1);
    b.finish((0, 0), WitnessKind::LossyExp, edge, note)
}

/// One lossy run read backward from its start column `T-1` to column 0.
fn lossy_fin(m: &Machine, run: &Run) -> Witness {
    let t = run.len();
    let mut b = Builder::new(&make_linear(t), &make_difference(t + 1));
    b.declare_machine(m);
    for p in [names::START, names::END] {
        b.model.declare(p);
    }
    for i in 0..m.counters {
        b.model.declare(&names::c(i));
    }
    for c in 0..t {
        b.set(names::S, c, c);
        b.set(names::N, c, c + 1);
    }
    place_segment(&mut b, m, run, t - 1);
    for w in 0..=t {
        b.set(names::START, t - 1, w);
        b.set(names::END, t - 1, w);
    }
    let none = FixedBitSet::with_capacity(b.model.len());
    b.finish((0, 0), WitnessKind::LossyFin, none, "none (exact)".into())
}
