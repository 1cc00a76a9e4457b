use thiserror::Error;

use super::WitnessKind;
use crate::frames::World;
use crate::machines::{Config, Machine, Run, Semantics, StateId};
use crate::reductions::{names, CompiledEncoding};
use crate::semantics::{Checker, Model};
use crate::formula::{boxm, bot};

/// A run read off a model, with the points it was read from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedRun {
    pub run: Run,
    /// `counts[m][i]` is the cardinality clause for counter `i` at step `m`.
    pub counts: Vec<Vec<u64>>,
    /// Staircase points carrying `S`, one per configuration (forward:
    /// the points `y_m`; backward: `u_m`). For lossy kinds these are in
    /// column order, so the run reads them right to left.
    pub staircase: Vec<World>,
    /// The `N` points (`v_m`).
    pub next: Vec<World>,
    /// Backward kinds only: the points `y_m` on the root's vertical line.
    pub lines: Vec<World>,
    /// Lossy kinds: number of `S*` points strictly inside the segment.
    pub sstar: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("model has no root")]
    NoRoot,
    #[error("cannot read q0/qr from target `{0}`")]
    Target(String),
    #[error("unknown state `{0}` in target")]
    UnknownState(String),
    #[error("step {m}: no {what}")]
    Missing { m: usize, what: &'static str },
    #[error("step {m}: expected exactly one state proposition at {world}, found [{}]", found.join(", "))]
    StateNotUnique { m: usize, world: String, found: Vec<String> },
    #[error("step {m}: {from} -> {to} is not a {sem} step; instructions at {from}: [{}]", candidates.join(", "))]
    BadStep { m: usize, from: String, to: String, sem: &'static str, candidates: Vec<String> },
    #[error("segment {segment}: run does not start in <{q0}, 0>, got {got}")]
    BadStart { segment: usize, q0: String, got: String },
    #[error("run ends in {got}, not in {want}")]
    MissedTarget { got: String, want: String },
    #[error("{0} models are not decoded")]
    Unsupported(WitnessKind),
}

/// `(q0, qr)` from an encoding target such as `fw_finite_reach(q0,h)`.
pub(crate) fn target_states(enc: &CompiledEncoding, m: &Machine) -> Result<(StateId, Option<StateId>), DecodeError> {
    let t = enc.target.trim();
    let bad = || DecodeError::Target(t.to_string());
    let open = t.find('(').ok_or_else(bad)?;
    let inner = t[open + 1..].strip_suffix(')').ok_or_else(bad)?;
    let mut parts = inner.split(',').map(str::trim);
    let id = |s: &str| m.state_id(s).map_err(|_| DecodeError::UnknownState(s.to_string()));
    let q0 = id(parts.next().ok_or_else(bad)?)?;
    let qr = parts.next().map(id).transpose()?;
    Ok((q0, qr))
}

struct Reader<'a> {
    model: &'a Model,
    machine: &'a Machine,
    ck: Checker<'a>,
}

impl<'a> Reader<'a> {
    fn new(model: &'a Model, machine: &'a Machine) -> Self {
        Reader { model, machine, ck: Checker::new(model) }
    }

    fn has(&self, p: &str, w: World) -> bool {
        self.model.holds_var(p, w)
    }

    fn succ(&self, i: u8, w: World) -> Vec<World> {
        self.model.frame.rel(i).successors(w).collect()
    }

    fn r(&self, i: u8, a: World, b: World) -> bool {
        self.model.frame.rel(i).holds(a, b)
    }

    /// `w` together with its vertical successors.
    fn column(&self, w: World) -> Vec<World> {
        let mut c = vec![w];
        c.extend(self.succ(1, w).into_iter().filter(|&x| x != w));
        c
    }

    fn state_at(&self, m: usize, w: World) -> Result<StateId, DecodeError> {
        let found: Vec<StateId> =
            (0..self.machine.states.len()).filter(|&q| self.has(&names::state(&self.machine.states[q]), w)).collect();
        if found.len() != 1 {
            return Err(DecodeError::StateNotUnique {
                m,
                world: self.model.world_name(w),
                found: found.iter().map(|&q| self.machine.states[q].clone()).collect(),
            });
        }
        Ok(found[0])
    }

    fn count(&self, col: &[World], pred: impl Fn(World) -> bool) -> u64 {
        col.iter().filter(|&&x| pred(x)).count() as u64
    }

    fn fw_counts(&self, col: &[World]) -> Vec<u64> {
        (0..self.machine.counters)
            .map(|i| {
                let (p, n) = (names::c_plus(i), names::c_minus(i));
                self.count(col, |x| self.has(&p, x) && !self.has(&n, x))
            })
            .collect()
    }

    fn c_counts(&self, col: &[World]) -> Vec<u64> {
        (0..self.machine.counters).map(|i| self.count(col, |x| self.has(&names::c(i), x))).collect()
    }

    /// Follows the forward staircase from the root. Returns the `S` points
    /// and the `N` point chosen in each of their columns. With `finite`,
    /// stops at the first column whose `N` point carries `end`.
    fn forward_staircase(&self, finite: bool, max_len: usize) -> Result<(Vec<World>, Vec<World>), DecodeError> {
        let root = self.model.root.ok_or(DecodeError::NoRoot)?;
        if !self.has(names::S, root) {
            return Err(DecodeError::Missing { m: 0, what: "S at the root" });
        }
        let mut ys = vec![root];
        let mut ns = Vec::new();
        loop {
            let m = ys.len() - 1;
            let y = ys[m];
            let npts: Vec<World> = self.succ(1, y).into_iter().filter(|&x| self.has(names::N, x)).collect();
            if finite {
                if let Some(&e) = npts.iter().find(|&&x| self.has(names::END, x)) {
                    ns.push(e);
                    return Ok((ys, ns));
                }
            }
            if ys.len() >= max_len {
                return Ok((ys, ns));
            }
            let next = npts.iter().find_map(|&n| {
                let ss: Vec<World> = self.succ(0, n).into_iter().filter(|&z| self.has(names::S, z)).collect();
                ss.iter().copied().find(|&z| !ss.iter().any(|&z2| z2 != z && self.r(0, z2, z))).map(|z| (n, z))
            });
            match next {
                Some((n, z)) if !ys.contains(&z) => {
                    ns.push(n);
                    ys.push(z);
                }
                _ if finite => {
                    let what = if npts.is_empty() { "N point in the column" } else { "next S point" };
                    return Err(DecodeError::Missing { m, what });
                }
                _ => return Ok((ys, ns)),
            }
        }
    }

    fn configs(&self, points: &[World], counts: &[Vec<u64>]) -> Result<Vec<Config>, DecodeError> {
        points
            .iter()
            .enumerate()
            .map(|(m, &w)| Ok(Config::new(self.state_at(m, w)?, counts[m].clone())))
            .collect()
    }

    fn name(&self, c: &Config) -> String {
        let cs: Vec<String> = c.counters.iter().map(|x| x.to_string()).collect();
        format!("<{}, {}>", self.machine.states[c.state], cs.join(","))
    }

    /// Builds a run from consecutive configurations, checking every step.
    fn run(&self, configs: Vec<Config>, sem: Semantics, offset: usize) -> Result<Run, DecodeError> {
        let mut ops = Vec::new();
        for (k, w) in configs.windows(2).enumerate() {
            match self.machine.step(sem, &w[0], &w[1]) {
                Some(op) => ops.push(op),
                None => {
                    return Err(DecodeError::BadStep {
                        m: k + offset,
                        from: self.name(&w[0]),
                        to: self.name(&w[1]),
                        sem: if sem == Semantics::Reliable { "reliable" } else { "lossy" },
                        candidates: self.machine.instructions[w[0].state]
                            .iter()
                            .map(|(op, q)| format!("{op} -> {}", self.machine.states[*q]))
                            .collect(),
                    })
                }
            }
        }
        Ok(Run { configs, ops })
    }

    fn check_start(&self, c: &Config, q0: StateId, segment: usize) -> Result<(), DecodeError> {
        if c.state != q0 || c.counters.iter().any(|&x| x != 0) {
            return Err(DecodeError::BadStart {
                segment,
                q0: self.machine.states[q0].clone(),
                got: self.name(c),
            });
        }
        Ok(())
    }

    fn check_end(&self, c: &Config, qr: Option<StateId>) -> Result<(), DecodeError> {
        match qr {
            Some(q) if c.state != q => Err(DecodeError::MissedTarget {
                got: self.machine.states[c.state].clone(),
                want: self.machine.states[q].clone(),
            }),
            _ => Ok(()),
        }
    }

    /// Walks the backward staircase: `u_m`, `v_m`, `y_m`.
    fn backward_staircase(&mut self, max_len: usize) -> Result<(Vec<World>, Vec<World>, Vec<World>), DecodeError> {
        let root = self.model.root.ok_or(DecodeError::NoRoot)?;
        let last = boxm(0, bot());
        let ends = self.ck.eval(&last).clone();
        let u0 = self
            .succ(0, root)
            .into_iter()
            .find(|&x| self.has(names::S, x) && ends.contains(x))
            .ok_or(DecodeError::Missing { m: 0, what: "S point without horizontal successors" })?;
        let (mut us, mut vs, mut ys) = (vec![u0], Vec::new(), vec![root]);
        loop {
            let m = us.len() - 1;
            let (u, y) = (us[m], ys[m]);
            let v = self.succ(0, y).into_iter().find(|&x| self.has(names::N, x) && self.r(0, x, u));
            let Some(v) = v else { break };
            vs.push(v);
            if us.len() >= max_len {
                break;
            }
            let next_u = self.succ(1, v).into_iter().find(|&x| self.has(names::S, x) && !us.contains(&x));
            let Some(nu) = next_u else { break };
            let ny = self.succ(1, y).into_iter().find(|&x| (x == root || self.r(1, root, x)) && self.r(0, x, nu));
            let Some(ny) = ny else { break };
            us.push(nu);
            ys.push(ny);
        }
        Ok((us, vs, ys))
    }

    /// `{u} ∪ {x : x R1 u}`.
    fn column_of(&self, u: World) -> Vec<World> {
        let mut c = vec![u];
        c.extend((0..self.model.len()).filter(|&x| x != u && self.r(1, x, u)));
        c
    }
}

/// Reads the run(s) a model encodes, following the staircase of `kind`
/// from the root. Truncated kinds read at most `max_len` configurations.
/// `lossy_exp` yields one run per `start`-delimited segment; the other
/// kinds yield exactly one run.
pub fn decode_run(
    model: &Model,
    enc: &CompiledEncoding,
    machine: &Machine,
    kind: WitnessKind,
    max_len: Option<usize>,
) -> Result<Vec<DecodedRun>, DecodeError> {
    let (q0, qr) = target_states(enc, machine)?;
    let limit = max_len.unwrap_or(usize::MAX).min(model.len() + 1).max(1);
    let mut rd = Reader::new(model, machine);
    match kind {
        WitnessKind::FwFin | WitnessKind::FwRec => {
            let finite = kind == WitnessKind::FwFin;
            let limit = if finite { model.len() + 1 } else { limit };
            let (ys, ns) = rd.forward_staircase(finite, limit)?;
            let counts: Vec<Vec<u64>> = ys.iter().map(|&y| rd.fw_counts(&rd.column(y))).collect();
            let configs = rd.configs(&ys, &counts)?;
            rd.check_start(&configs[0], q0, 0)?;
            let run = rd.run(configs, Semantics::Reliable, 0)?;
            if finite {
                rd.check_end(run.configs.last().unwrap(), qr)?;
            }
            Ok(vec![DecodedRun { run, counts, staircase: ys, next: ns, lines: vec![], sstar: 0 }])
        }
        WitnessKind::LossyFin => {
            let (ys, ns) = rd.forward_staircase(true, model.len() + 1)?;
            let counts: Vec<Vec<u64>> = ys.iter().map(|&y| rd.c_counts(&rd.column(y))).collect();
            let mut configs = rd.configs(&ys, &counts)?;
            configs.reverse();
            rd.check_start(&configs[0], q0, 0)?;
            let sem = WitnessKind::LossyFin.semantics();
            let run = rd.run(configs, sem, 0)?;
            rd.check_end(run.configs.last().unwrap(), qr)?;
            let mut counts = counts;
            counts.reverse();
            Ok(vec![DecodedRun { run, counts, staircase: ys, next: ns, lines: vec![], sstar: 0 }])
        }
        WitnessKind::LossyExp => {
            let (ys, ns) = rd.forward_staircase(false, limit)?;
            let counts: Vec<Vec<u64>> = ys.iter().map(|&y| rd.c_counts(&rd.column(y))).collect();
            let starts: Vec<usize> = (0..ys.len()).filter(|&c| rd.has(names::START, ys[c])).collect();
            if starts.first() != Some(&0) {
                return Err(DecodeError::Missing { m: 0, what: "start mark at the root" });
            }
            let sem = WitnessKind::LossyExp.semantics();
            let mut out = Vec::new();
            for (seg, w) in starts.windows(2).enumerate() {
                let (a, b) = (w[0], w[1]);
                let cols: Vec<usize> = (a + 1..=b).rev().collect();
                let points: Vec<World> = cols.iter().map(|&c| ys[c]).collect();
                let seg_counts: Vec<Vec<u64>> = cols.iter().map(|&c| counts[c].clone()).collect();
                let configs = rd.configs(&points, &seg_counts)?;
                rd.check_start(&configs[0], q0, seg + 1)?;
                let run = rd.run(configs, sem, 0)?;
                let sstar = (a + 1..b).filter(|&c| rd.has(names::SSTAR, ys[c])).count();
                let next = cols.iter().filter_map(|&c| ns.get(c).copied()).collect();
                out.push(DecodedRun { run, counts: seg_counts, staircase: points, next, lines: vec![], sstar });
            }
            Ok(out)
        }
        WitnessKind::BwInf | WitnessKind::BwRec => {
            let (us, vs, ys) = rd.backward_staircase(limit)?;
            let counts: Vec<Vec<u64>> = us.iter().map(|&u| rd.c_counts(&rd.column_of(u))).collect();
            let configs = rd.configs(&us, &counts)?;
            rd.check_start(&configs[0], q0, 0)?;
            let run = rd.run(configs, Semantics::Reliable, 0)?;
            Ok(vec![DecodedRun { run, counts, staircase: us, next: vs, lines: ys, sstar: 0 }])
        }
        WitnessKind::Dense => Err(DecodeError::Unsupported(kind)),
    }
}
