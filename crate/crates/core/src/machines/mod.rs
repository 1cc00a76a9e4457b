//! Minsky counter machines with reliable and lossy semantics, run
//! enumeration and bounded decision oracles.

mod oracle;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use oracle::{bounded_oracle, Problem, Verdict};
pub use text::{parse_machine, print_machine};

pub type StateId = usize;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Op {
    Inc(usize),
    Dec(usize),
    Zero(usize),
}

impl Op {
    pub fn counter(self) -> usize {
        match self {
            Op::Inc(i) | Op::Dec(i) | Op::Zero(i) => i,
        }
    }

    /// Short identifier used in proposition names, e.g. `inc0`.
    pub fn tag(self) -> String {
        match self {
            Op::Inc(i) => format!("inc{i}"),
            Op::Dec(i) => format!("dec{i}"),
            Op::Zero(i) => format!("zero{i}"),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Inc(i) => write!(f, "inc {i}"),
            Op::Dec(i) => write!(f, "dec {i}"),
            Op::Zero(i) => write!(f, "zero {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("a machine needs at least two counters, got {0}")]
    TooFewCounters(usize),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("counter {0} out of range")]
    CounterRange(usize),
    #[error("halting state `{0}` has instructions")]
    HaltingWithInstructions(String),
    #[error("non-halting state `{0}` has no instructions")]
    NoInstructions(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Machine {
    pub counters: usize,
    pub states: Vec<String>,
    pub halting: BTreeSet<StateId>,
    /// `instructions[q]`: the pairs `(op, q')` available at `q`, in file order.
    pub instructions: Vec<Vec<(Op, StateId)>>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Config {
    pub state: StateId,
    pub counters: Vec<u64>,
}

impl Config {
    pub fn new(state: StateId, counters: Vec<u64>) -> Self {
        Config { state, counters }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Semantics {
    Reliable,
    /// Lossy steps with every counter capped at `cap`.
    Lossy { cap: u64 },
}

/// A finite run: `configs.len() == ops.len() + 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Run {
    pub configs: Vec<Config>,
    pub ops: Vec<Op>,
}

impl Machine {
    pub fn new(
        counters: usize,
        states: Vec<String>,
        halting: BTreeSet<StateId>,
        instructions: Vec<Vec<(Op, StateId)>>,
    ) -> Result<Self, MachineError> {
        if counters < 2 {
            return Err(MachineError::TooFewCounters(counters));
        }
        let mut seen = BTreeSet::new();
        for s in &states {
            if !seen.insert(s) {
                return Err(MachineError::DuplicateState(s.clone()));
            }
        }
        for (q, instrs) in instructions.iter().enumerate() {
            for &(op, q2) in instrs {
                if op.counter() >= counters {
                    return Err(MachineError::CounterRange(op.counter()));
                }
                if q2 >= states.len() {
                    return Err(MachineError::UnknownState(q2.to_string()));
                }
            }
            if halting.contains(&q) && !instrs.is_empty() {
                return Err(MachineError::HaltingWithInstructions(states[q].clone()));
            }
            if !halting.contains(&q) && instrs.is_empty() {
                return Err(MachineError::NoInstructions(states[q].clone()));
            }
        }
        Ok(Machine { counters, states, halting, instructions })
    }

    pub fn state_id(&self, name: &str) -> Result<StateId, MachineError> {
        self.states.iter().position(|s| s == name).ok_or_else(|| MachineError::UnknownState(name.to_string()))
    }

    pub fn is_halting(&self, q: StateId) -> bool {
        self.halting.contains(&q)
    }

    pub fn initial(&self, q0: StateId) -> Config {
        Config::new(q0, vec![0; self.counters])
    }

    /// Distinct operations used anywhere, sorted.
    pub fn ops(&self) -> Vec<Op> {
        let s: BTreeSet<Op> = self.instructions.iter().flatten().map(|&(op, _)| op).collect();
        s.into_iter().collect()
    }

    /// Reliable successors in instruction order.
    pub fn successors(&self, c: &Config) -> Vec<(Op, Config)> {
        let mut out = Vec::new();
        for &(op, q2) in &self.instructions[c.state] {
            let mut next = c.counters.clone();
            let ok = match op {
                Op::Inc(i) => {
                    next[i] += 1;
                    true
                }
                Op::Dec(i) => {
                    if next[i] > 0 {
                        next[i] -= 1;
                        true
                    } else {
                        false
                    }
                }
                Op::Zero(i) => next[i] == 0,
            };
            if ok {
                out.push((op, Config::new(q2, next)));
            }
        }
        out
    }

    /// The first instruction taking `a` to `b` reliably.
    pub fn reliable_step(&self, a: &Config, b: &Config) -> Option<Op> {
        self.successors(a).into_iter().find(|(_, c)| c == b).map(|(op, _)| op)
    }

    /// The first instruction taking `a` to `b` in a lossy step: some
    /// `a1 <= a` reliably steps to some `a2 >= b`.
    pub fn lossy_step(&self, a: &Config, b: &Config) -> Option<Op> {
        self.instructions[a.state]
            .iter()
            .find(|&&(op, q2)| q2 == b.state && lossy_bound(op, &a.counters, &b.counters))
            .map(|&(op, _)| op)
    }

    /// Lossy successors with counters capped at `cap`.
    pub fn lossy_successors(&self, c: &Config, cap: u64) -> Vec<(Op, Config)> {
        let mut out = Vec::new();
        for &(op, q2) in &self.instructions[c.state] {
            let Some(upper) = lossy_upper(op, &c.counters) else { continue };
            let upper: Vec<u64> = upper.into_iter().map(|u| u.min(cap)).collect();
            let mut cur = vec![0u64; upper.len()];
            loop {
                out.push((op, Config::new(q2, cur.clone())));
                let mut k = 0;
                while k < cur.len() && cur[k] == upper[k] {
                    cur[k] = 0;
                    k += 1;
                }
                if k == cur.len() {
                    break;
                }
                cur[k] += 1;
            }
        }
        out
    }

    pub fn step(&self, sem: Semantics, a: &Config, b: &Config) -> Option<Op> {
        match sem {
            Semantics::Reliable => self.reliable_step(a, b),
            Semantics::Lossy { cap } => {
                if b.counters.iter().any(|&x| x > cap) {
                    return None;
                }
                self.lossy_step(a, b)
            }
        }
    }

    fn next_configs(&self, sem: Semantics, c: &Config) -> Vec<(Op, Config)> {
        match sem {
            Semantics::Reliable => self.successors(c),
            Semantics::Lossy { cap } => self.lossy_successors(c, cap),
        }
    }

    /// Lazily enumerates maximal runs with at most `depth` configurations
    /// from `start`: runs that either reach `depth` configurations or get
    /// stuck earlier.
    pub fn bounded_runs(&self, start: Config, depth: usize, sem: Semantics) -> BoundedRuns<'_> {
        BoundedRuns { machine: self, sem, depth, stack: vec![Frame { config: start, op: None, pending: None }] }
    }

    /// Machine that first increments its counters to `target.counters`
    /// from zero and then continues in `target.state`; returns the
    /// machine and its new start state.
    pub fn prefill(&self, target: &Config) -> (Machine, StateId) {
        let mut m = self.clone();
        let incs: Vec<usize> =
            (0..self.counters).flat_map(|i| std::iter::repeat(i).take(target.counters[i] as usize)).collect();
        if incs.is_empty() {
            return (m, target.state);
        }
        let base = m.states.len();
        for k in 0..incs.len() {
            let mut name = format!("pre{k}");
            while m.states.contains(&name) {
                name.push('\'');
            }
            m.states.push(name);
            let next = if k + 1 < incs.len() { base + k + 1 } else { target.state };
            m.instructions.push(vec![(Op::Inc(incs[k]), next)]);
        }
        (m, base)
    }
}

/// Upper bounds for the target counters of a lossy step, if any.
fn lossy_upper(op: Op, c: &[u64]) -> Option<Vec<u64>> {
    let mut up = c.to_vec();
    match op {
        Op::Inc(i) => up[i] += 1,
        Op::Dec(i) => {
            if c[i] == 0 {
                return None;
            }
            up[i] -= 1;
        }
        Op::Zero(i) => up[i] = 0,
    }
    Some(up)
}

fn lossy_bound(op: Op, a: &[u64], b: &[u64]) -> bool {
    lossy_upper(op, a).is_some_and(|up| b.iter().zip(&up).all(|(x, u)| x <= u))
}

impl Run {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    /// Checks every step; returns the index of the first bad step.
    pub fn validate(&self, m: &Machine, sem: Semantics) -> Result<(), usize> {
        if self.ops.len() + 1 != self.configs.len() {
            return Err(self.ops.len());
        }
        for (k, w) in self.configs.windows(2).enumerate() {
            let ok = match sem {
                Semantics::Reliable => m.successors(&w[0]).contains(&(self.ops[k], w[1].clone())),
                Semantics::Lossy { cap } => {
                    w[1].counters.iter().all(|&x| x <= cap)
                        && m.instructions[w[0].state]
                            .iter()
                            .any(|&(op, q2)| op == self.ops[k] && q2 == w[1].state && lossy_bound(op, &w[0].counters, &w[1].counters))
                }
            };
            if !ok {
                return Err(k);
            }
        }
        Ok(())
    }

    pub fn display(&self, m: &Machine) -> String {
        self.configs
            .iter()
            .map(|c| {
                let cs: Vec<String> = c.counters.iter().map(|x| x.to_string()).collect();
                format!("<{}, {}>", m.states[c.state], cs.join(","))
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

struct Frame {
    config: Config,
    op: Option<Op>,
    /// Successors not yet explored; `None` until first expansion.
    pending: Option<std::vec::IntoIter<(Op, Config)>>,
}

/// Pull-based depth-first enumeration of runs.
pub struct BoundedRuns<'m> {
    machine: &'m Machine,
    sem: Semantics,
    depth: usize,
    stack: Vec<Frame>,
}

impl BoundedRuns<'_> {
    fn current(&self) -> Run {
        Run {
            configs: self.stack.iter().map(|f| f.config.clone()).collect(),
            ops: self.stack.iter().skip(1).map(|f| f.op.unwrap()).collect(),
        }
    }
}

impl Iterator for BoundedRuns<'_> {
    type Item = Run;

    fn next(&mut self) -> Option<Run> {
        if self.depth == 0 {
            return None;
        }
        loop {
            let len = self.stack.len();
            let top = self.stack.last_mut()?;
            if top.pending.is_none() {
                let succ = if len < self.depth { self.machine.next_configs(self.sem, &top.config) } else { vec![] };
                let maximal = succ.is_empty();
                top.pending = Some(succ.into_iter());
                if maximal {
                    let run = self.current();
                    self.stack.pop();
                    return Some(run);
                }
            }
            let top = self.stack.last_mut().unwrap();
            match top.pending.as_mut().unwrap().next() {
                Some((op, config)) => self.stack.push(Frame { config, op: Some(op), pending: None }),
                None => {
                    self.stack.pop();
                }
            }
        }
    }
}

/// The machines used throughout the tests, in file syntax.
pub mod corpus {
    /// `q0: inc 0 -> q1`, `q1: dec 0 -> h`.
    pub const M_A: &str = "counters: 2\nstates: q0 q1 h\nhalt: h\nq0: inc 0 -> q1\nq1: dec 0 -> h\n";
    /// `q0: zero 0 -> q0` (never halts).
    pub const M_B: &str = "counters: 2\nstates: q0\nhalt:\nq0: zero 0 -> q0\n";
    /// `q0: dec 0 -> q1` (stuck at once).
    pub const M_C: &str = "counters: 2\nstates: q0 q1\nhalt: q1\nq0: dec 0 -> q1\n";
    /// Two-counter transfer: fill c0 twice, move it to c1, then halt.
    pub const M_D: &str = "counters: 2\nstates: a b c d h\nhalt: h\n\
a: inc 0 -> b\nb: inc 0 -> c\nc: dec 0 -> d\nc: zero 0 -> h\nd: inc 1 -> c\n";
    /// Non-deterministic loop: increment c1 or test c0 and visit `r`.
    pub const M_E: &str = "counters: 2\nstates: q0 r\nhalt:\nq0: inc 1 -> q0\nq0: zero 0 -> r\nr: inc 0 -> q0\nr: dec 1 -> r\n";
    /// Reaches `h` only after a lossy step (c0 must be emptied by loss).
    pub const M_F: &str = "counters: 2\nstates: q0 q1 h\nhalt: h\nq0: inc 0 -> q1\nq1: zero 0 -> h\n";

    /// Counter 1 up, counter 0 up, counter 1 down, then zero test on counter 1.
    pub const M_G: &str = "counters: 2\nstates: q0 q1 q2 q3 h\nhalt: h\n\
q0: inc 1 -> q1\nq1: inc 0 -> q2\nq2: dec 1 -> q3\nq3: zero 1 -> h\nq3: dec 0 -> q3\n";

    pub const ALL: [(&str, &str); 7] =
        [("M_A", M_A), ("M_B", M_B), ("M_C", M_C), ("M_D", M_D), ("M_E", M_E), ("M_F", M_F), ("M_G", M_G)];
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(src: &str) -> Machine {
        parse_machine(src).unwrap()
    }

    fn cfg(q: StateId, c: &[u64]) -> Config {
        Config::new(q, c.to_vec())
    }

    #[test]
    fn m_a_single_run() {
        let ma = m(corpus::M_A);
        let runs: Vec<Run> = ma.bounded_runs(ma.initial(0), 3, Semantics::Reliable).collect();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].display(&ma), "<q0, 0,0> <q1, 1,0> <h, 0,0>");
        assert_eq!(runs[0].ops, vec![Op::Inc(0), Op::Dec(0)]);
        assert!(runs[0].validate(&ma, Semantics::Reliable).is_ok());
    }

    #[test]
    fn m_b_loops_and_m_c_is_stuck() {
        let mb = m(corpus::M_B);
        let runs: Vec<Run> = mb.bounded_runs(mb.initial(0), 4, Semantics::Reliable).collect();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].len(), 4);
        let mc = m(corpus::M_C);
        let runs: Vec<Run> = mc.bounded_runs(mc.initial(0), 4, Semantics::Reliable).collect();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].len(), 1);
    }

    #[test]
    fn lossy_step_examples() {
        let ma = m(corpus::M_A);
        assert_eq!(ma.lossy_step(&cfg(0, &[3, 0]), &cfg(1, &[2, 0])), Some(Op::Inc(0)));
        assert_eq!(ma.lossy_step(&cfg(0, &[3, 0]), &cfg(1, &[5, 0])), None);
        assert_eq!(ma.lossy_step(&cfg(1, &[0, 0]), &cfg(2, &[0, 0])), None);
        let mf = m(corpus::M_F);
        assert_eq!(mf.lossy_step(&cfg(1, &[4, 2]), &cfg(2, &[0, 1])), Some(Op::Zero(0)));
        assert_eq!(mf.reliable_step(&cfg(1, &[4, 2]), &cfg(2, &[4, 2])), None);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            parse_machine("counters: 2\nstates: q h\nhalt: h\nq: inc 0 -> h\nh: inc 0 -> q\n"),
            Err(MachineError::HaltingWithInstructions(_))
        ));
        assert!(matches!(
            parse_machine("counters: 2\nstates: q h\nhalt:\nq: inc 0 -> h\n"),
            Err(MachineError::NoInstructions(_))
        ));
        assert!(matches!(parse_machine("counters: 1\nstates: q\nhalt: q\n"), Err(MachineError::TooFewCounters(1))));
        assert!(matches!(
            parse_machine("counters: 2\nstates: q\nhalt:\nq: inc 2 -> q\n"),
            Err(MachineError::CounterRange(2))
        ));
    }

    #[test]
    fn prefill_reaches_target() {
        let ma = m(corpus::M_A);
        let (pm, start) = ma.prefill(&cfg(1, &[2, 1]));
        let runs: Vec<Run> = pm.bounded_runs(pm.initial(start), 4, Semantics::Reliable).collect();
        assert_eq!(runs.len(), 1);
        assert_eq!(runs[0].configs.last().unwrap(), &cfg(1, &[2, 1]));
    }
}
