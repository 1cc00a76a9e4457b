use std::collections::HashMap;
use std::fmt;

use super::{Config, Machine, Op, Run, Semantics, StateId};

/// The five decision problems, each from an explicit start configuration.
/// Visits count every position of a run, the start included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Problem {
    NonTermination { start: Config },
    Reachability { start: Config, target: StateId },
    Recurrence { start: Config, target: StateId, k: usize },
    LossyReachability { start: Config, target: StateId, cap: u64 },
    LossyOmegaReach { start: Config, target: StateId, k: usize, cap: u64 },
}

/// Oracle answers always refer to the explored depth (in steps).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    YesWithinBound { depth: usize, run: Run },
    NoWithinBound { depth: usize },
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::YesWithinBound { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::YesWithinBound { depth, run } => {
                write!(f, "yes-within-bound (depth {depth}, witness of {} steps)", run.ops.len())
            }
            Verdict::NoWithinBound { depth } => write!(f, "no-within-bound (depth {depth})"),
        }
    }
}

impl Problem {
    fn start(&self) -> &Config {
        match self {
            Problem::NonTermination { start }
            | Problem::Reachability { start, .. }
            | Problem::Recurrence { start, .. }
            | Problem::LossyReachability { start, .. }
            | Problem::LossyOmegaReach { start, .. } => start,
        }
    }

    fn semantics(&self) -> Semantics {
        match *self {
            Problem::LossyReachability { cap, .. } | Problem::LossyOmegaReach { cap, .. } => Semantics::Lossy { cap },
            _ => Semantics::Reliable,
        }
    }

    /// `(target, visits needed)`, or `None` for non-termination.
    fn goal(&self) -> Option<(StateId, usize)> {
        match *self {
            Problem::NonTermination { .. } => None,
            Problem::Reachability { target, .. } | Problem::LossyReachability { target, .. } => Some((target, 1)),
            Problem::Recurrence { target, k, .. } | Problem::LossyOmegaReach { target, k, .. } => Some((target, k)),
        }
    }
}

/// Breadth-first search over (step, configuration, visits) for a run of at
/// most `depth` steps meeting the goal; non-termination asks for a run of
/// exactly `depth` steps.
pub fn bounded_oracle(m: &Machine, problem: &Problem, depth: usize) -> Verdict {
    type Key = (Config, usize);
    let sem = problem.semantics();
    let goal = problem.goal();
    let visit = |c: &Config, v: usize| match goal {
        Some((t, k)) if c.state == t => (v + 1).min(k),
        _ => v,
    };
    let done = |layer: usize, v: usize| match goal {
        None => layer == depth,
        Some((_, k)) => v >= k,
    };
    let start = problem.start().clone();
    let v0 = visit(&start, 0);
    let mut parents: Vec<HashMap<Key, Option<(Key, Op)>>> = vec![HashMap::from([((start, v0), None)])];
    for layer in 0..=depth {
        let hit = parents[layer].keys().filter(|(_, v)| done(layer, *v)).min().cloned();
        if let Some(key) = hit {
            return Verdict::YesWithinBound { depth, run: rebuild(&parents, layer, key) };
        }
        if layer == depth {
            break;
        }
        let mut next: HashMap<Key, Option<(Key, Op)>> = HashMap::new();
        let mut keys: Vec<&Key> = parents[layer].keys().collect();
        keys.sort();
        for key in keys {
            for (op, c) in m.next_configs(sem, &key.0) {
                let v = visit(&c, key.1);
                next.entry((c, v)).or_insert_with(|| Some((key.clone(), op)));
            }
        }
        if next.is_empty() {
            break;
        }
        parents.push(next);
    }
    Verdict::NoWithinBound { depth }
}

fn rebuild(parents: &[HashMap<(Config, usize), Option<((Config, usize), Op)>>], layer: usize, key: (Config, usize)) -> Run {
    let mut configs = vec![key.0.clone()];
    let mut ops = Vec::new();
    let mut cur = key;
    for l in (1..=layer).rev() {
        let (prev, op) = parents[l][&cur].clone().expect("non-root layer has parents");
        configs.push(prev.0.clone());
        ops.push(op);
        cur = prev;
    }
    configs.reverse();
    ops.reverse();
    Run { configs, ops }
}
