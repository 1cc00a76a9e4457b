use std::collections::BTreeSet;

use super::{Machine, MachineError, Op};

fn syntax(line: usize, msg: impl Into<String>) -> MachineError {
    MachineError::Syntax { line, msg: msg.into() }
}

/// Parses the line-oriented machine format:
///
/// ```text
/// counters: 2
/// states: q0 q1 h
/// halt: h
/// q0: inc 0 -> q1
/// q1: dec 0 -> h
/// ```
///
/// `#` starts a comment. The header lines must precede the instructions.
pub fn parse_machine(src: &str) -> Result<Machine, MachineError> {
    let mut counters = None;
    let mut states: Option<Vec<String>> = None;
    let mut halt_names: Option<Vec<String>> = None;
    let mut instrs: Vec<(usize, String, Op, String)> = Vec::new();
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let text = raw.split('#').next().unwrap().trim();
        if text.is_empty() {
            continue;
        }
        let (head, rest) = text.split_once(':').ok_or_else(|| syntax(line, "expected `key: value`"))?;
        let head = head.trim();
        let rest = rest.trim();
        match head {
            "counters" => {
                let n = rest.parse::<usize>().map_err(|_| syntax(line, format!("bad counter count `{rest}`")))?;
                counters = Some(n);
            }
            "states" => states = Some(rest.split_whitespace().map(String::from).collect()),
            "halt" => halt_names = Some(rest.split_whitespace().map(String::from).collect()),
            q => {
                let (lhs, target) = rest.split_once("->").ok_or_else(|| syntax(line, "expected `op I -> state`"))?;
                let words: Vec<&str> = lhs.split_whitespace().collect();
                if words.len() != 2 {
                    return Err(syntax(line, "expected `op I -> state`"));
                }
                let i = words[1].parse::<usize>().map_err(|_| syntax(line, format!("bad counter `{}`", words[1])))?;
                let op = match words[0] {
                    "inc" => Op::Inc(i),
                    "dec" => Op::Dec(i),
                    "zero" => Op::Zero(i),
                    w => return Err(syntax(line, format!("unknown operation `{w}`"))),
                };
                instrs.push((line, q.to_string(), op, target.trim().to_string()));
            }
        }
    }
    let counters = counters.ok_or_else(|| syntax(0, "missing `counters:` line"))?;
    let states = states.ok_or_else(|| syntax(0, "missing `states:` line"))?;
    let halt_names = halt_names.unwrap_or_default();
    let lookup = |name: &str| {
        states.iter().position(|s| s == name).ok_or_else(|| MachineError::UnknownState(name.to_string()))
    };
    let mut halting = BTreeSet::new();
    for h in &halt_names {
        halting.insert(lookup(h)?);
    }
    let mut instructions = vec![Vec::new(); states.len()];
    for (_, q, op, target) in instrs {
        let q = lookup(&q)?;
        let t = lookup(&target)?;
        instructions[q].push((op, t));
    }
    Machine::new(counters, states, halting, instructions)
}

pub fn print_machine(m: &Machine) -> String {
    let mut out = format!("counters: {}\nstates: {}\nhalt:", m.counters, m.states.join(" "));
    for &h in &m.halting {
        out.push(' ');
        out.push_str(&m.states[h]);
    }
    out.push('\n');
    for (q, instrs) in m.instructions.iter().enumerate() {
        for &(op, t) in instrs {
            out.push_str(&format!("{}: {} -> {}\n", m.states[q], op, m.states[t]));
        }
    }
    out
}
