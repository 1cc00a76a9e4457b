//! Inputs shared by the benchmarks.

use bimodal::formula::{parse, Formula};

/// Satisfiable formulas that need a few columns and rows.
pub fn search_formulas() -> Vec<(&'static str, Formula)> {
    [
        ("diag", "<0> P & <1> Q & [0] [1] ~(P & Q)"),
        ("staircase", "<0> (S & <1> N) & [0] (S -> ~<1> S) & <1> <0> ~S"),
        ("unsat", "<0> <1> P & [1] [0] ~P"),
    ]
    .into_iter()
    .map(|(n, s)| (n, parse(s).expect("bench formula")))
    .collect()
}
