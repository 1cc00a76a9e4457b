use std::fmt;

use crate::formula::{and, bot, boxm, dia, or, var, Formula};
use crate::frames::{Rank, World};
use crate::reductions::{names, CompiledEncoding};
use crate::semantics::{Checker, Model};

/// Outcome of the structural checks on a backward model.
#[derive(Clone, Debug, Default)]
pub struct BackwardReport {
    /// Columns `0..=checked_up_to` were examined.
    pub checked_up_to: usize,
    /// Number of individual checks performed.
    pub checks: usize,
    pub violations: Vec<String>,
}

impl BackwardReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn expect(&mut self, cond: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !cond {
            self.violations.push(msg());
        }
    }
}

impl fmt::Display for BackwardReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "columns 0..={}: {} checks, {} violations", self.checked_up_to, self.checks, self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

fn all_c(i: usize) -> Formula {
    let n = var(names::N);
    and(dia(0, n.clone()), boxm(0, crate::formula::implies(or(n.clone(), dia(0, n)), var(&names::c(i)))))
}

/// Checks the staircase, rank, half-grid and counting properties of a
/// backward model for every column `m < k - 1`.
pub fn verify_backward_claims(model: &Model, enc: &CompiledEncoding, k: usize) -> BackwardReport {
    let mut rep = BackwardReport::default();
    let Some(root) = model.root else {
        rep.violations.push("model has no root".into());
        return rep;
    };
    let upto = k.saturating_sub(2);
    rep.checked_up_to = upto;
    let r0 = &model.frame.r0;
    let r1 = &model.frame.r1;
    let n = model.len();
    let name = |w: World| model.world_name(w);
    let has = |p: &str, w: World| model.holds_var(p, w);
    let ranks = model.frame.horizontal_ranks();
    let mut ck = Checker::new(model);
    let dead_end = ck.eval(&boxm(0, bot())).clone();
    let n_or_sees_n = ck.eval(&or(var(names::N), dia(0, var(names::N)))).clone();
    let counters = (0..).take_while(|&i| enc.dict.contains(&names::c(i))).count();
    let allc: Vec<_> = (0..counters).map(|i| ck.eval(&all_c(i)).clone()).collect();

    let unique = |rep: &mut BackwardReport, what: String, c: Vec<World>| -> Option<World> {
        rep.expect(c.len() == 1, || {
            format!("{what}: expected exactly one point, found [{}]", c.iter().map(|&w| name(w)).collect::<Vec<_>>().join(", "))
        });
        c.first().copied()
    };

    // staircase u_m, v_m, y_m for m <= upto + 1
    let mut us: Vec<World> = Vec::new();
    let mut vs: Vec<World> = Vec::new();
    let mut ys: Vec<World> = vec![root];
    let u0 = r0.successors(root).filter(|&x| has(names::S, x) && dead_end.contains(x)).collect();
    let Some(u0) = unique(&mut rep, "u_0".into(), u0) else { return rep };
    us.push(u0);
    for m in 0..=upto {
        let (y, u) = (ys[m], us[m]);
        let cands: Vec<World> = r0.successors(y).filter(|&x| has(names::N, x)).collect();
        let Some(v) = unique(&mut rep, format!("v_{m}"), cands) else { break };
        rep.expect(r0.holds(v, u), || format!("v_{m} = {} does not see u_{m} = {}", name(v), name(u)));
        rep.expect(ranks[v] == Rank::Finite(m + 1), || format!("hr(v_{m}) = {}, expected {}", ranks[v], m + 1));
        vs.push(v);
        if m == upto {
            break;
        }
        let cands: Vec<World> = r1.successors(v).filter(|&x| has(names::S, x)).collect();
        let Some(nu) = unique(&mut rep, format!("u_{}", m + 1), cands) else { break };
        let cands: Vec<World> =
            r1.successors(y).filter(|&x| (x == root || r1.holds(root, x)) && r0.holds(x, nu)).collect();
        let Some(ny) = unique(&mut rep, format!("y_{}", m + 1), cands) else { break };
        us.push(nu);
        ys.push(ny);
    }
    for (m, &u) in us.iter().enumerate() {
        rep.expect(ranks[u] == Rank::Finite(m), || format!("hr(u_{m}) = {}, expected {m}", ranks[u]));
    }

    let column = |u: World| -> Vec<World> {
        let mut c = vec![u];
        c.extend((0..n).filter(|&x| x != u && r1.holds(x, u)));
        c
    };
    let columns: Vec<Vec<World>> = us.iter().map(|&u| column(u)).collect();

    for (m, col) in columns.iter().enumerate().take(upto + 1) {
        for &x in col {
            rep.expect(ranks[x] == Rank::Finite(m), || format!("rank: hr({}) = {} in Column_{m}", name(x), ranks[x]));
        }
        // half-grid points
        let mut xs = Vec::new();
        for (j, &un) in us.iter().enumerate().take(m) {
            let cands: Vec<World> = col.iter().copied().filter(|&x| r0.holds(x, un)).collect();
            if let Some(x) = unique(&mut rep, format!("x_{{{m},{j}}}"), cands) {
                xs.push(x);
            }
        }
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        sorted.dedup();
        rep.expect(sorted.len() == xs.len(), || format!("half-grid points of Column_{m} are not pairwise distinct"));
        let mut marked: Vec<World> = col.iter().copied().filter(|&x| n_or_sees_n.contains(x)).collect();
        marked.sort_unstable();
        rep.expect(marked == sorted, || {
            let show = |v: &[World]| v.iter().map(|&w| name(w)).collect::<Vec<_>>().join(", ");
            format!("Column_{m}: N-or-<0>N points [{}] differ from half-grid points [{}]", show(&marked), show(&sorted))
        });
    }

    // counting: |AllC_i in Column_{m+1}| = |C_i in Column_m|
    for m in 0..upto.min(columns.len().saturating_sub(1)) {
        for (i, ac) in allc.iter().enumerate() {
            let right = columns[m].iter().filter(|&&x| has(&names::c(i), x)).count();
            let left = columns[m + 1].iter().filter(|&&x| ac.contains(x)).count();
            rep.expect(left == right, || format!("counting, counter {i}: {left} AllC points in Column_{} but {right} C points in Column_{m}", m + 1));
        }
    }
    rep
}
