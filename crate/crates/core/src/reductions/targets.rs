//! Whole-machine encodings.

use std::fmt;

use super::gadgets::*;
use super::{machine_hash, names, CompiledEncoding, EncodingError, VarDictionary};
use crate::formula::*;
use crate::machines::{Machine, StateId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    FwRecurrence { q0: String, qr: String },
    FwFiniteReach { q0: String, qr: String },
    BwNonTermination { q0: String },
    BwRecurrence { q0: String, qr: String },
    DenseNonTermination { q0: String },
    LossyOmegaReach { q0: String, qr: String },
    LossyFiniteReach { q0: String, qr: String },
}

impl Target {
    pub const NAMES: [&'static str; 7] = [
        "fw_recurrence",
        "fw_finite_reach",
        "bw_nontermination",
        "bw_recurrence",
        "dense_nontermination",
        "lossy_omega_reach",
        "lossy_finite_reach",
    ];

    /// Builds a target from its name; `qr` is ignored by targets without one
    /// and required by the others.
    pub fn from_name(name: &str, q0: &str, qr: Option<&str>) -> Result<Self, EncodingError> {
        let need = || qr.map(str::to_string).ok_or_else(|| EncodingError::UnknownState("<missing --qr>".into()));
        let q0 = q0.to_string();
        Ok(match name {
            "fw_recurrence" => Target::FwRecurrence { q0, qr: need()? },
            "fw_finite_reach" => Target::FwFiniteReach { q0, qr: need()? },
            "bw_nontermination" => Target::BwNonTermination { q0 },
            "bw_recurrence" => Target::BwRecurrence { q0, qr: need()? },
            "dense_nontermination" => Target::DenseNonTermination { q0 },
            "lossy_omega_reach" => Target::LossyOmegaReach { q0, qr: need()? },
            "lossy_finite_reach" => Target::LossyFiniteReach { q0, qr: need()? },
            _ => return Err(EncodingError::UnknownTarget(name.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Target::FwRecurrence { .. } => "fw_recurrence",
            Target::FwFiniteReach { .. } => "fw_finite_reach",
            Target::BwNonTermination { .. } => "bw_nontermination",
            Target::BwRecurrence { .. } => "bw_recurrence",
            Target::DenseNonTermination { .. } => "dense_nontermination",
            Target::LossyOmegaReach { .. } => "lossy_omega_reach",
            Target::LossyFiniteReach { .. } => "lossy_finite_reach",
        }
    }

    pub fn q0(&self) -> &str {
        match self {
            Target::FwRecurrence { q0, .. }
            | Target::FwFiniteReach { q0, .. }
            | Target::BwNonTermination { q0 }
            | Target::BwRecurrence { q0, .. }
            | Target::DenseNonTermination { q0 }
            | Target::LossyOmegaReach { q0, .. }
            | Target::LossyFiniteReach { q0, .. } => q0,
        }
    }

    pub fn qr(&self) -> Option<&str> {
        match self {
            Target::FwRecurrence { qr, .. }
            | Target::FwFiniteReach { qr, .. }
            | Target::BwRecurrence { qr, .. }
            | Target::LossyOmegaReach { qr, .. }
            | Target::LossyFiniteReach { qr, .. } => Some(qr),
            Target::BwNonTermination { .. } | Target::DenseNonTermination { .. } => None,
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qr() {
            Some(qr) => write!(f, "{}({},{})", self.name(), self.q0(), qr),
            None => write!(f, "{}({})", self.name(), self.q0()),
        }
    }
}

struct Ctx<'m> {
    m: &'m Machine,
    parts: Vec<(String, Formula)>,
}

impl Ctx<'_> {
    fn s(&self, q: StateId) -> Formula {
        var(&names::state(&self.m.states[q]))
    }

    fn push(&mut self, label: &str, f: Formula) {
        self.parts.push((label.to_string(), f));
    }

    fn extend(&mut self, enc: CompiledEncoding) {
        self.parts.extend(enc.conjuncts);
    }

    fn non_halting(&self) -> Vec<StateId> {
        (0..self.m.states.len()).filter(|&q| !self.m.is_halting(q)).collect()
    }

    fn all_states(&self) -> Vec<StateId> {
        (0..self.m.states.len()).collect()
    }

    /// `S <-> OR_{q in qs} (S_q & AND_{q' != q} ~S_q')`.
    fn unique_state(&self, qs: &[StateId]) -> Formula {
        let n = self.m.states.len();
        iff(
            var(names::S),
            disj(qs.iter().map(|&q| and(self.s(q), conj((0..n).filter(|&p| p != q).map(|p| not(self.s(p))))))),
        )
    }
}

fn resolve(m: &Machine, q: &str) -> Result<StateId, EncodingError> {
    m.state_id(q).map_err(|_| EncodingError::UnknownState(q.to_string()))
}

/// The four parts of the forward machine formula: counter, allzero,
/// griduniquetwo, fwstep (ranges as displayed: Q - H).
pub fn phi_m_fw(m: &Machine) -> Vec<(String, Formula)> {
    let mut cx = Ctx { m, parts: vec![] };
    fw_machine_parts(&mut cx, false);
    cx.parts
}

fn fw_machine_parts(cx: &mut Ctx, finite: bool) {
    let n = cx.m.counters;
    cx.push("counter", counter_fw(n));
    cx.push(
        "allzero",
        conj((0..n).map(|i| b1p(and(not(v(&names::c_plus(i))), not(v(&names::c_minus(i))))))),
    );
    let range = if finite { cx.all_states() } else { cx.non_halting() };
    let gu = b1p(b0p(cx.unique_state(&range)));
    cx.push("griduniquetwo", gu);
    let step = conj(range.iter().map(|&q| {
        let guard = if finite { and(cx.s(q), d1(and(v(names::N), not(v(names::END))))) } else { cx.s(q) };
        let options = cx.m.instructions[q].iter().map(|&(op, q2)| {
            and(
                compile_op_gadget(Variant::Fw, op, n),
                b1(implies(v(names::N), b0(implies(v(names::S), cx.s(q2))))),
            )
        });
        implies(guard, disj(options))
    }));
    cx.push("fwstep", b1p(b0p(step)));
}

fn bw_machine_parts(cx: &mut Ctx, bulleted: bool) {
    let n = cx.m.counters;
    let maybe = |f: Formula| if bulleted { bullet(&f) } else { f };
    let sfx = if bulleted { ".bullet" } else { "" };
    cx.push(&format!("counterbw{sfx}"), maybe(counter_bw(n)));
    let qs = cx.non_halting();
    cx.push(&format!("gridunique{sfx}"), maybe(b1p(b0(cx.unique_state(&qs)))));
    let exec = conj(qs.iter().map(|&q| {
        let guard = and(var(names::S), d1(and(var(names::N), d0(cx.s(q)))));
        let options = cx.m.instructions[q].iter().map(|&(op, q2)| and(var(&names::instr(op)), cx.s(q2)));
        implies(guard, disj(options))
    }));
    cx.push(&format!("executebwdec{sfx}"), maybe(b1(b0(exec))));
    let variant = if bulleted { Variant::BwBullet } else { Variant::Bw };
    let inst = conj(cx.m.ops().into_iter().map(|op| implies(var(&names::instr(op)), compile_op_gadget(variant, op, n))));
    // Do^bw is already bulleted when `variant` is BwBullet; bullet only the frame.
    let inst = if bulleted { b1(bb0(inst)) } else { b1(b0(inst)) };
    cx.push(&format!("instbw{sfx}"), inst);
}

fn lossy_machine_parts(cx: &mut Ctx, q0: StateId, finite: bool) {
    let n = cx.m.counters;
    let start = var(names::START);
    cx.push("startv", b0p(b1p(implies(start.clone(), b1(start.clone())))));
    let range = if finite { cx.all_states() } else { cx.non_halting() };
    cx.push("griduniquel", b0p(b1p(cx.unique_state(&range))));
    cx.push(
        "initmmbwl",
        b0p(b1p(implies(
            and(var(names::S), start.clone()),
            and(cx.s(q0), conj((0..n).map(|i| b1p(not(var(&names::c(i))))))),
        ))),
    );
    let exec = conj(range.iter().map(|&q| {
        let guard = conj([var(names::S), not(start.clone()), d1(and(var(names::N), d0(cx.s(q))))]);
        let options = cx.m.instructions[q]
            .iter()
            .map(|&(op, q2)| and(compile_op_gadget(Variant::Lossy, op, n), cx.s(q2)));
        implies(guard, disj(options))
    }));
    cx.push("executebwl", b0p(b1p(exec)));
}

fn rec_bw(cx: &mut Ctx, qr: StateId) {
    let (s, r, nn, q) = (var(names::S), var(names::R), var(names::N), var(names::Q));
    cx.push("erec", b1p(b0(implies(s.clone(), d1(r.clone())))));
    cx.push("upd", b1p(b0(implies(r.clone(), b0(not(s.clone()))))));
    cx.push("dgenr", b0(implies(d1(s.clone()), d1(nn.clone()))));
    cx.push(
        "dgenrdiff",
        b1(b0(implies(s.clone(), iff(q.clone(), b1(implies(nn, b0(implies(s.clone(), not(q))))))))),
    );
    cx.push("rtos", b1p(b0(implies(and(s, d0(r)), cx.s(qr)))));
}

fn rec_lossy(cx: &mut Ctx) {
    let (s, r, st, ss) = (var(names::S), var(names::R), var(names::START), var(names::SSTAR));
    cx.push("recinit", and(st.clone(), b0p(d0(st.clone()))));
    let fresh_s = and(s.clone(), not(st.clone()));
    let no_start_before_s = b0(implies(d0(s.clone()), not(st.clone())));
    cx.push(
        "startpoints",
        b0p(b1p(implies(
            st.clone(),
            dia_plus(1, conj([r.clone(), d0(fresh_s.clone()), no_start_before_s.clone()])),
        ))),
    );
    cx.push("qr", b0p(b1p(implies(r.clone(), b0(implies(s.clone(), ss.clone()))))));
    cx.push(
        "recpoints",
        b0(b1p(implies(
            ss.clone(),
            d1(conj([
                r.clone(),
                d0(and(st.clone(), d0(fresh_s))),
                b0(implies(and(st, d0(s.clone())), no_start_before_s)),
            ])),
        ))),
    );
    cx.push("sstars", b0p(b1p(implies(ss, s.clone()))));
    cx.push("svuniq", b0p(b1p(implies(s.clone(), b1(not(s))))));
    cx.push("unipoints", b0p(b1p(implies(r.clone(), b0(not(r))))));
}

/// Compiles `m` for `target`. The dictionary lists every variable that
/// occurs in the formula, including one `S_q` per state.
pub fn compile_machine(m: &Machine, target: &Target) -> Result<CompiledEncoding, EncodingError> {
    let q0 = resolve(m, target.q0())?;
    let qr = target.qr().map(|q| resolve(m, q)).transpose()?;
    let mut cx = Ctx { m, parts: vec![] };
    match target {
        Target::FwRecurrence { .. } => {
            cx.extend(compile_grid(GridVariant::Fw));
            fw_machine_parts(&mut cx, false);
            cx.push("initstate", cx.s(q0));
            let qr = qr.unwrap();
            cx.push("recur-target", b0(d0(b1(implies(var(names::S), cx.s(qr))))));
        }
        Target::FwFiniteReach { .. } => {
            cx.extend(compile_grid(GridVariant::Fin));
            fw_machine_parts(&mut cx, true);
            cx.push("initstate", cx.s(q0));
            let qr = qr.unwrap();
            cx.push(
                "reach-target",
                b0p(b1p(implies(and(var(names::N), var(names::END)), b1(implies(var(names::S), cx.s(qr)))))),
            );
        }
        Target::BwNonTermination { .. } | Target::BwRecurrence { .. } => {
            cx.extend(compile_grid(GridVariant::Bw));
            bw_machine_parts(&mut cx, false);
            cx.push("initstate", b0(implies(and(var(names::S), b0(bot())), cx.s(q0))));
            if let Some(qr) = qr {
                rec_bw(&mut cx, qr);
            }
        }
        Target::DenseNonTermination { .. } => {
            cx.extend(compile_grid(GridVariant::Star));
            bw_machine_parts(&mut cx, true);
            for i in 0..m.counters {
                let cm = names::c_minus(i);
                cx.parts.extend(interval_parts(&cm, &describe(&cm)));
                let tsac = bullet(&all_c(i));
                cx.push(&format!("decuniq.{i}"), b1p(b0(iff(var(&cm), and(not(var(&names::c(i))), tsac)))));
            }
            for q in 0..m.states.len() {
                let s = names::state(&m.states[q]);
                cx.parts.extend(interval_parts(&s, &describe(&s)));
            }
            for op in m.ops() {
                let i = names::instr(op);
                cx.parts.extend(interval_parts(&i, &describe(&i)));
            }
            cx.push("initstate", bb0(implies(and(var(names::S), bb0(bot())), cx.s(q0))));
        }
        Target::LossyOmegaReach { .. } => {
            cx.extend(compile_grid(GridVariant::Unique));
            lossy_machine_parts(&mut cx, q0, false);
            rec_lossy(&mut cx);
            let qr = qr.unwrap();
            cx.push("sstar-target", b0p(b1p(implies(var(names::SSTAR), cx.s(qr)))));
        }
        Target::LossyFiniteReach { .. } => {
            cx.extend(compile_grid(GridVariant::UniqueFin));
            lossy_machine_parts(&mut cx, q0, true);
            cx.push("reach-target", cx.s(qr.unwrap()));
            cx.push("endstart", b0p(b1p(iff(var(names::END), var(names::START)))));
        }
    }
    let mut dict = VarDictionary::default();
    for q in &m.states {
        let s = names::state(q);
        dict.insert(&s, &describe(&s));
    }
    for (_, f) in &cx.parts {
        for x in f.vars() {
            dict.insert(&x, &describe(&x));
        }
    }
    let mut enc = CompiledEncoding::new(target.to_string(), cx.parts, dict);
    enc.machine_hash = Some(machine_hash(m));
    Ok(enc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{corpus, parse_machine};

    fn ma() -> Machine {
        parse_machine(corpus::M_A).unwrap()
    }

    #[test]
    fn fw_finite_labels_and_dict() {
        let e = compile_machine(&ma(), &Target::FwFiniteReach { q0: "q0".into(), qr: "h".into() }).unwrap();
        let labels = e.labels();
        for l in ["initfw", "dgenfw", "sgenfin", "counter", "allzero", "griduniquetwo", "fwstep", "reach-target"] {
            assert!(labels.contains(&l), "missing {l}");
        }
        for n in ["@S", "@N", "@end", "@S_q0", "@S_q1", "@S_h", "@C0p", "@C0m", "@C1p", "@C1m"] {
            assert!(e.dict.contains(n), "missing {n}");
        }
        let vars: Vec<String> = e.formula.vars().iter().map(|s| s.to_string()).collect();
        for n in e.dict.names() {
            assert!(vars.iter().any(|v| v == n), "{n} unused");
        }
    }

    #[test]
    fn phi_m_has_four_parts() {
        assert_eq!(phi_m_fw(&ma()).len(), 4);
    }

    #[test]
    fn bw_recurrence_has_rec_gadget() {
        let mb = parse_machine(corpus::M_B).unwrap();
        let e = compile_machine(&mb, &Target::BwRecurrence { q0: "q0".into(), qr: "q0".into() }).unwrap();
        for l in ["erec", "upd", "dgenr", "dgenrdiff", "rtos"] {
            assert!(e.labels().contains(&l));
        }
        assert!(e.dict.contains("@R") && e.dict.contains("@Q"));
        assert!(e.dict.contains("@I_zero0"));
    }

    #[test]
    fn unknown_state_is_an_error() {
        let r = compile_machine(&ma(), &Target::FwFiniteReach { q0: "q0".into(), qr: "nowhere".into() });
        assert!(matches!(r, Err(EncodingError::UnknownState(s)) if s == "nowhere"));
    }

    #[test]
    fn every_target_compiles_and_round_trips() {
        for (_, src) in corpus::ALL {
            let m = parse_machine(src).unwrap();
            let q = m.states[0].clone();
            for name in Target::NAMES {
                let t = Target::from_name(name, &q, Some(&q)).unwrap();
                let e = compile_machine(&m, &t).unwrap();
                let back = CompiledEncoding::from_text(&e.to_text()).unwrap();
                assert_eq!(back.conjuncts, e.conjuncts, "{name}");
                assert_eq!(back.dict, e.dict);
                assert_eq!(back.machine_hash, e.machine_hash);
            }
        }
    }
}
