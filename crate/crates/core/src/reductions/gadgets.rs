//! Building blocks of the encodings: staircase grids, counter layers,
//! counter-operation gadgets and the interval formulas of the tick trick.

use super::names;
use super::{CompiledEncoding, VarDictionary};
use crate::formula::*;
use crate::machines::Op;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GridVariant {
    Fw,
    Fin,
    Bw,
    Star,
    Unique,
    UniqueFin,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    Fw,
    Bw,
    BwBullet,
    Lossy,
}

pub(crate) fn v(name: &str) -> Formula {
    var(name)
}

pub(crate) fn b0(a: Formula) -> Formula {
    boxm(0, a)
}

pub(crate) fn b1(a: Formula) -> Formula {
    boxm(1, a)
}

pub(crate) fn d0(a: Formula) -> Formula {
    dia(0, a)
}

pub(crate) fn d1(a: Formula) -> Formula {
    dia(1, a)
}

pub(crate) fn b0p(a: Formula) -> Formula {
    box_plus(0, a)
}

pub(crate) fn b1p(a: Formula) -> Formula {
    box_plus(1, a)
}

pub(crate) fn bd0(a: Formula) -> Formula {
    black_dia0(a, names::TICK)
}

pub(crate) fn bb0(a: Formula) -> Formula {
    black_box0(a, names::TICK)
}

pub(crate) fn bullet(a: &Formula) -> Formula {
    a.bullet(names::TICK)
}

/// `<0>S & [0][0]~S`: the next horizontal point is the only one with `S`.
fn next_s_only() -> Formula {
    and(d0(v(names::S)), b0(b0(not(v(names::S)))))
}

pub(crate) fn initfw() -> Formula {
    and(v(names::S), b0(not(v(names::S))))
}

pub(crate) fn dgenfw() -> Formula {
    b0p(b1p(implies(v(names::S), d1(v(names::N)))))
}

pub(crate) fn sgenfw() -> Formula {
    b0p(b1p(implies(v(names::N), next_s_only())))
}

pub(crate) fn sgenfin() -> Formula {
    b0p(b1p(implies(and(v(names::N), not(v(names::END))), next_s_only())))
}

pub(crate) fn diaguniq() -> Formula {
    b0p(b1(implies(v(names::N), b1(not(v(names::N))))))
}

pub(crate) fn initfbw() -> Formula {
    d0(and(v(names::S), b0(bot())))
}

pub(crate) fn dgenbw() -> Formula {
    b1p(d0(v(names::N)))
}

pub(crate) fn sgenbw() -> Formula {
    b1p(b0(implies(v(names::N), and(b1(not(v(names::N))), d1(v(names::S))))))
}

pub(crate) fn sgen() -> Formula {
    b1p(b0(implies(v(names::N), next_s_only())))
}

pub(crate) fn suni() -> Formula {
    b1p(b0(implies(v(names::S), and(b0(not(v(names::S))), b1(not(v(names::S)))))))
}

pub(crate) fn initbwd() -> Formula {
    bd0(and(v(names::S), b1p(bb0(bot()))))
}

pub(crate) fn tick() -> Formula {
    let t = v(names::TICK);
    b1p(b0p(implies(or(t.clone(), d1(t.clone())), and(t.clone(), b1(t)))))
}

fn dict_for(f: &[(String, Formula)], extra: &[(&str, &str)]) -> VarDictionary {
    let mut d = VarDictionary::default();
    for (name, meaning) in extra {
        d.insert(name, meaning);
    }
    for (_, g) in f {
        for x in g.vars() {
            d.insert(&x, &describe(&x));
        }
    }
    d
}

/// Readable meaning of an encoding variable name.
pub(crate) fn describe(name: &str) -> String {
    let base = name.strip_prefix('@').unwrap_or(name);
    if let Some(rest) = base.strip_prefix('C') {
        if let Some(i) = rest.strip_suffix("m'") {
            return format!("C{i}-'");
        }
        if let Some(i) = rest.strip_suffix('p') {
            return format!("C{i}+");
        }
        if let Some(i) = rest.strip_suffix('m') {
            return format!("C{i}-");
        }
    }
    if base == "Sstar" {
        return "S*".to_string();
    }
    base.to_string()
}

fn labelled(parts: Vec<(&str, Formula)>) -> Vec<(String, Formula)> {
    parts.into_iter().map(|(l, f)| (l.to_string(), f)).collect()
}

pub fn compile_grid(variant: GridVariant) -> CompiledEncoding {
    let parts: Vec<(String, Formula)> = match variant {
        GridVariant::Fw => labelled(vec![("initfw", initfw()), ("dgenfw", dgenfw()), ("sgenfw", sgenfw())]),
        GridVariant::Fin => labelled(vec![("initfw", initfw()), ("dgenfw", dgenfw()), ("sgenfin", sgenfin())]),
        GridVariant::Unique => labelled(vec![
            ("initfw", initfw()),
            ("dgenfw", dgenfw()),
            ("sgenfw", sgenfw()),
            ("diaguniq", diaguniq()),
        ]),
        GridVariant::UniqueFin => labelled(vec![
            ("initfw", initfw()),
            ("dgenfw", dgenfw()),
            ("sgenfin", sgenfin()),
            ("diaguniq", diaguniq()),
        ]),
        GridVariant::Bw => labelled(vec![
            ("initfbw", initfbw()),
            ("dgenbw", dgenbw()),
            ("sgenbw", sgenbw()),
            ("sgen", sgen()),
            ("suni", suni()),
        ]),
        GridVariant::Star => {
            let mut p = labelled(vec![
                ("initbwd", initbwd()),
                ("dgenbw.bullet", bullet(&dgenbw())),
                ("sgenbw.bullet", bullet(&sgenbw())),
                ("sgen.bullet", bullet(&sgen())),
                ("suni.bullet", bullet(&suni())),
                ("tick", tick()),
            ]);
            p.extend(interval_parts(names::N, "N"));
            p.extend(interval_parts(names::S, "S"));
            p
        }
    };
    let dict = dict_for(&parts, &[]);
    CompiledEncoding::new(format!("grid_{}", grid_name(variant)), parts, dict)
}

pub(crate) fn grid_name(v: GridVariant) -> &'static str {
    match v {
        GridVariant::Fw => "fw",
        GridVariant::Fin => "fin",
        GridVariant::Bw => "bw",
        GridVariant::Star => "star",
        GridVariant::Unique => "unique",
        GridVariant::UniqueFin => "unique_fin",
    }
}

/// The five interval conjuncts for `p`, labelled `Interval_<role>.<name>`.
pub(crate) fn interval_parts(p: &str, role: &str) -> Vec<(String, Formula)> {
    let pv = v(p);
    let pp = v(&names::primed(p));
    let wrap = |f: Formula| b1p(b0p(f));
    vec![
        ("puniq", wrap(implies(pv.clone(), bb0(not(pv.clone()))))),
        ("int1", wrap(implies(and(d0(pv.clone()), bb0(not(pv.clone()))), pv.clone()))),
        ("int5", wrap(implies(and(pv.clone(), not(bd0(top()))), b0(pv.clone())))),
        ("int2", wrap(implies(and(pv.clone(), bd0(top())), bd0(pp.clone())))),
        ("int4", wrap(implies(pv.clone(), b0(implies(bd0(pp), pv))))),
    ]
    .into_iter()
    .map(|(l, f)| (format!("Interval_{role}.{l}"), f))
    .collect()
}

pub fn compile_interval(p: &str) -> CompiledEncoding {
    let parts = interval_parts(p, &describe(p));
    let dict = dict_for(&parts, &[]);
    CompiledEncoding::new(format!("interval_{p}"), parts, dict)
}

pub(crate) fn all_c(i: usize) -> Formula {
    let n = v(names::N);
    and(d0(n.clone()), b0(implies(or(n.clone(), d0(n)), v(&names::c(i)))))
}

pub(crate) fn till_start_all_c(i: usize) -> Formula {
    let n = v(names::N);
    and(d0(n.clone()), b0(implies(or(n.clone(), d0(n)), and(not(v(names::START)), v(&names::c(i))))))
}

pub(crate) fn counter_fw(n: usize) -> Formula {
    conj((0..n).map(|i| {
        let p = v(&names::c_plus(i));
        let m = v(&names::c_minus(i));
        b0p(b1p(conj([
            implies(p.clone(), b0(p.clone())),
            implies(m.clone(), b0(m.clone())),
            implies(m, p),
        ])))
    }))
}

pub(crate) fn counter_bw(n: usize) -> Formula {
    b1p(b0(conj((0..n).map(|i| implies(v(&names::c(i)), or(v(names::N), all_c(i)))))))
}

pub fn compile_counter_layer(variant: Variant, n: usize) -> CompiledEncoding {
    let parts: Vec<(String, Formula)> = match variant {
        Variant::Fw => vec![("counter".into(), counter_fw(n))],
        Variant::Bw => vec![("counterbw".into(), counter_bw(n))],
        Variant::BwBullet => vec![("counterbw.bullet".into(), bullet(&counter_bw(n)))],
        Variant::Lossy => (0..n).map(|i| (format!("TillStartAllC{i}"), till_start_all_c(i))).collect(),
    };
    let dict = dict_for(&parts, &[]);
    CompiledEncoding::new(format!("counter_{}", variant_name(variant)), parts, dict)
}

pub(crate) fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Fw => "fw",
        Variant::Bw => "bw",
        Variant::BwBullet => "bw_bullet",
        Variant::Lossy => "lossy",
    }
}

#[derive(Clone, Copy)]
enum Change {
    Fix,
    Inc,
    Dec,
}

fn change(variant: Variant, kind: Change, i: usize) -> Formula {
    match variant {
        Variant::Fw => {
            let p = v(&names::c_plus(i));
            let m = v(&names::c_minus(i));
            let keep_m = b1p(implies(b0(m.clone()), m.clone()));
            match kind {
                Change::Fix => and(b1p(implies(b0(p.clone()), p)), keep_m),
                Change::Inc => and(dia_exact1(and(not(p.clone()), b0(p))), keep_m),
                Change::Dec => and(dia_exact1(and(not(m.clone()), b0(m))), b1p(implies(b0(p.clone()), p))),
            }
        }
        Variant::Bw | Variant::BwBullet => {
            let c = v(&names::c(i));
            let f = match kind {
                Change::Fix => b1p(iff(c, all_c(i))),
                Change::Inc => b1p(iff(c, or(v(names::N), all_c(i)))),
                Change::Dec => and(b1p(implies(c.clone(), all_c(i))), dia_exact1(and(not(c), all_c(i)))),
            };
            if variant == Variant::BwBullet {
                bullet(&f)
            } else {
                f
            }
        }
        Variant::Lossy => {
            let c = v(&names::c(i));
            match kind {
                Change::Fix => b1p(implies(c, till_start_all_c(i))),
                Change::Inc => b1p(implies(c, or(v(names::N), till_start_all_c(i)))),
                Change::Dec => and(
                    b1p(implies(c.clone(), till_start_all_c(i))),
                    dia_plus(1, and(not(c), till_start_all_c(i))),
                ),
            }
        }
    }
}

pub fn fix(variant: Variant, i: usize) -> Formula {
    change(variant, Change::Fix, i)
}

pub fn inc(variant: Variant, i: usize) -> Formula {
    change(variant, Change::Inc, i)
}

pub fn dec(variant: Variant, i: usize) -> Formula {
    change(variant, Change::Dec, i)
}

/// `Do_op` for a machine with `n` counters.
pub fn compile_op_gadget(variant: Variant, op: Op, n: usize) -> Formula {
    assert!(op.counter() < n, "counter index {} out of range for {n} counters", op.counter());
    let i = op.counter();
    let others = |skip: Option<usize>| (0..n).filter(move |&j| Some(j) != skip).map(move |j| fix(variant, j));
    match op {
        Op::Inc(_) => conj(std::iter::once(inc(variant, i)).chain(others(Some(i)))),
        Op::Dec(_) => conj(std::iter::once(dec(variant, i)).chain(others(Some(i)))),
        Op::Zero(_) => {
            let test = match variant {
                Variant::Fw => b1p(implies(v(&names::c_plus(i)), v(&names::c_minus(i)))),
                Variant::BwBullet => bullet(&b1p(not(v(&names::c(i))))),
                Variant::Bw | Variant::Lossy => b1p(not(v(&names::c(i)))),
            };
            conj(std::iter::once(test).chain(others(None)))
        }
    }
}
