//! Syntactic translations between frame classes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::gadgets::{b0p, b1, b1p, d1};
use super::{names, CompiledEncoding, VarDictionary};
use crate::formula::*;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DomainKind {
    Decreasing,
    Expanding,
}

/// A name based on `base` that does not occur in `used`.
fn fresh(base: &str, used: &BTreeSet<Arc<str>>) -> String {
    let mut name = base.to_string();
    while used.contains(name.as_str()) {
        name.push('\'');
    }
    name
}

pub fn bullet_translate(phi: &Formula, tick: &str) -> Formula {
    phi.bullet(tick)
}

fn relativize_to(phi: &Formula, d: &Formula) -> Formula {
    match phi {
        Formula::Var(_) | Formula::Top | Formula::Bot => phi.clone(),
        Formula::Neg(a) => not(relativize_to(a, d)),
        Formula::And(a, b) => and(relativize_to(a, d), relativize_to(b, d)),
        Formula::Dia0(a) => dia(0, and(d.clone(), relativize_to(a, d))),
        Formula::Dia1(a) => dia(1, and(d.clone(), relativize_to(a, d))),
    }
}

/// Reduces satisfiability over decreasing or expanding 2-frames to product
/// frames: `D & [0]^<=n [1]^<=n guard & phi^D` with `n` the modal depth.
pub fn relativize(phi: &Formula, mode: DomainKind) -> Formula {
    let d = var(&fresh(names::D, &phi.vars()));
    let n = phi.modal_depth();
    let guard = match mode {
        DomainKind::Decreasing => implies(dia(0, d.clone()), d.clone()),
        DomainKind::Expanding => implies(d.clone(), boxm(0, d.clone())),
    };
    conj([d.clone(), box_upto(0, n, box_upto(1, n, guard)), relativize_to(phi, &d)])
}

/// `[1]+[0]+(<0>true -> [1]<0>true) & phi`.
pub fn product_to_decreasing(phi: &Formula) -> Formula {
    let guard = b1p(b0p(implies(dia(0, top()), b1(dia(0, top())))));
    and(guard, phi.clone())
}

/// The dagger translation for the given `P_psi` names.
pub fn dagger(phi: &Formula, p: &BTreeMap<Formula, String>) -> Formula {
    match phi {
        Formula::Var(_) | Formula::Top | Formula::Bot => phi.clone(),
        Formula::Neg(a) => not(dagger(a, p)),
        Formula::And(a, b) => and(dagger(a, p), dagger(b, p)),
        Formula::Dia0(a) => dia(0, dagger(a, p)),
        Formula::Dia1(a) => or(var(&p[&**a]), d1(dagger(a, p))),
    }
}

/// `chi_phi & phi^dagger`, with one fresh `P_psi` per subformula.
pub fn diff_to_linear(phi: &Formula) -> CompiledEncoding {
    let mut used = phi.vars();
    let mut p = BTreeMap::new();
    let mut dict = VarDictionary::default();
    for (k, psi) in phi.subformulas().into_iter().enumerate() {
        let name = fresh(&format!("@P{k}"), &used);
        used.insert(Arc::from(name.as_str()));
        dict.insert(&name, &format!("P[{}]", print(&psi)));
        p.insert(psi, name);
    }
    let blocks = p.iter().map(|(psi, name)| {
        let pv = var(name);
        let pd = dagger(psi, &p);
        conj([
            not(pv.clone()),
            b1p(implies(pd.clone(), b1(pv.clone()))),
            implies(d1(pv.clone()), dia_plus(1, and(not(pv), pd))),
        ])
    });
    let chi = b0p(conj(blocks));
    CompiledEncoding::new("diff_to_linear".into(), vec![("chi".into(), chi), ("dagger".into(), dagger(phi, &p))], dict)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn relativize_examples() {
        let got = relativize(&p("<0>P"), DomainKind::Decreasing);
        let g = p("<0>@D -> @D");
        let want = conj([
            var("@D"),
            box_upto(0, 1, box_upto(1, 1, g)),
            p("<0>(@D & P)"),
        ]);
        assert_eq!(got, want);
        let g = relativize(&p("P"), DomainKind::Decreasing);
        assert_eq!(g, p("@D & (<0>@D -> @D) & P"));
        let e = relativize(&p("<1><0>P"), DomainKind::Expanding);
        let Formula::And(lhs, _) = &e else { panic!() };
        let Formula::And(_, guard) = &**lhs else { panic!() };
        assert_eq!(**guard, box_upto(0, 2, box_upto(1, 2, p("@D -> [0]@D"))));
    }

    #[test]
    fn relativize_avoids_clash() {
        let g = relativize(&p("@D"), DomainKind::Expanding);
        assert!(g.vars().iter().any(|v| &**v == "@D'"));
    }

    #[test]
    fn product_to_decreasing_shape() {
        for f in ["P", "<0>P", "<1>P"] {
            let g = product_to_decreasing(&p(f));
            assert_eq!(g, and(p("[1]+[0]+(<0>true -> [1]<0>true)"), p(f)));
        }
    }

    #[test]
    fn dagger_examples() {
        let e = diff_to_linear(&p("<1>P"));
        assert_eq!(e.dict.len(), 2);
        let pp = e.dict.name_of("P[P]").unwrap().to_string();
        assert_eq!(e.conjunct("dagger").unwrap(), &or(var(&pp), dia(1, var("P"))));
        let e = diff_to_linear(&p("P"));
        assert_eq!(e.conjunct("dagger").unwrap(), &var("P"));
        assert_eq!(e.dict.len(), 1);
    }

    #[test]
    fn bullet_examples() {
        assert_eq!(
            bullet_translate(&p("<0>S"), "Tick"),
            p("(Tick & <0>(~Tick & (S | <0>S))) | (~Tick & <0>(Tick & (S | <0>S)))")
        );
        assert_eq!(bullet_translate(&p("P"), "Tick"), p("P"));
        assert_eq!(bullet_translate(&p("<1><0>P"), "T"), dia(1, black_dia0(var("P"), "T")));
    }
}
