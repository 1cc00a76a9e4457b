//! Bimodal formulas over two boxes, `[0]` (horizontal) and `[1]` (vertical).
//!
//! The abstract syntax only has the primitive connectives. Every other
//! operator is produced by a builder function below and is therefore
//! desugared at construction time.

mod lex;
mod parse;
mod print;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use lex::ParseError;
pub use parse::parse;
pub(crate) use lex::{Lexer, Tok};
pub use print::{print, print_raw};

/// Default propositional names used by the `X` (next-time) macro.
pub const NEXT_N: &str = "@N";
pub const NEXT_S: &str = "@S";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    Var(Arc<str>),
    Top,
    Bot,
    Neg(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Dia0(Arc<Formula>),
    Dia1(Arc<Formula>),
}

use Formula::*;

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

pub fn var(name: &str) -> Formula {
    Var(Arc::from(name))
}

pub fn top() -> Formula {
    Top
}

pub fn bot() -> Formula {
    Bot
}

pub fn not(a: Formula) -> Formula {
    Neg(Arc::new(a))
}

pub fn and(a: Formula, b: Formula) -> Formula {
    And(Arc::new(a), Arc::new(b))
}

/// `a | b` is `~(~a & ~b)`.
pub fn or(a: Formula, b: Formula) -> Formula {
    not(and(not(a), not(b)))
}

/// `a -> b` is `~(a & ~b)`.
pub fn implies(a: Formula, b: Formula) -> Formula {
    not(and(a, not(b)))
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    and(implies(a.clone(), b.clone()), implies(b, a))
}

pub fn dia(i: u8, a: Formula) -> Formula {
    match i {
        0 => Dia0(Arc::new(a)),
        1 => Dia1(Arc::new(a)),
        _ => panic!("modality index must be 0 or 1, got {i}"),
    }
}

pub fn boxm(i: u8, a: Formula) -> Formula {
    not(dia(i, not(a)))
}

/// Reflexive diamond: `a | <i> a`.
pub fn dia_plus(i: u8, a: Formula) -> Formula {
    or(a.clone(), dia(i, a))
}

/// Reflexive box: `a & [i] a`.
pub fn box_plus(i: u8, a: Formula) -> Formula {
    and(a.clone(), boxm(i, a))
}

/// "Exactly one point of the column": `<1>+ (a & [1] ~a)`.
pub fn dia_exact1(a: Formula) -> Formula {
    dia_plus(1, and(a.clone(), boxm(1, not(a))))
}

/// `[i]^<=n a` is the conjunction of `[i]^k a` for `k = 0..=n`.
pub fn box_upto(i: u8, n: usize, a: Formula) -> Formula {
    let mut parts = Vec::with_capacity(n + 1);
    let mut cur = a;
    for k in 0..=n {
        if k > 0 {
            cur = boxm(i, cur);
        }
        parts.push(cur.clone());
    }
    conj(parts)
}

/// Next-time macro `[1](N -> [0](S -> a))` over the given names.
pub fn next_with(a: Formula, n: &str, s: &str) -> Formula {
    boxm(1, implies(var(n), boxm(0, implies(var(s), a))))
}

pub fn next(a: Formula) -> Formula {
    next_with(a, NEXT_N, NEXT_S)
}

/// Left-nested conjunction; the empty conjunction is `true`.
pub fn conj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
    parts.into_iter().reduce(and).unwrap_or(Top)
}

/// Left-nested disjunction; the empty disjunction is `false`.
pub fn disj<I: IntoIterator<Item = Formula>>(parts: I) -> Formula {
    parts.into_iter().reduce(or).unwrap_or(Bot)
}

/// Tick-relativised diamond:
/// `[Tick & <0>(~Tick & (a | <0>a))] | [~Tick & <0>(Tick & (a | <0>a))]`.
pub fn black_dia0(a: Formula, tick: &str) -> Formula {
    let t = var(tick);
    let reach = dia_plus(0, a);
    or(
        and(t.clone(), dia(0, and(not(t.clone()), reach.clone()))),
        and(not(t.clone()), dia(0, and(t, reach))),
    )
}

pub fn black_box0(a: Formula, tick: &str) -> Formula {
    not(black_dia0(not(a), tick))
}

impl Formula {
    pub fn is_atom(&self) -> bool {
        matches!(self, Var(_) | Top | Bot)
    }

    /// Direct children in left-to-right order.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Var(_) | Top | Bot => vec![],
            Neg(a) | Dia0(a) | Dia1(a) => vec![a],
            And(a, b) => vec![a, b],
        }
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Var(_) | Top | Bot => 0,
            Neg(a) => a.modal_depth(),
            And(a, b) => a.modal_depth().max(b.modal_depth()),
            Dia0(a) | Dia1(a) => 1 + a.modal_depth(),
        }
    }

    /// Number of nodes of the syntax tree (shared subtrees counted once per use).
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Arc<str>> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Arc<str>>) {
        match self {
            Var(v) => {
                out.insert(v.clone());
            }
            Top | Bot => {}
            Neg(a) | Dia0(a) | Dia1(a) => a.collect_vars(out),
            And(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Rebuilds the formula bottom-up, giving `f` the chance to replace each
    /// node after its children have been mapped.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Formula) -> Formula) -> Formula {
        let rebuilt = match self {
            Var(_) | Top | Bot => self.clone(),
            Neg(a) => not(a.map_bottom_up(f)),
            And(a, b) => {
                let a = a.map_bottom_up(f);
                and(a, b.map_bottom_up(f))
            }
            Dia0(a) => dia(0, a.map_bottom_up(f)),
            Dia1(a) => dia(1, a.map_bottom_up(f)),
        };
        f(rebuilt)
    }

    pub fn rename(&self, from: &str, to: &str) -> Formula {
        self.map_bottom_up(&mut |g| match &g {
            Var(v) if &**v == from => var(to),
            _ => g,
        })
    }

    /// Double-negation elimination and constant folding.
    pub fn normalize(&self) -> Formula {
        self.map_bottom_up(&mut |g| match g {
            Neg(ref a) => match &**a {
                Neg(b) => (**b).clone(),
                Top => Bot,
                Bot => Top,
                _ => g,
            },
            And(ref a, ref b) => match (&**a, &**b) {
                (Bot, _) | (_, Bot) => Bot,
                (Top, _) => (**b).clone(),
                (_, Top) => (**a).clone(),
                _ => g,
            },
            Dia0(ref a) | Dia1(ref a) if **a == Bot => Bot,
            _ => g,
        })
    }

    /// Replaces every `<0>` by the tick-relativised diamond.
    pub fn bullet(&self, tick: &str) -> Formula {
        match self {
            Var(_) | Top | Bot => self.clone(),
            Neg(a) => not(a.bullet(tick)),
            And(a, b) => and(a.bullet(tick), b.bullet(tick)),
            Dia0(a) => black_dia0(a.bullet(tick), tick),
            Dia1(a) => dia(1, a.bullet(tick)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_is_negated_diamond() {
        let p = var("P");
        assert_eq!(boxm(0, p.clone()), not(Dia0(Arc::new(not(p)))));
    }

    #[test]
    fn next_shape() {
        let want = parse("[1](@N -> [0](@S -> P))").unwrap();
        assert_eq!(next(var("P")), want);
        assert_eq!(parse("X P").unwrap(), want);
    }

    #[test]
    fn box_upto_zero_is_identity() {
        assert_eq!(box_upto(0, 0, var("P")), var("P"));
        assert_eq!(box_upto(1, 1, var("P")), and(var("P"), boxm(1, var("P"))));
    }

    #[test]
    fn modal_depth_and_subformulas() {
        let f = parse("<0>(S & [0] ~S)").unwrap();
        assert_eq!(f.modal_depth(), 2);
        // <0>(..), S & .., S, ~<0>~~S, <0>~~S, ~~S, ~S
        assert_eq!(f.subformulas().len(), 7);
    }

    #[test]
    fn normalize_folds() {
        let f = parse("~~P & true").unwrap();
        assert_eq!(f.normalize(), var("P"));
        assert_eq!(parse("~false").unwrap().normalize(), Top);
        assert_eq!(parse("<1> false | Q").unwrap().normalize(), parse("~(~false & ~Q)").unwrap().normalize());
    }

    #[test]
    fn bullet_leaves_vertical_alone() {
        let f = parse("<1> P").unwrap();
        assert_eq!(f.bullet("@Tick"), f);
        let g = parse("<0> P").unwrap().bullet("@Tick");
        assert_eq!(g, black_dia0(var("P"), "@Tick"));
    }
}
