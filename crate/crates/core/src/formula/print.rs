use super::*;

const P_IFF: u8 = 1;
const P_IMP: u8 = 2;
const P_OR: u8 = 3;
const P_AND: u8 = 4;
const P_UNARY: u8 = 5;

/// Prints a formula, re-sugaring the patterns produced by the builders.
///
/// The output always parses back to the identical tree.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    Printer { sugar: true }.go(f, 0, &mut out);
    out
}

/// Prints using only the primitive connectives.
pub fn print_raw(f: &Formula) -> String {
    let mut out = String::new();
    Printer { sugar: false }.go(f, 0, &mut out);
    out
}

struct Printer {
    sugar: bool,
}

enum View<'a> {
    Atom(String),
    Unary(String, &'a Formula),
    Binary(&'static str, u8, &'a Formula, &'a Formula),
}

fn as_neg(f: &Formula) -> Option<&Formula> {
    match f {
        Neg(a) => Some(a),
        _ => None,
    }
}

fn as_and(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        And(a, b) => Some((a, b)),
        _ => None,
    }
}

fn as_dia(f: &Formula) -> Option<(u8, &Formula)> {
    match f {
        Dia0(a) => Some((0, a)),
        Dia1(a) => Some((1, a)),
        _ => None,
    }
}

/// `~<i>~a`
fn as_box(f: &Formula) -> Option<(u8, &Formula)> {
    let (i, inner) = as_dia(as_neg(f)?)?;
    Some((i, as_neg(inner)?))
}

/// `~(a & ~b)`
fn as_imp(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (a, nb) = as_and(as_neg(f)?)?;
    Some((a, as_neg(nb)?))
}

/// `~(~a & ~b)`
fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    let (na, nb) = as_and(as_neg(f)?)?;
    Some((as_neg(na)?, as_neg(nb)?))
}

fn is_var(f: &Formula, name: &str) -> bool {
    matches!(f, Var(v) if &**v == name)
}

impl Printer {
    fn view<'a>(&self, f: &'a Formula) -> View<'a> {
        if self.sugar {
            if let Some(v) = self.sugar_view(f) {
                return v;
            }
        }
        match f {
            Var(v) => View::Atom(v.to_string()),
            Top => View::Atom("true".into()),
            Bot => View::Atom("false".into()),
            Neg(a) => View::Unary("~".into(), a),
            And(a, b) => View::Binary("&", P_AND, a, b),
            Dia0(a) => View::Unary("<0> ".into(), a),
            Dia1(a) => View::Unary("<1> ".into(), a),
        }
    }

    fn sugar_view<'a>(&self, f: &'a Formula) -> Option<View<'a>> {
        if let Some((l, r)) = as_and(f) {
            if let (Some((a, b)), Some((b2, a2))) = (as_imp(l), as_imp(r)) {
                if a == a2 && b == b2 {
                    return Some(View::Binary("<->", P_IFF, a, b));
                }
            }
            if let Some((i, a)) = as_box(r) {
                if a == l {
                    return Some(View::Unary(format!("[{i}]+ "), l));
                }
            }
            return None;
        }
        if let Some((a, b)) = as_or(f) {
            if let Some((1, body)) = as_dia(b) {
                if body == a {
                    if let Some((phi, rest)) = as_and(a) {
                        if let Some((1, nphi)) = as_box(rest) {
                            if as_neg(nphi) == Some(phi) {
                                return Some(View::Unary("<1>=1 ".into(), phi));
                            }
                        }
                    }
                }
            }
            if let Some((i, body)) = as_dia(b) {
                if body == a {
                    return Some(View::Unary(format!("<{i}>+ "), a));
                }
            }
            return Some(View::Binary("|", P_OR, a, b));
        }
        if let Some((a, b)) = as_imp(f) {
            return Some(View::Binary("->", P_IMP, a, b));
        }
        if let Some((i, a)) = as_box(f) {
            if i == 1 {
                if let Some((n, rest)) = as_imp(a) {
                    if let Some((0, inner)) = as_box(rest) {
                        if let Some((s, body)) = as_imp(inner) {
                            if is_var(n, NEXT_N) && is_var(s, NEXT_S) {
                                return Some(View::Unary("X ".into(), body));
                            }
                        }
                    }
                }
            }
            return Some(View::Unary(format!("[{i}] "), a));
        }
        None
    }

    fn go(&self, f: &Formula, ctx: u8, out: &mut String) {
        match self.view(f) {
            View::Atom(s) => out.push_str(&s),
            View::Unary(op, a) => {
                out.push_str(&op);
                self.go(a, P_UNARY, out);
            }
            View::Binary(op, prec, a, b) => {
                let paren = prec < ctx;
                if paren {
                    out.push('(');
                }
                // `->` is right associative, the others associate to the left.
                let (lp, rp) = if prec == P_IMP { (prec + 1, prec) } else { (prec, prec + 1) };
                self.go(a, lp, out);
                out.push(' ');
                out.push_str(op);
                out.push(' ');
                self.go(b, rp, out);
                if paren {
                    out.push(')');
                }
            }
        }
    }
}
