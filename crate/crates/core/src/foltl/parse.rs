use super::*;
use crate::formula::{Lexer, ParseError, Tok};

/// Parses a one-variable first-order temporal formula.
///
/// Atoms are `P(x)`; all atoms and quantifiers must use the same variable.
/// Unary operators: `~`, `F>`, `[F]`, `E!= x`, `E x`, `E>=2 x`, `E=1 x`.
pub fn parse_foltl(src: &str) -> Result<Foltl, ParseError> {
    let toks = Lexer::new(src, true).tokenize()?;
    let mut p = Parser { toks, pos: 0, var: None };
    let f = p.iff()?;
    if p.peek() != &Tok::Eof {
        return Err(p.err(format!("unexpected {} after formula", p.peek().describe())));
    }
    Ok(f)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    var: Option<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: String) -> ParseError {
        let (_, line, col) = self.toks[self.pos];
        ParseError { line, col, msg }
    }

    fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if *self.peek() != t {
            return Err(self.err(format!("expected {}, found {}", t.describe(), self.peek().describe())));
        }
        self.advance();
        Ok(())
    }

    fn variable(&mut self) -> Result<(), ParseError> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                match &self.var {
                    Some(v) if *v != x => {
                        return Err(self.err(format!("second variable `{x}` (only `{v}` allowed)")));
                    }
                    _ => self.var = Some(x),
                }
                self.advance();
                Ok(())
            }
            t => Err(self.err(format!("expected a variable, found {}", t.describe()))),
        }
    }

    fn iff(&mut self) -> Result<Foltl, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.advance();
            let rhs = self.imp()?;
            lhs = f_iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Foltl, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Imp {
            self.advance();
            return Ok(f_implies(lhs, self.imp()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Foltl, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.advance();
            let rhs = self.and()?;
            lhs = f_or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Foltl, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.advance();
            let rhs = self.unary()?;
            lhs = fand(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Foltl, ParseError> {
        let op = self.peek().clone();
        let (build, binds): (fn(Foltl) -> Foltl, bool) = match op {
            Tok::Not => (fnot, false),
            Tok::FutDia => (dia_f, false),
            Tok::FutBox => (box_f, false),
            Tok::ExistsNe => (exists_ne, true),
            Tok::Exists => (exists, true),
            Tok::ExistsGe2 => (exists_ge2, true),
            Tok::ExistsEq1 => (exists_eq1, true),
            _ => return self.atom(),
        };
        self.advance();
        if binds {
            self.variable()?;
        }
        Ok(build(self.unary()?))
    }

    fn atom(&mut self) -> Result<Foltl, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                self.expect(Tok::LParen)?;
                self.variable()?;
                self.expect(Tok::RParen)?;
                Ok(pred(&name))
            }
            Tok::True => {
                self.advance();
                Ok(Foltl::Top)
            }
            Tok::False => {
                self.advance();
                Ok(Foltl::Bot)
            }
            Tok::LParen => {
                self.advance();
                let f = self.iff()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            t => Err(self.err(format!("expected a formula, found {}", t.describe()))),
        }
    }
}
