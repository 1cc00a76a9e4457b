use super::lex::{Lexer, ParseError, Tok};
use super::*;

/// Parses the text form of a bimodal formula.
///
/// Precedence, tightest first: unary operators, `&`, `|`, `->` (right
/// associative), `<->`. `&`, `|` and `<->` associate to the left.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let toks = Lexer::new(src, false).tokenize()?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.iff()?;
    p.expect_eof()?;
    Ok(f)
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
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

    fn expect_eof(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(self.err(format!("unexpected {} after formula", t.describe()))),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.imp()?;
        while *self.peek() == Tok::Iff {
            self.advance();
            let rhs = self.imp()?;
            lhs = iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Imp {
            self.advance();
            let rhs = self.imp()?;
            return Ok(implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Or {
            self.advance();
            let rhs = self.and()?;
            lhs = or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::And {
            self.advance();
            let rhs = self.unary()?;
            lhs = and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let op = self.peek().clone();
        let build: fn(Formula) -> Formula = match op {
            Tok::Not => not,
            Tok::Dia(0) => |a| dia(0, a),
            Tok::Dia(_) => |a| dia(1, a),
            Tok::Box(0) => |a| boxm(0, a),
            Tok::Box(_) => |a| boxm(1, a),
            Tok::DiaPlus(0) => |a| dia_plus(0, a),
            Tok::DiaPlus(_) => |a| dia_plus(1, a),
            Tok::BoxPlus(0) => |a| box_plus(0, a),
            Tok::BoxPlus(_) => |a| box_plus(1, a),
            Tok::DiaExact1 => dia_exact1,
            Tok::Next => next,
            _ => return self.atom(),
        };
        self.advance();
        Ok(build(self.unary()?))
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(var(&name))
            }
            Tok::True => {
                self.advance();
                Ok(Top)
            }
            Tok::False => {
                self.advance();
                Ok(Bot)
            }
            Tok::LParen => {
                self.advance();
                let f = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err(format!("expected `)`, found {}", self.peek().describe())));
                }
                self.advance();
                Ok(f)
            }
            t => Err(self.err(format!("expected a formula, found {}", t.describe()))),
        }
    }
}
