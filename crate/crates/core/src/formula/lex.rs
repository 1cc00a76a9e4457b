use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
    Comma,
    Dia(u8),
    Box(u8),
    DiaPlus(u8),
    BoxPlus(u8),
    DiaExact1,
    Next,
    // first-order temporal extension
    FutDia,
    FutBox,
    ExistsNe,
    Exists,
    ExistsGe2,
    ExistsEq1,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("{other:?}"),
        }
    }
}

/// Tokenizer shared by the bimodal and first-order temporal grammars.
pub struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    foltl: bool,
}

pub fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_' || c == b'@'
}

pub fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'\''
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str, foltl: bool) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1, foltl }
    }

    fn peek(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek(0) {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s.as_bytes())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.starts_with(s) {
            for _ in 0..s.len() {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    pub fn error(&self, line: usize, col: usize, msg: impl Into<String>) -> ParseError {
        ParseError { line, col, msg: msg.into() }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek(0) {
            if c == b'#' {
                while let Some(c) = self.peek(0) {
                    if c == b'\n' {
                        break;
                    }
                    self.bump();
                }
            } else if c.is_ascii_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Returns the next token with its starting line and column.
    pub fn next_token(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let Some(c) = self.peek(0) else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match c {
            b'~' => {
                self.bump();
                Tok::Not
            }
            b'&' => {
                self.bump();
                Tok::And
            }
            b'|' => {
                self.bump();
                Tok::Or
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'-' => {
                if self.eat("->") {
                    Tok::Imp
                } else {
                    return Err(self.error(line, col, "expected `->`"));
                }
            }
            b'<' => {
                if self.eat("<->") {
                    Tok::Iff
                } else if self.eat("<1>=1") {
                    Tok::DiaExact1
                } else if self.eat("<0>") {
                    if self.eat("+") { Tok::DiaPlus(0) } else { Tok::Dia(0) }
                } else if self.eat("<1>") {
                    if self.eat("+") { Tok::DiaPlus(1) } else { Tok::Dia(1) }
                } else {
                    return Err(self.error(line, col, "expected `<0>`, `<1>` or `<->`"));
                }
            }
            b'[' => {
                if self.eat("[0]") {
                    if self.eat("+") { Tok::BoxPlus(0) } else { Tok::Box(0) }
                } else if self.eat("[1]") {
                    if self.eat("+") { Tok::BoxPlus(1) } else { Tok::Box(1) }
                } else if self.foltl && self.eat("[F]") {
                    Tok::FutBox
                } else {
                    return Err(self.error(line, col, "expected `[0]` or `[1]`"));
                }
            }
            c if is_ident_start(c) => {
                let start = self.pos;
                self.bump();
                while self.peek(0).is_some_and(is_ident_char) {
                    self.bump();
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" if !self.foltl => Tok::Next,
                    "F" if self.foltl && self.peek(0) == Some(b'>') => {
                        self.bump();
                        Tok::FutDia
                    }
                    "E" if self.foltl => {
                        if self.eat("!=") {
                            Tok::ExistsNe
                        } else if self.eat(">=2") {
                            Tok::ExistsGe2
                        } else if self.eat("=1") {
                            Tok::ExistsEq1
                        } else {
                            Tok::Exists
                        }
                    }
                    _ => Tok::Ident(word),
                }
            }
            other => {
                return Err(self.error(line, col, format!("unexpected character `{}`", other as char)));
            }
        };
        Ok((tok, line, col))
    }

    pub fn tokenize(mut self) -> Result<Vec<(Tok, usize, usize)>, ParseError> {
        let mut out = Vec::new();
        loop {
            let t = self.next_token()?;
            let done = t.0 == Tok::Eof;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }
}
