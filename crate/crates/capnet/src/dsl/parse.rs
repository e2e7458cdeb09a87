//! Lexer and recursive-descent parser. Error positions are 1-based byte
//! offsets into the source line (the DSL is single-line, so line is
//! always reported too for uniformity with multi-line config files).

use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Error, PartialEq)]
#[error("parse error at line {line}, column {col}: {msg}")]
pub struct ParseError {
    /// 1-based byte offset into the source.
    pub offset: usize,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err_at(src: &str, offset: usize, msg: impl Into<String>) -> ParseError {
    let mut line = 1;
    let mut col = 1;
    for b in src.as_bytes().iter().take(offset.saturating_sub(1)) {
        if *b == b'\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    ParseError {
        offset,
        line,
        col,
        msg: msg.into(),
    }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    /// Returns the next token and its 1-based starting offset.
    fn next(&mut self) -> Result<(Tok, usize), (usize, String)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, self.src.len() + 1));
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let simple = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = simple {
            self.pos += 1;
            return Ok((t, start + 1));
        }
        if c.is_ascii_digit() || c == b'.' {
            let mut end = self.pos;
            let mut seen_dot = false;
            while end < self.src.len()
                && (self.src[end].is_ascii_digit() || (self.src[end] == b'.' && !seen_dot))
            {
                if self.src[end] == b'.' {
                    seen_dot = true;
                }
                end += 1;
            }
            // optional exponent
            if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
                let mut e = end + 1;
                if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                    e += 1;
                }
                if e < self.src.len() && self.src[e].is_ascii_digit() {
                    while e < self.src.len() && self.src[e].is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            let text = std::str::from_utf8(&self.src[start..end]).unwrap();
            let v: f64 = text
                .parse()
                .map_err(|_| (start + 1, format!("invalid number `{text}`")))?;
            if !v.is_finite() {
                return Err((start + 1, format!("number `{text}` overflows f64")));
            }
            self.pos = end;
            return Ok((Tok::Num(v), start + 1));
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let mut end = self.pos;
            while end < self.src.len()
                && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
            {
                end += 1;
            }
            let text = std::str::from_utf8(&self.src[start..end]).unwrap().to_string();
            self.pos = end;
            return Ok((Tok::Ident(text), start + 1));
        }
        Err((
            start + 1,
            format!("unexpected character `{}`", c as char),
        ))
    }
}

struct Parser<'a> {
    src: &'a str,
    lexer: Lexer<'a>,
    tok: Tok,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, offset) = lexer.next().map_err(|(o, m)| err_at(src, o, m))?;
        Ok(Parser {
            src,
            lexer,
            tok,
            offset,
        })
    }

    fn bump(&mut self) -> Result<(), ParseError> {
        let (tok, offset) = self
            .lexer
            .next()
            .map_err(|(o, m)| err_at(self.src, o, m))?;
        self.tok = tok;
        self.offset = offset;
        Ok(())
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        err_at(self.src, self.offset, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.bump()
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(&self.tok))))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.tok == Tok::Minus {
            self.bump()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            // right-associative; the exponent may carry a unary minus
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump()?;
                if self.tok == Tok::LParen {
                    let call_offset = self.offset;
                    let func = Func::from_name(&name).ok_or_else(|| {
                        err_at(self.src, call_offset, format!("unknown function `{name}`"))
                    })?;
                    self.bump()?;
                    let mut args = vec![self.expr()?];
                    while self.tok == Tok::Comma {
                        self.bump()?;
                        args.push(self.expr()?);
                    }
                    if args.len() != func.arity() {
                        return Err(self.error(format!(
                            "`{name}` takes {} argument{}, got {}",
                            func.arity(),
                            if func.arity() == 1 { "" } else { "s" },
                            args.len()
                        )));
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    return Ok(Expr::Call(func, args));
                }
                Ok(match name.as_str() {
                    "x" => Expr::Var(Var::X),
                    "y" => Expr::Var(Var::Y),
                    "z" => Expr::Var(Var::Z),
                    _ => Expr::Param(name),
                })
            }
            other => Err(self.error(format!("expected expression, found {}", describe(&other)))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eof => "end of input".into(),
    }
}

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Tok::Eof {
        return Err(p.error(format!("unexpected {}", describe(&p.tok))));
    }
    Ok(e)
}
