//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' nat)?
//! base   := integer | name | '(' expr ')'
//! ```
//!
//! A rational literal such as `1/2` is an integer divided by an integer.
//! Division is accepted only when the divisor is a nonzero constant.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expr, Rational};
use crate::error::{Error, Result};
use crate::jet::JetSpace;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Decimal,
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src: text.as_bytes(), pos: 0 };
        let mut out = Vec::new();
        loop {
            let (tok, at) = lx.next()?;
            let end = tok == Tok::End;
            out.push((tok, at));
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            return Ok((t, start));
        }
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.src.get(self.pos) == Some(&b'.') {
                self.pos += 1;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                return Ok((Tok::Decimal, start));
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            return Ok((Tok::Int(digits.parse().expect("digits")), start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
                self.pos += 1;
            }
            while self.src.get(self.pos) == Some(&b'\'') {
                self.pos += 1;
            }
            let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            return Ok((Tok::Name(name.to_string()), start));
        }
        let ch = std::str::from_utf8(&self.src[start..]).ok().and_then(|s| s.chars().next()).unwrap_or('?');
        Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") })
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    at: usize,
    space: &'a JetSpace,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc += &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc -= &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let pos = self.pos();
                    let d = self.unary()?;
                    let c = d.as_constant().ok_or(Error::NonConstantDivisor { pos })?;
                    if c.is_zero() {
                        return Err(Error::DivisionByZero { pos });
                    }
                    acc = acc.scale(&(Rational::from_integer(1.into()) / c));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => {
                let n: u32 = n.try_into().map_err(|_| Error::NonIntegerExponent { pos })?;
                Ok(base.pow(n))
            }
            Tok::End => Err(Error::Syntax { pos, msg: "expected an exponent".into() }),
            _ => Err(Error::NonIntegerExponent { pos }),
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::constant(Rational::from_integer(n))),
            Tok::Name(name) => match self.space.resolve(&name) {
                Some(v) => Ok(Expr::var(v)),
                None => Err(Error::UnknownVariable { name, pos }),
            },
            Tok::LParen => {
                let e = self.expr()?;
                let close = self.pos();
                match self.bump() {
                    Tok::RParen => Ok(e),
                    _ => Err(Error::Syntax { pos: close, msg: "expected `)`".into() }),
                }
            }
            Tok::End => Err(Error::Syntax { pos, msg: "unexpected end of input".into() }),
            Tok::Decimal => Err(Error::Syntax {
                pos,
                msg: "floating-point literals are not supported, write a rational such as 1/2".into(),
            }),
            t => Err(Error::Syntax { pos, msg: format!("unexpected {}", describe(&t)) }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Int(_) => "number",
        Tok::Decimal => "decimal number",
        Tok::Name(_) => "name",
        Tok::Plus => "`+`",
        Tok::Minus => "`-`",
        Tok::Star => "`*`",
        Tok::Slash => "`/`",
        Tok::Caret => "`^`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::End => "end of input",
    }
}

/// Parses `text` into a canonical expression over `space`.
pub fn parse(text: &str, space: &JetSpace) -> Result<Expr> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, at: 0, space };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(Error::Syntax { pos: p.pos(), msg: format!("unexpected {} after expression", describe(t)) }),
    }
}
