//! Text syntax for group elements: atoms `a`, `b`, `1`; product `*`; integer
//! power `^` (e.g. `a^-2`); `inv(x)`; `comm(x,y,…)` (left-normed);
//! `conj(x,g)`; parentheses. Whitespace is insignificant.

use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::word::Word;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum WordExpr {
    One,
    A,
    B,
    Mul(Vec<WordExpr>),
    Pow(Box<WordExpr>, #[serde(with = "crate::bigserde::big_int")] BigInt),
    Inv(Box<WordExpr>),
    /// Left-normed: `comm(x,y,z) = comm(comm(x,y),z)`.
    Comm(Vec<WordExpr>),
    Conj(Box<WordExpr>, Box<WordExpr>),
}

impl WordExpr {
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src, pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < src.len() {
            return Err(p.error("unexpected trailing input", p.pos, src.len()));
        }
        Ok(e)
    }

    /// Normal form in the group shifted by `shift`.
    pub fn normalize(&self, params: &Params, shift: usize) -> Result<Word> {
        if shift >= params.levels() {
            return Err(Error::OutOfPrefix { shift, depth: 1, prefix: params.levels() });
        }
        Ok(self.build(params, shift))
    }

    fn build(&self, params: &Params, shift: usize) -> Word {
        match self {
            WordExpr::One => Word::identity(params, shift),
            WordExpr::A => Word::a(params, shift),
            WordExpr::B => Word::b(params, shift),
            WordExpr::Mul(xs) => {
                xs.iter().fold(Word::identity(params, shift), |acc, x| acc.mul(&x.build(params, shift)))
            }
            WordExpr::Pow(x, k) => x.build(params, shift).pow(k),
            WordExpr::Inv(x) => x.build(params, shift).inverse(),
            WordExpr::Comm(xs) => {
                let mut it = xs.iter().map(|x| x.build(params, shift));
                let first = it.next().expect("comm has arguments");
                it.fold(first, |acc, y| acc.comm(&y))
            }
            WordExpr::Conj(x, g) => x.build(params, shift).conj(&g.build(params, shift)),
        }
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::One => write!(f, "1"),
            WordExpr::A => write!(f, "a"),
            WordExpr::B => write!(f, "b"),
            WordExpr::Mul(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "({})", parts.join("*"))
            }
            WordExpr::Pow(x, k) => match **x {
                WordExpr::A | WordExpr::B | WordExpr::One => write!(f, "{x}^{k}"),
                _ => write!(f, "({x})^{k}"),
            },
            WordExpr::Inv(x) => write!(f, "inv({x})"),
            WordExpr::Comm(xs) => {
                let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
                write!(f, "comm({})", parts.join(","))
            }
            WordExpr::Conj(x, g) => write!(f, "conj({x},{g})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str, start: usize, end: usize) -> Error {
        Error::Parse { message: message.to_string(), start, end: end.max(start + 1).min(self.src.len().max(start + 1)) }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.error(&format!("expected '{c}', found '{x}'"), self.pos, self.pos + x.len_utf8())),
            None => Err(self.error(&format!("expected '{c}', found end of input"), self.pos, self.pos)),
        }
    }

    fn expr(&mut self) -> Result<WordExpr> {
        let mut factors = vec![self.power()?];
        while self.peek() == Some('*') {
            self.pos += 1;
            factors.push(self.power()?);
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { WordExpr::Mul(factors) })
    }

    fn power(&mut self) -> Result<WordExpr> {
        let mut base = self.atom()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            let k = self.integer()?;
            base = WordExpr::Pow(Box::new(base), k);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        let paren = self.peek_raw() == Some('(');
        if paren {
            self.pos += 1;
            self.skip_ws();
        }
        let num_start = self.pos;
        if matches!(self.peek_raw(), Some('-') | Some('+')) {
            self.pos += 1;
        }
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        let text = &self.src[num_start..self.pos];
        let value: BigInt =
            text.parse().map_err(|_| self.error("expected an integer exponent", start, self.pos.max(start + 1)))?;
        if paren {
            self.expect(')')?;
        }
        Ok(value)
    }

    fn ident(&mut self) -> &'a str {
        let start = self.pos;
        while matches!(self.peek_raw(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn args(&mut self) -> Result<Vec<WordExpr>> {
        self.expect('(')?;
        let mut out = vec![self.expr()?];
        while self.peek() == Some(',') {
            self.pos += 1;
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<WordExpr> {
        let start = match self.peek() {
            None => return Err(self.error("unexpected end of input", self.pos, self.pos)),
            Some(_) => self.pos,
        };
        if self.peek_raw() == Some('(') {
            self.pos += 1;
            let e = self.expr()?;
            self.expect(')')?;
            return Ok(e);
        }
        let name = self.ident();
        match name {
            "a" => Ok(WordExpr::A),
            "b" => Ok(WordExpr::B),
            "1" => Ok(WordExpr::One),
            "inv" => {
                let mut xs = self.args()?;
                if xs.len() != 1 {
                    return Err(self.error("inv takes one argument", start, self.pos));
                }
                Ok(WordExpr::Inv(Box::new(xs.pop().unwrap())))
            }
            "comm" => {
                let xs = self.args()?;
                if xs.len() < 2 {
                    return Err(self.error("comm takes at least two arguments", start, self.pos));
                }
                Ok(WordExpr::Comm(xs))
            }
            "conj" => {
                let mut xs = self.args()?;
                if xs.len() != 2 {
                    return Err(self.error("conj takes two arguments", start, self.pos));
                }
                let g = xs.pop().unwrap();
                let x = xs.pop().unwrap();
                Ok(WordExpr::Conj(Box::new(x), Box::new(g)))
            }
            "" => {
                let c = self.peek_raw().unwrap();
                Err(self.error(&format!("unexpected character '{c}'"), start, start + c.len_utf8()))
            }
            other => Err(self.error(&format!("unknown name '{other}'"), start, self.pos)),
        }
    }
}
