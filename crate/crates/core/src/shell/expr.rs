//! Exact parser for expressions in `t` and `x1..xn`.
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { ("*" | "/") unary } ;
//! unary  = ("-" | "+") unary | power ;
//! power  = atom [ "^" ["-"] integer ] ;
//! atom   = number | "t" | "x" integer | "(" expr ")" ;
//! number = digits [ "." digits ] ;
//! ```

use num_traits::{One, Signed};
use thiserror::Error;

use crate::exactalg::{parse_rat, Rat, RationalFunction, XPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at column {}: {message}", .pos + 1)]
    Syntax { pos: usize, message: String },
    #[error("unknown variable `{name}` at column {}", .pos + 1)]
    UnknownVariable { pos: usize, name: String },
    #[error("division by an expression depending on x at column {}", .pos + 1)]
    DivisionByXPolynomial { pos: usize },
    #[error("division by zero at column {}", .pos + 1)]
    DivisionByZero { pos: usize },
    #[error("negative power of an expression depending on x at column {}", .pos + 1)]
    NegativePowerOfX { pos: usize },
    #[error("expression depends on x; a function of t alone is required")]
    DependsOnX,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            let text = &src[start..i];
            let value = parse_rat(text)
                .filter(|_| !text.starts_with('.') && !text.ends_with('.'))
                .ok_or_else(|| ExprError::Syntax { pos: start, message: format!("malformed number `{text}`") })?;
            out.push((start, Tok::Num(value)));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            let ch = src[i..].chars().next().unwrap();
            return Err(ExprError::Syntax { pos: i, message: format!("unexpected character `{ch}`") });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    idx: usize,
    end: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.idx).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.idx).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.idx += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax { pos: self.pos(), message: message.into() })
    }

    fn expr(&mut self) -> Result<XPoly, ExprError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<XPoly, ExprError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                self.idx += 1;
                let pos = self.pos();
                let d = self.unary()?;
                acc = divide(&acc, &d, pos)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<XPoly, ExprError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<XPoly, ExprError> {
        let pos = self.pos();
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let neg = self.eat('-');
        let e = match self.peek() {
            Some(Tok::Num(v)) if v.is_integer() && !v.is_negative() => v.to_integer(),
            _ => return self.syntax("expected a nonnegative integer exponent"),
        };
        let e: u32 = match e.try_into() {
            Ok(e) => e,
            Err(_) => return self.syntax("exponent too large"),
        };
        self.idx += 1;
        let p = base.pow(e);
        if neg {
            divide(&XPoly::one(self.nvars), &p, pos).map_err(|err| match err {
                ExprError::DivisionByXPolynomial { pos } => ExprError::NegativePowerOfX { pos },
                other => other,
            })
        } else {
            Ok(p)
        }
    }

    fn atom(&mut self) -> Result<XPoly, ExprError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.idx += 1;
                Ok(XPoly::constant(self.nvars, v))
            }
            Some(Tok::Ident(name)) => {
                self.idx += 1;
                variable(&name, self.nvars).ok_or(ExprError::UnknownVariable { pos, name })
            }
            Some(Tok::Op('(')) => {
                self.idx += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.syntax("expected `)`");
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => self.syntax(format!("unexpected `{c}`")),
            None => self.syntax("unexpected end of input"),
        }
    }
}

fn variable(name: &str, nvars: usize) -> Option<XPoly> {
    if name == "t" {
        let t = RationalFunction::from_poly(crate::exactalg::UniPoly::monomial(Rat::one(), 1));
        return Some(XPoly::from_rf(nvars, t));
    }
    let idx: usize = name.strip_prefix('x')?.parse().ok()?;
    (name.len() > 1 && !name[1..].starts_with('0') && (1..=nvars).contains(&idx)).then(|| XPoly::var(nvars, idx - 1))
}

fn divide(num: &XPoly, den: &XPoly, pos: usize) -> Result<XPoly, ExprError> {
    let d = den.as_rf().ok_or(ExprError::DivisionByXPolynomial { pos })?;
    if d.is_zero() {
        return Err(ExprError::DivisionByZero { pos });
    }
    Ok(num.scale(&(&RationalFunction::one() / &d)))
}

/// Parses an expression polynomial in `x1..x{nvars}` with coefficients
/// rational in `t`.
pub fn parse_expression(src: &str, nvars: usize) -> Result<XPoly, ExprError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ExprError::Empty);
    }
    let mut p = Parser { toks: &toks, idx: 0, end: src.len(), nvars };
    let value = p.expr()?;
    if p.idx < toks.len() {
        return p.syntax("unexpected trailing input");
    }
    Ok(value)
}

/// Parses a rational function of `t`; any `x` variable is rejected.
pub fn parse_rational_function(src: &str) -> Result<RationalFunction, ExprError> {
    parse_expression(src, 0)?.as_rf().ok_or(ExprError::DependsOnX)
}

/// Parses an `x`-free expression over `n` state variables, so that `x1`
/// gives [`ExprError::DependsOnX`] rather than an unknown-variable error.
pub fn parse_t_function(src: &str, nvars: usize) -> Result<RationalFunction, ExprError> {
    parse_expression(src, nvars)?.as_rf().ok_or(ExprError::DependsOnX)
}
