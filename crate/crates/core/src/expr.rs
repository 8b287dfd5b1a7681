//! Coordinate expressions in the arclength variable `s`.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' integer)?
//! base   := number | 's' | func '(' expr ')' | '(' expr ')' | '-' base
//! func   := sin | cos | sinh | cosh | exp | sqrt
//! ```
//!
//! Unary minus binds tighter than `^`, so `-s^2` is `(-s)^2`; write
//! `-(s^2)` for the other reading. Exponents are integers and may carry a
//! leading `-`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::jet::{Jet, DIVISION_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    Sqrt,
}

impl Func {
    const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Sinh, Func::Cosh, Func::Exp, Func::Sqrt];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Var,
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i32),
    Call(Func, Box<ExprAst>),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {offset}: expected one of {expected:?}, found {found}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: BTreeSet<&'static str>,
    pub found: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero at s = {s}")]
    DivisionByZero { s: f64 },
    #[error("square root of a negative value at s = {s}")]
    NegativeSqrt { s: f64 },
}

const EXPECT_OPERAND: [&str; 5] = ["number", "'s'", "function", "'('", "'-'"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn error(&mut self, expected: &[&'static str]) -> ParseError {
        self.skip_ws();
        let found = match self.src[self.pos..].chars().next() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        };
        ParseError {
            offset: self.pos,
            expected: expected.iter().copied().collect(),
            found,
        }
    }

    fn eat(&mut self, want: char) -> bool {
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    /// ASCII '-' or the Unicode minus sign.
    fn eat_minus(&mut self) -> bool {
        self.eat('-') || self.eat('\u{2212}')
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_minus() {
                lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = ExprAst::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.base()?;
        if self.eat('^') {
            let exp = self.integer()?;
            Ok(ExprAst::Pow(Box::new(base), exp))
        } else {
            Ok(base)
        }
    }

    fn integer(&mut self) -> Result<i32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.eat_minus();
        self.skip_ws();
        let digits_start = self.pos;
        let len = self.src[self.pos..].bytes().take_while(u8::is_ascii_digit).count();
        if len == 0 {
            return Err(self.error(&["integer"]));
        }
        self.pos += len;
        let text = &self.src[digits_start..self.pos];
        let value: i32 = text.parse().map_err(|_| ParseError {
            offset: start,
            expected: ["integer"].into_iter().collect(),
            found: format!("'{text}' (out of range)"),
        })?;
        Ok(if negative { -value } else { value })
    }

    fn number(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let int_len = digits(&mut i);
        let mut frac_len = 0;
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            frac_len = digits(&mut i);
        }
        if int_len + frac_len == 0 {
            return Err(self.error(&EXPECT_OPERAND));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) > 0 {
                i = j;
            }
        }
        let text = &self.src[start..i];
        let value: f64 = text.parse().map_err(|_| ParseError {
            offset: start,
            expected: ["number"].into_iter().collect(),
            found: format!("'{text}'"),
        })?;
        self.pos = i;
        Ok(ExprAst::Num(value))
    }

    fn base(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(&["')'", "operator"]));
                }
                Ok(inner)
            }
            Some('-') | Some('\u{2212}') => {
                self.eat_minus();
                Ok(ExprAst::Neg(Box::new(self.base()?)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let len = self.src[start..]
                    .bytes()
                    .take_while(|b| b.is_ascii_alphanumeric() || *b == b'_')
                    .count();
                let ident = &self.src[start..start + len];
                if ident == "s" {
                    self.pos += len;
                    return Ok(ExprAst::Var);
                }
                let Some(func) = Func::from_name(ident) else {
                    return Err(ParseError {
                        offset: start,
                        expected: EXPECT_OPERAND.into_iter().collect(),
                        found: format!("identifier '{ident}'"),
                    });
                };
                self.pos += len;
                if !self.eat('(') {
                    return Err(self.error(&["'('"]));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error(&["')'", "operator"]));
                }
                Ok(ExprAst::Call(func, Box::new(arg)))
            }
            _ => Err(self.error(&EXPECT_OPERAND)),
        }
    }
}

/// Parses an expression in `s`. Errors carry the byte offset of the problem.
pub fn parse_expr(text: &str) -> Result<ExprAst, ParseError> {
    let mut p = Parser { src: text, pos: 0 };
    let ast = p.expr()?;
    if p.peek().is_some() {
        return Err(p.error(&["'+'", "'-'", "'*'", "'/'", "'^'", "end of input"]));
    }
    Ok(ast)
}

impl std::str::FromStr for ExprAst {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

/// Canonical fully-parenthesized form; reparses to the same tree.
impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(v) => write!(f, "{v:?}"),
            ExprAst::Var => f.write_str("s"),
            ExprAst::Neg(a) => write!(f, "-({a})"),
            ExprAst::Add(a, b) => write!(f, "({a} + {b})"),
            ExprAst::Sub(a, b) => write!(f, "({a} - {b})"),
            ExprAst::Mul(a, b) => write!(f, "({a} * {b})"),
            ExprAst::Div(a, b) => write!(f, "({a} / {b})"),
            ExprAst::Pow(a, n) => write!(f, "({a})^{n}"),
            ExprAst::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl ExprAst {
    /// Plain evaluation at `s`.
    pub fn eval(&self, s: f64) -> Result<f64, EvalError> {
        Ok(match self {
            ExprAst::Num(v) => *v,
            ExprAst::Var => s,
            ExprAst::Neg(a) => -a.eval(s)?,
            ExprAst::Add(a, b) => a.eval(s)? + b.eval(s)?,
            ExprAst::Sub(a, b) => a.eval(s)? - b.eval(s)?,
            ExprAst::Mul(a, b) => a.eval(s)? * b.eval(s)?,
            ExprAst::Div(a, b) => {
                let d = b.eval(s)?;
                if d.abs() < DIVISION_FLOOR {
                    return Err(EvalError::DivisionByZero { s });
                }
                a.eval(s)? / d
            }
            ExprAst::Pow(a, n) => {
                // same squaring sequence as Jet::powi so order-0 jets agree bitwise
                let x = a.eval(s)?;
                let mut result = 1.0;
                let mut square = x;
                let mut e = n.unsigned_abs();
                while e > 0 {
                    if e & 1 == 1 {
                        result *= square;
                    }
                    e >>= 1;
                    if e > 0 {
                        square *= square;
                    }
                }
                if *n < 0 {
                    if result.abs() < DIVISION_FLOOR {
                        return Err(EvalError::DivisionByZero { s });
                    }
                    1.0 / result
                } else {
                    result
                }
            }
            ExprAst::Call(func, a) => {
                let x = a.eval(s)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(EvalError::NegativeSqrt { s });
                        }
                        x.sqrt()
                    }
                }
            }
        })
    }

    /// Derivatives `0..=order` of the expression at `s0`.
    pub fn eval_jet(&self, s0: f64, order: usize) -> Result<Jet, EvalError> {
        Ok(match self {
            ExprAst::Num(v) => Jet::constant(s0, *v, order),
            ExprAst::Var => Jet::variable(s0, order),
            ExprAst::Neg(a) => -&a.eval_jet(s0, order)?,
            ExprAst::Add(a, b) => &a.eval_jet(s0, order)? + &b.eval_jet(s0, order)?,
            ExprAst::Sub(a, b) => &a.eval_jet(s0, order)? - &b.eval_jet(s0, order)?,
            ExprAst::Mul(a, b) => &a.eval_jet(s0, order)? * &b.eval_jet(s0, order)?,
            ExprAst::Div(a, b) => a.eval_jet(s0, order)?.try_div(&b.eval_jet(s0, order)?)?,
            ExprAst::Pow(a, n) => a.eval_jet(s0, order)?.powi(*n)?,
            ExprAst::Call(func, a) => {
                let x = a.eval_jet(s0, order)?;
                match func {
                    Func::Sin => x.sin_cos().0,
                    Func::Cos => x.sin_cos().1,
                    Func::Sinh => x.sinh_cosh().0,
                    Func::Cosh => x.sinh_cosh().1,
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.sqrt()?,
                }
            }
        })
    }

    /// Symbolic derivative in `s`, without simplification.
    pub fn differentiate(&self) -> ExprAst {
        use ExprAst::*;
        let b = Box::new;
        match self {
            Num(_) => Num(0.0),
            Var => Num(1.0),
            Neg(a) => Neg(b(a.differentiate())),
            Add(x, y) => Add(b(x.differentiate()), b(y.differentiate())),
            Sub(x, y) => Sub(b(x.differentiate()), b(y.differentiate())),
            Mul(x, y) => Add(
                b(Mul(b(x.differentiate()), y.clone())),
                b(Mul(x.clone(), b(y.differentiate()))),
            ),
            Div(x, y) => Div(
                b(Sub(
                    b(Mul(b(x.differentiate()), y.clone())),
                    b(Mul(x.clone(), b(y.differentiate()))),
                )),
                b(Pow(y.clone(), 2)),
            ),
            Pow(x, 0) => {
                let _ = x;
                Num(0.0)
            }
            Pow(x, n) => Mul(
                b(Mul(b(Num(*n as f64)), b(Pow(x.clone(), n - 1)))),
                b(x.differentiate()),
            ),
            Call(func, x) => {
                let outer = match func {
                    Func::Sin => Call(Func::Cos, x.clone()),
                    Func::Cos => Neg(b(Call(Func::Sin, x.clone()))),
                    Func::Sinh => Call(Func::Cosh, x.clone()),
                    Func::Cosh => Call(Func::Sinh, x.clone()),
                    Func::Exp => Call(Func::Exp, x.clone()),
                    Func::Sqrt => Div(b(Num(0.5)), b(Call(Func::Sqrt, x.clone()))),
                };
                Mul(b(outer), b(x.differentiate()))
            }
        }
    }
}
