//! Closed-form scalar expressions in the chart coordinates `x1..xn`.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'pi' | 'x'<k> | func '(' expr ')' | 'pow' '(' expr ',' expr ')' | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp'
//! ```

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{cos, exp, ln, pow, sin};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 0-based coordinate index (`x1` is `Var(0)`).
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

use Expr::*;

impl Expr {
    pub fn c(v: f64) -> Expr {
        Const(v)
    }

    pub fn x(i: usize) -> Expr {
        Var(i)
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            s: src.as_bytes(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Const(v) => *v,
            Var(i) => x[*i],
            Add(a, b) => a.eval(x) + b.eval(x),
            Sub(a, b) => a.eval(x) - b.eval(x),
            Mul(a, b) => a.eval(x) * b.eval(x),
            Div(a, b) => a.eval(x) / b.eval(x),
            Neg(a) => -a.eval(x),
            Pow(a, b) => {
                let base = a.eval(x);
                match **b {
                    Const(p) if p == (p as i32) as f64 => powi(base, p as i32),
                    _ => pow(base, b.eval(x)),
                }
            }
            Sin(a) => sin(a.eval(x)),
            Cos(a) => cos(a.eval(x)),
            Exp(a) => exp(a.eval(x)),
        }
    }

    /// Largest variable index used plus one.
    pub fn arity(&self) -> usize {
        match self {
            Const(_) => 0,
            Var(i) => i + 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.arity().max(b.arity()),
            Neg(a) | Sin(a) | Cos(a) | Exp(a) => a.arity(),
        }
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Const(_))
    }

    /// Symbolic partial derivative `∂/∂x_i`. Powers must have a constant
    /// exponent unless the base is constant.
    pub fn diff(&self, i: usize) -> Result<Expr> {
        Ok(match self {
            Const(_) => Const(0.0),
            Var(j) => Const(if *j == i { 1.0 } else { 0.0 }),
            Add(a, b) => add(a.diff(i)?, b.diff(i)?),
            Sub(a, b) => sub(a.diff(i)?, b.diff(i)?),
            Mul(a, b) => add(
                mul(a.diff(i)?, (**b).clone()),
                mul((**a).clone(), b.diff(i)?),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.diff(i)?, (**b).clone()),
                    mul((**a).clone(), b.diff(i)?),
                ),
                powc((**b).clone(), 2.0),
            ),
            Neg(a) => neg(a.diff(i)?),
            Pow(a, b) => match (&**a, &**b) {
                (_, Const(p)) => mul(mul(Const(*p), powc((**a).clone(), p - 1.0)), a.diff(i)?),
                (Const(base), _) if *base > 0.0 => {
                    mul(mul(self.clone(), Const(ln(*base))), b.diff(i)?)
                }
                _ => {
                    return Err(Error::Expr(String::from(
                        "derivative of a power needs a constant exponent or base",
                    )))
                }
            },
            Sin(a) => mul(Cos(a.clone()), a.diff(i)?),
            Cos(a) => neg(mul(Sin(a.clone()), a.diff(i)?)),
            Exp(a) => mul(self.clone(), a.diff(i)?),
        })
    }
}

fn powi(mut b: f64, e: i32) -> f64 {
    if e < 0 {
        return 1.0 / powi(b, -e);
    }
    let mut e = e as u32;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= b;
        }
        b *= b;
        e >>= 1;
    }
    acc
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Const(x), Const(y)) => Const(x + y),
        (Const(z), _) if *z == 0.0 => b,
        (_, Const(z)) if *z == 0.0 => a,
        _ => Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Const(x), Const(y)) => Const(x - y),
        (_, Const(z)) if *z == 0.0 => a,
        (Const(z), _) if *z == 0.0 => neg(b),
        _ => Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Const(x), Const(y)) => Const(x * y),
        (Const(z), _) | (_, Const(z)) if *z == 0.0 => Const(0.0),
        (Const(o), _) if *o == 1.0 => b,
        (_, Const(o)) if *o == 1.0 => a,
        _ => Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Const(z), _) if *z == 0.0 => Const(0.0),
        (_, Const(o)) if *o == 1.0 => a,
        _ => Div(Box::new(a), Box::new(b)),
    }
}

pub fn neg(a: Expr) -> Expr {
    match a {
        Const(x) => Const(-x),
        Neg(inner) => *inner,
        other => Neg(Box::new(other)),
    }
}

pub fn powc(a: Expr, p: f64) -> Expr {
    if p == 0.0 {
        return Const(1.0);
    }
    if p == 1.0 {
        return a;
    }
    match a {
        Const(x) => Const(pow(x, p)),
        other => Pow(Box::new(other), Box::new(Const(p))),
    }
}

pub fn sin_e(a: Expr) -> Expr {
    Sin(Box::new(a))
}

pub fn cos_e(a: Expr) -> Expr {
    Cos(Box::new(a))
}

pub fn exp_e(a: Expr) -> Expr {
    Exp(Box::new(a))
}

fn fmt_const(v: f64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if v < 0.0 || (v == 0.0 && v.is_sign_negative()) {
        write!(f, "(-{})", -v)
    } else {
        write!(f, "{v}")
    }
}

/// Canonical fully parenthesized form; `parse` reads it back exactly.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Const(v) => fmt_const(*v, f),
            Var(i) => write!(f, "x{}", i + 1),
            Add(a, b) => write!(f, "({a} + {b})"),
            Sub(a, b) => write!(f, "({a} - {b})"),
            Mul(a, b) => write!(f, "({a} * {b})"),
            Div(a, b) => write!(f, "({a} / {b})"),
            Neg(a) => write!(f, "(-{a})"),
            Pow(a, b) => write!(f, "({a} ^ {b})"),
            Sin(a) => write!(f, "sin({a})"),
            Cos(a) => write!(f, "cos({a})"),
            Exp(a) => write!(f, "exp({a})"),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Expr(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            let inner = self.unary()?;
            return Ok(match inner {
                Const(v) => Const(-v),
                other => Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.unary()?;
            return Ok(Pow(Box::new(base), Box::new(e)));
        }
        Ok(base)
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_')
        {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.pos]).to_string()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                let id = self.ident();
                match id.as_str() {
                    "pi" => Ok(Const(core::f64::consts::PI)),
                    "sin" | "cos" | "exp" => {
                        self.expect(b'(')?;
                        let a = Box::new(self.expr()?);
                        self.expect(b')')?;
                        Ok(match id.as_str() {
                            "sin" => Sin(a),
                            "cos" => Cos(a),
                            _ => Exp(a),
                        })
                    }
                    "pow" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b',')?;
                        let b = self.expr()?;
                        self.expect(b')')?;
                        Ok(Pow(Box::new(a), Box::new(b)))
                    }
                    _ => {
                        let digits = id
                            .strip_prefix('x')
                            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()));
                        match digits.and_then(|d| d.parse::<usize>().ok()) {
                            Some(k) if k >= 1 => Ok(Var(k - 1)),
                            _ => {
                                self.pos = start;
                                Err(self.err(&format!("unknown identifier '{id}'")))
                            }
                        }
                    }
                }
            }
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        self.skip_ws();
        let start = self.pos;
        let s = self.s;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < s.len() && (s[self.pos] == b'+' || s[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == digits_start {
                self.pos = save;
            }
        }
        let text =
            core::str::from_utf8(&s[start..self.pos]).map_err(|_| self.err("invalid number"))?;
        text.parse::<f64>()
            .map(Const)
            .map_err(|_| self.err(&format!("invalid number '{text}'")))
    }
}

/// Parses a list of expressions.
pub fn parse_all(srcs: &[&str]) -> Result<Vec<Expr>> {
    srcs.iter().map(|s| Expr::parse(s)).collect()
}
