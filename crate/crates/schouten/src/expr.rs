//! Closed-form scalar expressions: parsing, printing, and second-order
//! evaluation.
//!
//! The grammar (also documented in the README):
//!
//! ```text
//! expr     = term , { ("+" | "-") , term } ;
//! term     = unary , { ("*" | "/") , unary } ;
//! unary    = "-" , unary | power ;
//! power    = atom , { "^" , exponent } ;
//! exponent = "-" , exponent | atom ;
//! atom     = number | variable | function , "(" , expr , ")" | "(" , expr , ")" ;
//! variable = "x" , digit 1-9 ;
//! function = "exp" | "log" | "sin" | "cos" | "sqrt" ;
//! ```
//!
//! `^` binds tighter than unary minus and associates to the left; `*`/`/` and
//! `+`/`-` are left-associative.

use std::fmt;

use crate::error::{Error, Result};
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Immutable expression tree over variables `x1..xn`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn unary(op: UnaryOp, e: Expr) -> Expr {
        Expr::Unary(op, Box::new(e))
    }

    pub fn binary(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::Binary(op, Box::new(l), Box::new(r))
    }

    // tree constructors, not arithmetic on values
    #[allow(clippy::should_implement_trait)]
    pub fn add(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinaryOp::Add, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(l: Expr, r: Expr) -> Expr {
        Expr::binary(BinaryOp::Mul, l, r)
    }

    /// Largest variable index mentioned, plus one (0 for constant trees).
    pub fn max_dim(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Unary(_, c) => c.max_dim(),
            Expr::Binary(_, l, r) => l.max_dim().max(r.max_dim()),
        }
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
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
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s = &text[start..i];
                let v: f64 = s.parse().map_err(|_| Error::Syntax {
                    position: start,
                    message: format!("malformed number `{s}`"),
                })?;
                toks.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric()) {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            other => {
                return Err(Error::Syntax {
                    position: i,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Recursive-descent parser
// ---------------------------------------------------------------------------

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    dim: usize,
    text_len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, p)| *p)
            .unwrap_or(self.text_len)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::binary(BinaryOp::Add, lhs, rhs);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let rhs = self.term()?;
                    lhs = Expr::binary(BinaryOp::Sub, lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::binary(BinaryOp::Mul, lhs, rhs);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let rhs = self.unary()?;
                    lhs = Expr::binary(BinaryOp::Div, lhs, rhs);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, inner));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.atom()?;
        while matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let e = self.exponent()?;
            base = Expr::binary(BinaryOp::Pow, base, e);
        }
        Ok(base)
    }

    // a unary minus is allowed directly in an exponent: x1 ^ -2
    fn exponent(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            let inner = self.exponent()?;
            return Ok(Expr::unary(UnaryOp::Neg, inner));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let position = self.here();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::Ident(name)) => self.ident(name, position),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(Error::Syntax {
                        position: self.here(),
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(tok) => Err(Error::Syntax {
                position,
                message: format!("expected an operand, found token {tok:?}"),
            }),
            None => Err(Error::Syntax {
                position,
                message: "unexpected end of input".into(),
            }),
        }
    }

    fn ident(&mut self, name: String, position: usize) -> Result<Expr> {
        let func = match name.as_str() {
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        };
        if let Some(op) = func {
            match self.bump() {
                Some(Tok::LParen) => {}
                _ => {
                    return Err(Error::Syntax {
                        position: self.here(),
                        message: format!("expected `(` after `{name}`"),
                    })
                }
            }
            let arg = self.expr()?;
            match self.bump() {
                Some(Tok::RParen) => Ok(Expr::unary(op, arg)),
                _ => Err(Error::Syntax {
                    position: self.here(),
                    message: "expected `)`".into(),
                }),
            }
        } else if let Some(idx) = variable_index(&name) {
            if idx >= self.dim {
                Err(Error::VariableOutOfRange {
                    index: idx + 1,
                    dim: self.dim,
                })
            } else {
                Ok(Expr::Var(idx))
            }
        } else {
            Err(Error::UnknownIdentifier { name, position })
        }
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    if rest.len() == 1 {
        let d = rest.bytes().next().unwrap();
        if (b'1'..=b'9').contains(&d) {
            return Some((d - b'1') as usize);
        }
    }
    None
}

/// Parse `text` as an expression over `x1..x{dim}`.
pub fn parse(text: &str, dim: usize) -> Result<Expr> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        dim,
        text_len: text.len(),
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(Error::Syntax {
            position: p.here(),
            message: "trailing input".into(),
        });
    }
    Ok(e)
}

// ---------------------------------------------------------------------------
// Printer (fully parenthesized; round-trips through `parse`)
// ---------------------------------------------------------------------------

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // negative literals need parentheses: ^ binds tighter than the
            // leading minus, so a bare -0.5 ^ 2 would re-parse as -(0.5^2)
            Expr::Const(c) if c.is_sign_negative() => write!(f, "({c})"),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Unary(UnaryOp::Neg, c) => write!(f, "(-{c})"),
            Expr::Unary(op, c) => {
                let name = match op {
                    UnaryOp::Exp => "exp",
                    UnaryOp::Log => "log",
                    UnaryOp::Sin => "sin",
                    UnaryOp::Cos => "cos",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({c})")
            }
            Expr::Binary(op, l, r) => {
                let sym = match op {
                    BinaryOp::Add => "+",
                    BinaryOp::Sub => "-",
                    BinaryOp::Mul => "*",
                    BinaryOp::Div => "/",
                    BinaryOp::Pow => "^",
                };
                write!(f, "({l} {sym} {r})")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Largest |k| accepted for the repeated-multiplication integer-power path.
const MAX_INT_POW: f64 = 512.0;

fn domain_err(e: &Expr, message: &str) -> Error {
    Error::EvalDomain {
        subexpr: e.to_string(),
        message: message.into(),
    }
}

/// Evaluate value, gradient and Hessian of `e` at `x`.
pub fn eval_jet2(e: &Expr, x: &[f64]) -> Result<Jet2> {
    let n = x.len();
    match e {
        Expr::Const(c) => Ok(Jet2::constant(n, *c)),
        Expr::Var(i) => {
            debug_assert!(*i < n);
            Ok(Jet2::variable(n, *i, x[*i]))
        }
        Expr::Unary(op, c) => {
            let j = eval_jet2(c, x)?;
            match op {
                UnaryOp::Neg => Ok(j.neg()),
                UnaryOp::Exp => Ok(j.exp()),
                UnaryOp::Sin => Ok(j.sin()),
                UnaryOp::Cos => Ok(j.cos()),
                UnaryOp::Log => {
                    if j.val() <= 0.0 {
                        Err(domain_err(e, "log of a non-positive argument"))
                    } else {
                        Ok(j.ln())
                    }
                }
                UnaryOp::Sqrt => {
                    if j.val() <= 0.0 {
                        Err(domain_err(e, "sqrt of a non-positive argument"))
                    } else {
                        Ok(j.sqrt())
                    }
                }
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval_jet2(l, x)?;
            match op {
                BinaryOp::Add => Ok(a.add(&eval_jet2(r, x)?)),
                BinaryOp::Sub => Ok(a.sub(&eval_jet2(r, x)?)),
                BinaryOp::Mul => Ok(a.mul(&eval_jet2(r, x)?)),
                BinaryOp::Div => {
                    let b = eval_jet2(r, x)?;
                    if b.val() == 0.0 {
                        Err(domain_err(e, "division by zero"))
                    } else {
                        Ok(a.div(&b))
                    }
                }
                BinaryOp::Pow => eval_pow(e, &a, l, r, x),
            }
        }
    }
}

/// Value-only evaluation. Derivative-free, so central finite differences
/// built on it stay independent of the jet arithmetic they cross-check.
pub fn eval_value(e: &Expr, x: &[f64]) -> Result<f64> {
    match e {
        Expr::Const(c) => Ok(*c),
        Expr::Var(i) => Ok(x[*i]),
        Expr::Unary(op, c) => {
            let v = eval_value(c, x)?;
            match op {
                UnaryOp::Neg => Ok(-v),
                UnaryOp::Exp => Ok(v.exp()),
                UnaryOp::Sin => Ok(v.sin()),
                UnaryOp::Cos => Ok(v.cos()),
                UnaryOp::Log => {
                    if v <= 0.0 {
                        Err(domain_err(e, "log of a non-positive argument"))
                    } else {
                        Ok(v.ln())
                    }
                }
                UnaryOp::Sqrt => {
                    if v <= 0.0 {
                        Err(domain_err(e, "sqrt of a non-positive argument"))
                    } else {
                        Ok(v.sqrt())
                    }
                }
            }
        }
        Expr::Binary(op, l, r) => {
            let a = eval_value(l, x)?;
            match op {
                BinaryOp::Add => Ok(a + eval_value(r, x)?),
                BinaryOp::Sub => Ok(a - eval_value(r, x)?),
                BinaryOp::Mul => Ok(a * eval_value(r, x)?),
                BinaryOp::Div => {
                    let b = eval_value(r, x)?;
                    if b == 0.0 {
                        Err(domain_err(e, "division by zero"))
                    } else {
                        Ok(a / b)
                    }
                }
                BinaryOp::Pow => {
                    if let Some(k) = const_int_exponent(r) {
                        if k < 0 && a == 0.0 {
                            return Err(domain_err(e, "zero raised to a negative power"));
                        }
                        return Ok(a.powi(k as i32));
                    }
                    let b = eval_value(r, x)?;
                    if a <= 0.0 {
                        return Err(domain_err(e, "non-integer power of a non-positive base"));
                    }
                    Ok((b * a.ln()).exp())
                }
            }
        }
    }
}

// Integer constant exponents use repeated multiplication so negative bases
// stay meaningful; everything else goes through exp(b log a), base > 0.
fn eval_pow(whole: &Expr, base: &Jet2, _l: &Expr, r: &Expr, x: &[f64]) -> Result<Jet2> {
    if let Some(k) = const_int_exponent(r) {
        if k < 0 && base.val() == 0.0 {
            return Err(domain_err(whole, "zero raised to a negative power"));
        }
        return Ok(base.powi(k));
    }
    let b = eval_jet2(r, x)?;
    if base.val() <= 0.0 {
        return Err(domain_err(
            whole,
            "non-integer power of a non-positive base",
        ));
    }
    Ok(base.ln().mul(&b).exp())
}

// Recognizes Const(k) and Neg(Const(k)) exponents with integral k.
fn const_int_exponent(e: &Expr) -> Option<i64> {
    match e {
        Expr::Const(c) if c.fract() == 0.0 && c.abs() <= MAX_INT_POW => Some(*c as i64),
        Expr::Unary(UnaryOp::Neg, inner) => const_int_exponent(inner).map(|k| -k),
        _ => None,
    }
}
