//! Expressions in `z` with Gaussian-rational coefficients.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary | unary-starting-with-z-i-or-paren)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' ['-' | '+'] integer)*
//! primary := decimal | 'z' | 'i' | '(' expr ')'
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{gq_i, ExactPoly, GaussQ};
use crate::ratmap::RationalMap;

/// Largest exponent accepted by the parser.
pub const MAX_EXPONENT: i64 = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var,
    Imag,
    /// A nonnegative decimal literal, held exactly.
    Num(BigRational),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    fn prec(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Var | Expr::Imag | Expr::Num(_) => 5,
        }
    }

    fn write_child(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
        if e.prec() < min {
            write!(f, "({e})")
        } else {
            write!(f, "{e}")
        }
    }

    /// The value as a reduced quotient `P/Q` of exact polynomials.
    pub fn to_fraction(&self) -> Result<(ExactPoly, ExactPoly)> {
        let (p, q) = match self {
            Expr::Var => (ExactPoly::var(), ExactPoly::one()),
            Expr::Imag => (ExactPoly::constant(gq_i()), ExactPoly::one()),
            Expr::Num(r) => (ExactPoly::constant(GaussQ::new(r.clone(), BigRational::zero())), ExactPoly::one()),
            Expr::Neg(a) => {
                let (p, q) = a.to_fraction()?;
                (p.neg(), q)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (p1, q1) = a.to_fraction()?;
                let (p2, q2) = b.to_fraction()?;
                let (l, r) = (p1.mul(&q2), p2.mul(&q1));
                let p = if matches!(self, Expr::Add(..)) { l.add(&r) } else { l.sub(&r) };
                (p, q1.mul(&q2))
            }
            Expr::Mul(a, b) => {
                let (p1, q1) = a.to_fraction()?;
                let (p2, q2) = b.to_fraction()?;
                (p1.mul(&p2), q1.mul(&q2))
            }
            Expr::Div(a, b) => {
                let (p1, q1) = a.to_fraction()?;
                let (p2, q2) = b.to_fraction()?;
                if p2.is_zero() {
                    return Err(Error::DivisionByZeroPolynomial);
                }
                (p1.mul(&q2), q1.mul(&p2))
            }
            Expr::Pow(a, n) => {
                let (p, q) = a.to_fraction()?;
                let e = n.unsigned_abs() as u32;
                if *n >= 0 {
                    (p.pow(e), q.pow(e))
                } else if p.is_zero() {
                    return Err(Error::DivisionByZeroPolynomial);
                } else {
                    (q.pow(e), p.pow(e))
                }
            }
        };
        Ok(reduce(p, q))
    }
}

fn reduce(p: ExactPoly, q: ExactPoly) -> (ExactPoly, ExactPoly) {
    if p.is_zero() {
        return (p, ExactPoly::one());
    }
    let g = p.gcd(&q);
    let (p, q) = if g.degree().unwrap_or(0) > 0 {
        (p.div_rem(&g).expect("nonzero").0, q.div_rem(&g).expect("nonzero").0)
    } else {
        (p, q)
    };
    let lead = q.leading().expect("nonzero denominator").clone();
    let inv = GaussQ::one() / lead;
    (p.scale(&inv), q.scale(&inv))
}

fn fmt_decimal(r: &BigRational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    // literals are terminating decimals: scale by 10^k until integral
    let ten = BigInt::from(10);
    let mut scaled = r.clone();
    let mut k = 0usize;
    while !scaled.is_integer() {
        scaled *= BigRational::from_integer(ten.clone());
        k += 1;
    }
    let digits = scaled.to_integer().to_string();
    let digits = format!("{digits:0>width$}", width = k + 1);
    let (int, frac) = digits.split_at(digits.len() - k);
    format!("{int}.{frac}")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Var => f.write_str("z"),
            Expr::Imag => f.write_str("i"),
            Expr::Num(r) => f.write_str(&fmt_decimal(r)),
            Expr::Neg(a) => {
                f.write_str("-")?;
                Expr::write_child(f, a, 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, p) = match self {
                    Expr::Add(..) => ("+", 1),
                    Expr::Sub(..) => ("-", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                Expr::write_child(f, a, p)?;
                f.write_str(op)?;
                Expr::write_child(f, b, p + 1)
            }
            Expr::Pow(a, n) => {
                Expr::write_child(f, a, 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

/// Source text with its syntax tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapExpression {
    pub source: String,
    pub ast: Expr,
}

impl MapExpression {
    pub fn parse(source: &str) -> Result<Self> {
        let mut p = Parser { chars: source.chars().collect(), pos: 0 };
        let ast = p.expr()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.err(format!("unexpected {:?}", p.chars[p.pos])));
        }
        Ok(MapExpression { source: source.to_string(), ast })
    }

    pub fn to_map(&self) -> Result<RationalMap> {
        let (p, q) = self.ast.to_fraction()?;
        RationalMap::new(p, q)
    }
}

impl fmt::Display for MapExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ast)
    }
}

/// Parses `source` and reduces it to a rational map of degree at least two.
pub fn parse_map(source: &str) -> Result<RationalMap> {
    MapExpression::parse(source)?.to_map()
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::Syntax { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if c == '+' { Expr::Add(lhs.into(), rhs.into()) } else { Expr::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    lhs = Expr::Mul(lhs.into(), self.unary()?.into());
                }
                Some('/') => {
                    self.pos += 1;
                    lhs = Expr::Div(lhs.into(), self.unary()?.into());
                }
                Some('z' | 'i' | '(') => lhs = Expr::Mul(lhs.into(), self.unary()?.into()),
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let mut base = self.primary()?;
        while self.peek() == Some('^') {
            self.pos += 1;
            let sign = match self.peek() {
                Some('-') => {
                    self.pos += 1;
                    -1
                }
                Some('+') => {
                    self.pos += 1;
                    1
                }
                _ => 1,
            };
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.err("expected an integer exponent"));
            }
            let text: String = self.chars[start..self.pos].iter().collect();
            let n = text.parse::<i64>().ok().filter(|n| *n <= MAX_EXPONENT).ok_or_else(|| Error::Syntax {
                position: start,
                message: format!("exponent exceeds {MAX_EXPONENT}"),
            })?;
            base = Expr::Pow(base.into(), sign * n);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                Ok(Expr::Var)
            }
            Some('i') => {
                self.pos += 1;
                Ok(Expr::Imag)
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) => Err(self.err(format!("unexpected {c:?}"))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let mut int = String::new();
        let mut frac = String::new();
        while let Some(&c) = self.chars.get(self.pos).filter(|c| c.is_ascii_digit()) {
            int.push(c);
            self.pos += 1;
        }
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            while let Some(&c) = self.chars.get(self.pos).filter(|c| c.is_ascii_digit()) {
                frac.push(c);
                self.pos += 1;
            }
        }
        if int.is_empty() && frac.is_empty() {
            return Err(Error::Syntax { position: start, message: "malformed number".into() });
        }
        let digits: BigInt = format!("{int}{frac}").parse().expect("digits");
        let den = BigInt::from(10).pow(frac.len() as u32);
        Ok(Expr::Num(BigRational::new(digits, den)))
    }
}
