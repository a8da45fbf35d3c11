//! Scalar functions on a coordinate chart of ℝⁿ.
//!
//! An [`Expr`] is a plain expression tree. Every arithmetic operation and
//! [`Expr::derivative`] return the *normalized* tree, i.e. the tree rebuilt
//! from the canonical polynomial-over-atoms form in [`canon`]. Division is not
//! a node: the parser folds division by a nonzero rational constant into a
//! coefficient.

mod canon;
mod parse;
mod print;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::Error;
use canon::{Atom, Monomial, Poly};

pub use parse::{ParseError, ParseErrorKind};

/// Expression tree over chart variables `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(BigRational),
    Var(usize),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Const(BigRational::zero())
    }

    pub fn one() -> Self {
        Expr::Const(BigRational::one())
    }

    pub fn int(v: i64) -> Self {
        Expr::Const(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(numer: i64, denom: i64) -> Self {
        Expr::Const(BigRational::new(numer.into(), denom.into()))
    }

    pub fn var(i: usize) -> Self {
        Expr::Var(i)
    }

    pub fn sin(self) -> Self {
        Expr::from_poly(&Poly::sin(self.to_poly()))
    }

    pub fn cos(self) -> Self {
        Expr::from_poly(&Poly::cos(self.to_poly()))
    }

    pub fn exp(self) -> Self {
        Expr::from_poly(&Poly::exp(self.to_poly()))
    }

    pub fn pow(&self, e: u32) -> Self {
        Expr::from_poly(&self.to_poly().pow(e))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Expr::from_poly(&self.to_poly().scale(k))
    }

    pub(crate) fn to_poly(&self) -> Poly {
        match self {
            Expr::Const(c) => Poly::constant(c.clone()),
            Expr::Var(i) => Poly::var(*i),
            Expr::Add(xs) => xs.iter().fold(Poly::zero(), |acc, x| acc.add(&x.to_poly())),
            Expr::Mul(xs) => xs.iter().fold(Poly::one(), |acc, x| acc.mul(&x.to_poly())),
            Expr::Pow(b, e) => b.to_poly().pow(*e),
            Expr::Sin(a) => Poly::sin(a.to_poly()),
            Expr::Cos(a) => Poly::cos(a.to_poly()),
            Expr::Exp(a) => Poly::exp(a.to_poly()),
        }
    }

    pub(crate) fn from_poly(p: &Poly) -> Self {
        let mut terms: Vec<Expr> = p.terms.iter().map(|(mono, coeff)| Expr::from_term(mono, coeff)).collect();
        match terms.len() {
            0 => Expr::zero(),
            1 => terms.pop().unwrap(),
            _ => Expr::Add(terms),
        }
    }

    fn from_term(mono: &Monomial, coeff: &BigRational) -> Expr {
        let mut factors = Vec::with_capacity(mono.0.len() + 1);
        if !coeff.is_one() || mono.0.is_empty() {
            factors.push(Expr::Const(coeff.clone()));
        }
        for (atom, e) in &mono.0 {
            let base = match atom {
                Atom::Var(i) => Expr::Var(*i),
                Atom::Sin(a) => Expr::Sin(Box::new(Expr::from_poly(a))),
                Atom::Cos(a) => Expr::Cos(Box::new(Expr::from_poly(a))),
                Atom::Exp(a) => Expr::Exp(Box::new(Expr::from_poly(a))),
            };
            factors.push(if *e == 1 { base } else { Expr::Pow(Box::new(base), *e) });
        }
        if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Mul(factors)
        }
    }

    /// Canonical tree. Idempotent, and polynomial inputs come back fully expanded.
    pub fn normalize(&self) -> Expr {
        Expr::from_poly(&self.to_poly())
    }

    /// Partial derivative with respect to variable `var`, normalized.
    ///
    /// Variables the expression does not mention differentiate to zero; use
    /// [`Chart::differentiate`] when the index should be range-checked.
    pub fn derivative(&self, var: usize) -> Expr {
        Expr::from_poly(&self.to_poly().derivative(var))
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().all(Expr::is_polynomial),
            Expr::Pow(b, _) => b.is_polynomial(),
            Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => false,
        }
    }

    /// Exact zero test on the canonical form.
    pub fn is_identically_zero(&self) -> bool {
        self.to_poly().is_zero()
    }

    /// Rational value when the canonical form is a rational constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.to_poly().as_constant()
    }

    /// True when no chart variable occurs (e.g. `3/4`, `cos(1)`).
    pub fn is_constant(&self) -> bool {
        self.to_poly().is_free_of_variables()
    }

    /// Largest variable index occurring anywhere in the expression.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Add(xs) | Expr::Mul(xs) => xs.iter().filter_map(Expr::max_var).max(),
            Expr::Pow(b, _) | Expr::Sin(b) | Expr::Cos(b) | Expr::Exp(b) => b.max_var(),
        }
    }

    /// Total degree of a polynomial expression; `None` for transcendental ones.
    pub fn degree(&self) -> Option<u32> {
        self.to_poly().degree()
    }

    /// Coefficient of `x_var` (or of the constant term for `None`) in the canonical form.
    pub fn linear_coefficient(&self, var: Option<usize>) -> BigRational {
        self.to_poly().linear_coefficient(var)
    }

    /// Floating-point evaluation. `point` must cover every variable index used.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => canon::rational_to_f64(c),
            Expr::Var(i) => point[*i],
            Expr::Add(xs) => xs.iter().map(|x| x.eval_f64(point)).sum(),
            Expr::Mul(xs) => xs.iter().map(|x| x.eval_f64(point)).product(),
            Expr::Pow(b, e) => b.eval_f64(point).powi(*e as i32),
            Expr::Sin(a) => a.eval_f64(point).sin(),
            Expr::Cos(a) => a.eval_f64(point).cos(),
            Expr::Exp(a) => a.eval_f64(point).exp(),
        }
    }

    /// Exact evaluation at a rational point; `None` for non-polynomial expressions.
    pub fn eval_exact(&self, point: &[BigRational]) -> Option<BigRational> {
        self.to_poly().eval_exact(point)
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<BigRational> for Expr {
    fn from(v: BigRational) -> Self {
        Expr::Const(v)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $poly:ident) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::from_poly(&self.to_poly().$poly(&rhs.to_poly()))
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::from_poly(&self.to_poly().neg())
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        Expr::from_poly(&iter.fold(Poly::zero(), |acc, e| acc.add(&e.to_poly())))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_names(self.max_var().map_or(0, |m| m + 1));
        f.write_str(&print::render(self, &names))
    }
}

/// Nearest `f64` to a rational, also for very large numerators and denominators.
pub fn rational_f64(r: &BigRational) -> f64 {
    canon::rational_to_f64(r)
}

/// Default variable names: `x`, `y`, `z`, then `x4`, `x5`, ...
pub fn default_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match i {
            0 => "x".to_string(),
            1 => "y".to_string(),
            2 => "z".to_string(),
            _ => format!("x{}", i + 1),
        })
        .collect()
}

const RESERVED: [&str; 3] = ["sin", "cos", "exp"];

/// A coordinate chart: dimension plus the names used to read and print variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    names: Vec<String>,
}

impl Chart {
    pub fn new(dim: usize) -> Result<Self, Error> {
        Chart::with_names(default_names(dim))
    }

    pub fn with_names(names: Vec<String>) -> Result<Self, Error> {
        if names.is_empty() {
            return Err(Error::Chart("dimension must be positive".into()));
        }
        for (i, name) in names.iter().enumerate() {
            let mut chars = name.chars();
            let valid = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::Chart(format!("invalid variable name {name:?}")));
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(Error::Chart(format!("variable name {name:?} is reserved")));
            }
            if names[..i].contains(name) {
                return Err(Error::Chart(format!("duplicate variable name {name:?}")));
            }
        }
        Ok(Chart { names })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parse(&self, source: &str) -> Result<Expr, ParseError> {
        parse::parse(source, &self.names)
    }

    pub fn differentiate(&self, e: &Expr, i: usize) -> Result<Expr, Error> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange { index: i, dim: self.dim() });
        }
        Ok(e.derivative(i))
    }

    pub fn evaluate(&self, e: &Expr, point: &[f64]) -> Result<f64, Error> {
        self.check_point(point.len(), e)?;
        Ok(e.eval_f64(point))
    }

    /// Exact value of a polynomial expression at a rational point.
    pub fn evaluate_exact(&self, e: &Expr, point: &[BigRational]) -> Result<BigRational, Error> {
        self.check_point(point.len(), e)?;
        e.eval_exact(point).ok_or(Error::NotPolynomial)
    }

    fn check_point(&self, len: usize, e: &Expr) -> Result<(), Error> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: len });
        }
        if let Some(m) = e.max_var() {
            if m >= self.dim() {
                return Err(Error::IndexOutOfRange { index: m, dim: self.dim() });
            }
        }
        Ok(())
    }

    /// Source text that parses back (under this chart) to the same normalized tree.
    pub fn render(&self, e: &Expr) -> String {
        print::render(e, &self.names)
    }
}
