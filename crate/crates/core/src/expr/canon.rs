//! Canonical form: a sparse polynomial whose indeterminates ("atoms") are the
//! chart variables and `sin`/`cos`/`exp` applied to canonical arguments.
//!
//! Polynomial expressions land in expanded monomial form with exact rational
//! coefficients. Transcendental expressions are canonical only up to the
//! identities the representation itself encodes (commutativity, distributivity,
//! collecting like terms); `sin(x)^2 + cos(x)^2 - 1` stays nonzero here and is
//! left to the numeric backend.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Var(usize),
    Sin(Poly),
    Cos(Poly),
    Exp(Poly),
}

/// Product of atoms raised to positive powers, sorted by atom.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Monomial(pub(crate) Vec<(Atom, u32)>);

/// Sum of monomials with nonzero rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Poly {
    pub(crate) terms: BTreeMap<Monomial, BigRational>,
}

impl Monomial {
    fn one() -> Self {
        Monomial(Vec::new())
    }

    fn atom(a: Atom, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(a, e)])
        }
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, ea) = &self.0[i];
            let (b, eb) = &other.0[j];
            match a.cmp(b) {
                std::cmp::Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    fn is_polynomial(&self) -> bool {
        self.0.iter().all(|(a, _)| matches!(a, Atom::Var(_)))
    }

    fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }
}

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly::default()
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub(crate) fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    fn from_atom(a: Atom) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::atom(a, 1), BigRational::one());
        Poly { terms }
    }

    pub(crate) fn var(i: usize) -> Self {
        Poly::from_atom(Atom::Var(i))
    }

    pub(crate) fn sin(arg: Poly) -> Self {
        if arg.is_zero() {
            Poly::zero()
        } else {
            Poly::from_atom(Atom::Sin(arg))
        }
    }

    pub(crate) fn cos(arg: Poly) -> Self {
        if arg.is_zero() {
            Poly::one()
        } else {
            Poly::from_atom(Atom::Cos(arg))
        }
    }

    pub(crate) fn exp(arg: Poly) -> Self {
        if arg.is_zero() {
            Poly::one()
        } else {
            Poly::from_atom(Atom::Exp(arg))
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the polynomial has no non-constant monomials.
    pub(crate) fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub(crate) fn is_polynomial(&self) -> bool {
        self.terms.keys().all(Monomial::is_polynomial)
    }

    /// Total degree, defined only for polynomials in the chart variables.
    pub(crate) fn degree(&self) -> Option<u32> {
        if !self.is_polynomial() {
            return None;
        }
        Some(self.terms.keys().map(Monomial::degree).max().unwrap_or(0))
    }

    /// True when no variable occurs anywhere, including inside function arguments.
    pub(crate) fn is_free_of_variables(&self) -> bool {
        self.max_var().is_none()
    }

    pub(crate) fn max_var(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for mono in self.terms.keys() {
            for (atom, _) in &mono.0 {
                let m = match atom {
                    Atom::Var(i) => Some(*i),
                    Atom::Sin(p) | Atom::Cos(p) | Atom::Exp(p) => p.max_var(),
                };
                best = best.max(m);
            }
        }
        best
    }

    fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub(crate) fn scale(&self, k: &BigRational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn atom_derivative(atom: &Atom, var: usize) -> Poly {
        match atom {
            Atom::Var(i) => {
                if *i == var {
                    Poly::one()
                } else {
                    Poly::zero()
                }
            }
            Atom::Sin(arg) => Poly::cos(arg.clone()).mul(&arg.derivative(var)),
            Atom::Cos(arg) => Poly::sin(arg.clone()).mul(&arg.derivative(var)).neg(),
            Atom::Exp(arg) => Poly::exp(arg.clone()).mul(&arg.derivative(var)),
        }
    }

    pub(crate) fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::zero();
        for (mono, coeff) in &self.terms {
            for (k, (atom, e)) in mono.0.iter().enumerate() {
                let d_atom = Poly::atom_derivative(atom, var);
                if d_atom.is_zero() {
                    continue;
                }
                let mut rest = mono.0.clone();
                if *e == 1 {
                    rest.remove(k);
                } else {
                    rest[k].1 = e - 1;
                }
                let k_coeff = coeff * BigRational::from_integer(BigInt::from(*e));
                let factor = Poly { terms: std::iter::once((Monomial(rest), k_coeff)).collect() };
                out = out.add(&factor.mul(&d_atom));
            }
        }
        out
    }

    /// Exact evaluation; `None` when a transcendental atom is present.
    pub(crate) fn eval_exact(&self, point: &[BigRational]) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (mono, c) in &self.terms {
            let mut v = c.clone();
            for (atom, e) in &mono.0 {
                match atom {
                    Atom::Var(i) => v *= num_traits::pow(point[*i].clone(), *e as usize),
                    _ => return None,
                }
            }
            acc += v;
        }
        Some(acc)
    }

    /// Coefficient of the monomial `x_var^1`, or of the constant when `var` is `None`.
    pub(crate) fn linear_coefficient(&self, var: Option<usize>) -> BigRational {
        let key = match var {
            None => Monomial::one(),
            Some(i) => Monomial::atom(Atom::Var(i), 1),
        };
        self.terms.get(&key).cloned().unwrap_or_else(BigRational::zero)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Huge numerators or denominators: fall back to a scaled division.
    let n = r.numer().to_f64().unwrap_or(f64::NAN);
    let d = r.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn like_terms_cancel() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        assert!(x.add(&y).sub(&y.add(&x)).is_zero());
    }

    #[test]
    fn binomial_expansion() {
        let s = Poly::var(0).add(&Poly::var(1));
        let cube = s.pow(3);
        assert_eq!(cube.terms.len(), 4);
        assert_eq!(cube.degree(), Some(3));
        assert_eq!(cube.eval_exact(&[q(1, 2), q(1, 3)]), Some(q(125, 216)));
    }

    #[test]
    fn trig_of_zero_collapses() {
        assert!(Poly::sin(Poly::zero()).is_zero());
        assert_eq!(Poly::cos(Poly::zero()), Poly::one());
        assert_eq!(Poly::exp(Poly::zero()), Poly::one());
    }

    #[test]
    fn chain_rule_through_exp() {
        // d/dx exp(x^2) = 2x exp(x^2)
        let arg = Poly::var(0).pow(2);
        let d = Poly::exp(arg.clone()).derivative(0);
        let expected = Poly::exp(arg).mul(&Poly::var(0)).scale(&q(2, 1));
        assert_eq!(d, expected);
    }
}
