//! Recovering the automorphism `A = (P₁+P₂)(P₁−P₂)⁻¹` from a set of generators.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::generators::DiracGenerators;
use super::matrix::AutMatrix;
use crate::backend::Backend;
use crate::error::Error;
use crate::expr::Expr;

/// A recovered automorphism: exact when all generator entries are rational
/// constants, otherwise one numeric solve per grid point.
#[derive(Clone, Debug, PartialEq)]
pub enum Recovered {
    Exact(AutMatrix),
    Sampled(Vec<(Vec<f64>, DMatrix<f64>)>),
}

impl Recovered {
    /// Max-entry `|A·B − I|` over the grid (exact zero reports `0.0`).
    pub fn defect_against(&self, b: &AutMatrix, backend: &Backend) -> Result<f64, Error> {
        let n = b.dim();
        match self {
            Recovered::Exact(a) => {
                let d = a.mul(b)?.sub(&AutMatrix::identity(n))?;
                if d.entries().iter().all(Expr::is_identically_zero) {
                    return Ok(0.0);
                }
                let mut worst = 0.0_f64;
                for e in d.entries() {
                    worst = worst.max(backend.max_abs(e)?);
                }
                Ok(worst)
            }
            Recovered::Sampled(samples) => {
                let eye = DMatrix::<f64>::identity(n, n);
                let mut worst = 0.0_f64;
                for (p, a) in samples {
                    let d = a * b.eval_f64(p) - &eye;
                    worst = worst.max(d.amax());
                }
                Ok(worst)
            }
        }
    }
}

/// Columns `(P₁ − P₂)g_i = X_i − ω_i♯` and `(P₁ + P₂)g_i = X_i + ω_i♯`.
fn projections(l: &DiracGenerators) -> (Vec<Vec<Expr>>, Vec<Vec<Expr>>) {
    let mut diff = Vec::with_capacity(l.len());
    let mut sum = Vec::with_capacity(l.len());
    for (x, w) in l.pairs() {
        diff.push(x.components().iter().zip(w.components()).map(|(a, b)| a - b).collect());
        sum.push(x.components().iter().zip(w.components()).map(|(a, b)| a + b).collect());
    }
    (diff, sum)
}

/// Gauss–Jordan inverse over ℚ; `None` when singular.
fn invert_exact(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for c in 0..n {
            a[col][c] = &a[col][c] / &p;
            inv[col][c] = &inv[col][c] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..n {
                    let (ac, ic) = (a[col][c].clone(), inv[col][c].clone());
                    a[r][c] -= &f * ac;
                    inv[r][c] -= &f * ic;
                }
            }
        }
    }
    Some(inv)
}

/// Solves `A·(P₁−P₂)g_i = (P₁+P₂)g_i` column by column.
pub fn recover_automorphism(l: &DiracGenerators, backend: &Backend) -> Result<Recovered, Error> {
    let n = l.dim();
    if l.len() != n || n == 0 {
        return Err(Error::DimensionMismatch { expected: n, found: l.len() });
    }
    let (diff, sum) = projections(l);
    // Column-major inputs: diff[i] is the i-th column of U.
    let rational = |cols: &[Vec<Expr>]| -> Option<Vec<Vec<BigRational>>> {
        (0..n).map(|r| (0..n).map(|c| cols[c][r].as_rational()).collect()).collect()
    };
    if let (Some(u), Some(v)) = (rational(&diff), rational(&sum)) {
        let u_inv = invert_exact(&u).ok_or(Error::SingularGenerators { point: None })?;
        let a: Vec<Vec<BigRational>> = (0..n)
            .map(|r| (0..n).map(|c| (0..n).fold(BigRational::zero(), |acc, k| acc + &v[r][k] * &u_inv[k][c])).collect())
            .collect();
        return Ok(Recovered::Exact(AutMatrix::from_rational(&a)));
    }
    let mut samples = Vec::new();
    for p in backend.grid(n)? {
        let u = DMatrix::from_fn(n, n, |r, c| diff[c][r].eval_f64(&p));
        let v = DMatrix::from_fn(n, n, |r, c| sum[c][r].eval_f64(&p));
        let sv = u.clone().svd(false, false).singular_values;
        let top = sv.max().max(1.0);
        if sv.min() <= backend.tolerance * top {
            return Err(Error::SingularGenerators { point: Some(p) });
        }
        let u_inv = u.try_inverse().ok_or_else(|| Error::SingularGenerators { point: Some(p.clone()) })?;
        samples.push((p, v * u_inv));
    }
    Ok(Recovered::Sampled(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirac::build_generators;
    use crate::expr::Chart;
    use crate::exterior::{OneForm, VectorField};

    #[test]
    fn identity_recovers_identity() {
        let ex = Backend::exact();
        let l = build_generators(&AutMatrix::identity(2), &ex).unwrap();
        assert_eq!(recover_automorphism(&l, &ex).unwrap(), Recovered::Exact(AutMatrix::identity(2)));
    }

    #[test]
    fn rotation_recovers_its_transpose() {
        let ex = Backend::exact();
        let b = AutMatrix::parse(&Chart::new(2).unwrap(), &[vec!["3/5", "-4/5"], vec!["4/5", "3/5"]]).unwrap();
        let l = build_generators(&b, &ex).unwrap();
        let Recovered::Exact(a) = recover_automorphism(&l, &ex).unwrap() else { panic!("expected exact") };
        assert_eq!(a, b.transpose());
    }

    #[test]
    fn sampled_recovery_for_function_entries() {
        let num = Backend::numeric();
        let b = AutMatrix::rotation(Expr::var(0) * Expr::var(1));
        let l = build_generators(&b, &num).unwrap();
        let rec = recover_automorphism(&l, &num).unwrap();
        assert!(matches!(rec, Recovered::Sampled(ref s) if s.len() == 81));
        assert!(rec.defect_against(&b, &num).unwrap() <= 1e-12);
    }

    #[test]
    fn duplicate_generators_are_singular() {
        let g = (VectorField::basis(2, 0), OneForm::zero(2));
        let l = DiracGenerators::new(vec![g.clone(), g]).unwrap();
        assert!(matches!(recover_automorphism(&l, &Backend::exact()), Err(Error::SingularGenerators { point: None })));
        let h = (VectorField::new(vec![Expr::var(0), Expr::zero()]), OneForm::zero(2));
        let l = DiracGenerators::new(vec![h.clone(), h]).unwrap();
        assert!(matches!(
            recover_automorphism(&l, &Backend::numeric()),
            Err(Error::SingularGenerators { point: Some(_) })
        ));
    }
}
