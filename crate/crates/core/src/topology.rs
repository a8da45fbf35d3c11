//! Coordinates, norm and connectivity tools for integrable automorphisms.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::backend::Backend;
use crate::dirac::AutMatrix;
use crate::error::Error;
use crate::expr::Expr;

/// `a_ij = a⁰_ij + a¹_ij x + a²_ij y` split into the constant matrix `A₀` and
/// the eight linear coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaCoordinates {
    /// `A₀`, row-major 2×2.
    pub constant: [[BigRational; 2]; 2],
    /// `[a¹₁₁, a²₁₁, a¹₁₂, a²₁₂, a¹₂₁, a²₂₁, a¹₂₂, a²₂₂]`
    pub linear: [BigRational; 8],
}

impl ThetaCoordinates {
    pub fn determinant(&self) -> BigRational {
        let c = &self.constant;
        &c[0][0] * &c[1][1] - &c[0][1] * &c[1][0]
    }

    /// The matrix these coordinates describe.
    pub fn reassemble(&self) -> AutMatrix {
        AutMatrix::from_fn(2, |r, c| {
            let k = 2 * (2 * r + c);
            Expr::Const(self.constant[r][c].clone())
                + Expr::Const(self.linear[k].clone()) * Expr::var(0)
                + Expr::Const(self.linear[k + 1].clone()) * Expr::var(1)
        })
    }
}

pub fn theta_map(a: &AutMatrix) -> Result<ThetaCoordinates, Error> {
    if a.dim() != 2 {
        return Err(Error::Shape { expected: 2, rows: a.dim(), cols: a.dim() });
    }
    let zero = || BigRational::zero();
    let mut constant = [[zero(), zero()], [zero(), zero()]];
    let mut linear: [BigRational; 8] = std::array::from_fn(|_| zero());
    for r in 0..2 {
        for c in 0..2 {
            let e = a.get(r, c);
            let affine = e.degree().is_some_and(|d| d <= 1) && e.max_var().is_none_or(|v| v < 2);
            if !affine {
                return Err(Error::NotAffine { row: r, col: c });
            }
            constant[r][c] = e.linear_coefficient(None);
            linear[2 * (2 * r + c)] = e.linear_coefficient(Some(0));
            linear[2 * (2 * r + c) + 1] = e.linear_coefficient(Some(1));
        }
    }
    let theta = ThetaCoordinates { constant, linear };
    if theta.determinant().is_zero() {
        return Err(Error::SingularConstantPart);
    }
    Ok(theta)
}

/// One point `f(t)` on the path from `I` to `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub matrix: DMatrix<f64>,
    /// Max-entry `|f(t) f(t)ᵀ − I|`.
    pub defect: f64,
}

fn constant_values(a: &AutMatrix) -> Result<DMatrix<f64>, Error> {
    if !a.is_constant() {
        return Err(Error::NonConstant);
    }
    Ok(a.eval_f64(&vec![0.0; a.dim()]))
}

/// Relative threshold below which the path denominator counts as singular.
const SINGULAR_RTOL: f64 = 1e-12;

/// `f(t) = ((1−t)I + (1+t)A)((1+t)I + (1−t)A)⁻¹`, so `f(0) = I`, `f(1) = A`.
pub fn connect_path(a: &AutMatrix, t: f64) -> Result<PathSample, Error> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
    }
    let a = constant_values(a)?;
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let numerator = &eye * (1.0 - t) + &a * (1.0 + t);
    let denominator = &eye * (1.0 + t) + &a * (1.0 - t);
    let sv = denominator.clone().svd(false, false).singular_values;
    if sv.min() <= SINGULAR_RTOL * sv.max().max(1.0) {
        return Err(Error::SingularDenominator { t });
    }
    let inv = denominator.try_inverse().ok_or(Error::SingularDenominator { t })?;
    let matrix = numerator * inv;
    let defect = (&matrix * matrix.transpose() - eye).amax();
    Ok(PathSample { t, matrix, defect })
}

/// `count` uniform samples of `t` on `[0, 1]`, each with its own outcome.
pub fn sample_path(a: &AutMatrix, count: usize) -> Vec<Result<PathSample, Error>> {
    let last = count.saturating_sub(1).max(1) as f64;
    (0..count).map(|k| connect_path(a, k as f64 / last)).collect()
}

/// Sup-norm on two nested grids.
#[derive(Clone, Debug, PartialEq)]
pub struct SupNorm {
    /// On the backend grid.
    pub value: f64,
    /// On the refined grid (`2m − 1` points per axis, containing the original).
    pub refined: f64,
    /// The refined value exceeds the coarse one by more than 10%.
    pub unbounded: bool,
}

fn sup_on(a: &AutMatrix, derivs: &[AutMatrix], backend: &Backend) -> Result<f64, Error> {
    let mut best = 0.0_f64;
    for p in backend.grid(a.dim())? {
        let mut s = a.eval_f64(&p).norm_squared();
        for d in derivs {
            s += d.eval_f64(&p).norm_squared();
        }
        best = best.max(s.sqrt());
    }
    Ok(best)
}

fn derivatives(a: &AutMatrix) -> Vec<AutMatrix> {
    (0..a.dim()).map(|v| AutMatrix::from_fn(a.dim(), |r, c| a.get(r, c).derivative(v))).collect()
}

/// `sup_p (‖A(p)‖² + Σ_i ‖∂_i A(p)‖²)^{1/2}` with the Frobenius norm, over the sample grid.
pub fn sup_norm(a: &AutMatrix, backend: &Backend) -> Result<f64, Error> {
    sup_on(a, &derivatives(a), backend)
}

pub fn sup_norm_profile(a: &AutMatrix, backend: &Backend) -> Result<SupNorm, Error> {
    let derivs = derivatives(a);
    let value = sup_on(a, &derivs, backend)?;
    let fine = backend.clone().with_points(2 * backend.points_per_axis - 1);
    let refined = sup_on(a, &derivs, &fine)?;
    Ok(SupNorm { value, refined, unbounded: refined > 1.1 * value })
}

/// Which side of `det = 0` a constant orthogonal matrix sits on.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentLabel {
    pub determinant: f64,
    pub determinant_sign: i8,
    pub is_minus_identity: bool,
}

impl ComponentLabel {
    pub fn label(&self) -> &'static str {
        if self.determinant_sign > 0 {
            "contains-I"
        } else {
            "contains-minus-I"
        }
    }
}

pub fn classify_component(a: &AutMatrix) -> Result<ComponentLabel, Error> {
    let values = constant_values(a)?;
    let n = a.dim();
    let minus_i = AutMatrix::scalar(n, Expr::int(-1));
    let is_minus_identity = a.sub(&minus_i)?.entries().iter().all(Expr::is_identically_zero)
        || (&values + DMatrix::<f64>::identity(n, n)).amax() == 0.0;
    let (determinant, determinant_sign) = match a.determinant().as_rational() {
        Some(d) => (
            crate::expr::rational_f64(&d),
            if d.is_positive() {
                1
            } else if d.is_negative() {
                -1
            } else {
                0
            },
        ),
        None => {
            let d = values.determinant();
            (
                d,
                if d > 0.0 {
                    1
                } else if d < 0.0 {
                    -1
                } else {
                    0
                },
            )
        }
    };
    Ok(ComponentLabel { determinant, determinant_sign, is_minus_identity })
}
