//! Vector fields, 1-forms and 2-forms on the chart, in the coordinate frame.
//!
//! The metric is Euclidean, so [`VectorField::flat`] and [`OneForm::sharp`]
//! keep the component array unchanged. Contraction follows
//! `ι_X(dx_t ∧ dx_j) = X_t dx_j − X_j dx_t`.

use num_rational::BigRational;

use crate::error::Error;
use crate::expr::Expr;

fn check_dim(expected: usize, found: usize) -> Result<(), Error> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

fn basis_vec(n: usize, i: usize) -> Vec<Expr> {
    (0..n).map(|k| if k == i { Expr::one() } else { Expr::zero() }).collect()
}

fn half() -> BigRational {
    BigRational::new(1.into(), 2.into())
}

/// `Σ_i X_i ∂_i`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VectorField {
    components: Vec<Expr>,
}

/// `Σ_i ω_i dx_i`
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OneForm {
    components: Vec<Expr>,
}

macro_rules! component_ops {
    ($ty:ident) => {
        impl $ty {
            pub fn new(components: Vec<Expr>) -> Self {
                $ty { components }
            }

            pub fn zero(n: usize) -> Self {
                $ty { components: vec![Expr::zero(); n] }
            }

            /// The i-th coordinate basis element.
            pub fn basis(n: usize, i: usize) -> Self {
                $ty { components: basis_vec(n, i) }
            }

            pub fn dim(&self) -> usize {
                self.components.len()
            }

            pub fn components(&self) -> &[Expr] {
                &self.components
            }

            pub fn component(&self, i: usize) -> &Expr {
                &self.components[i]
            }

            pub fn into_components(self) -> Vec<Expr> {
                self.components
            }

            pub fn add(&self, other: &$ty) -> Result<$ty, Error> {
                check_dim(self.dim(), other.dim())?;
                Ok($ty::new(self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect()))
            }

            pub fn sub(&self, other: &$ty) -> Result<$ty, Error> {
                check_dim(self.dim(), other.dim())?;
                Ok($ty::new(self.components.iter().zip(&other.components).map(|(a, b)| a - b).collect()))
            }

            /// Pointwise multiplication by a function.
            pub fn scale(&self, f: &Expr) -> $ty {
                $ty::new(self.components.iter().map(|c| f * c).collect())
            }

            pub fn neg(&self) -> $ty {
                $ty::new(self.components.iter().map(|c| -c).collect())
            }

            pub fn normalize(&self) -> $ty {
                $ty::new(self.components.iter().map(Expr::normalize).collect())
            }

            pub fn is_polynomial(&self) -> bool {
                self.components.iter().all(Expr::is_polynomial)
            }
        }
    };
}

component_ops!(VectorField);
component_ops!(OneForm);

impl VectorField {
    /// Dual 1-form with the same coordinates.
    pub fn flat(&self) -> OneForm {
        OneForm::new(self.components.clone())
    }

    /// `X(f) = Σ_j X_j ∂_j f`
    pub fn apply_to(&self, f: &Expr) -> Expr {
        self.components
            .iter()
            .enumerate()
            .filter(|(_, xj)| !xj.is_identically_zero())
            .map(|(j, xj)| xj * f.derivative(j))
            .sum()
    }
}

impl OneForm {
    /// Dual vector field with the same coordinates.
    pub fn sharp(&self) -> VectorField {
        VectorField::new(self.components.clone())
    }

    /// `ω(X) = Σ_i ω_i X_i`
    pub fn eval_on(&self, x: &VectorField) -> Result<Expr, Error> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.components.iter().zip(x.components()).map(|(w, v)| w * v).sum())
    }

    /// The exact 1-form `df = Σ_i ∂_i f dx_i`.
    pub fn gradient(f: &Expr, n: usize) -> OneForm {
        OneForm::new((0..n).map(|i| f.derivative(i)).collect())
    }
}

/// `Σ_{t<j} c_{tj} dx_t ∧ dx_j`, stored strictly upper-triangular.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwoForm {
    n: usize,
    upper: Vec<Expr>,
}

impl TwoForm {
    fn slot(n: usize, t: usize, j: usize) -> usize {
        debug_assert!(t < j && j < n);
        // Row t of the upper triangle starts after rows 0..t.
        t * (2 * n - t - 1) / 2 + (j - t - 1)
    }

    pub fn zero(n: usize) -> Self {
        TwoForm { n, upper: vec![Expr::zero(); n * n.saturating_sub(1) / 2] }
    }

    /// Builds from a coefficient function on pairs `t < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let mut out = TwoForm::zero(n);
        for t in 0..n {
            for j in (t + 1)..n {
                out.upper[Self::slot(n, t, j)] = f(t, j);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Coefficient `Ω_{tj}` for any ordered pair, using `Ω_{tj} = −Ω_{jt}`.
    pub fn coefficient(&self, t: usize, j: usize) -> Expr {
        use std::cmp::Ordering::*;
        match t.cmp(&j) {
            Less => self.upper[Self::slot(self.n, t, j)].clone(),
            Greater => -&self.upper[Self::slot(self.n, j, t)],
            Equal => Expr::zero(),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        self.upper.iter().all(Expr::is_identically_zero)
    }
}

/// Module inner product `⟨X, Y⟩ = Σ_i X_i Y_i` (function-valued).
pub fn inner_product(x: &VectorField, y: &VectorField) -> Result<Expr, Error> {
    x.flat().eval_on(y)
}

/// `⟨(X, ω), (Y, μ)⟩₊ = ½ (μ(X) + ω(Y))`
pub fn pairing_plus(p: (&VectorField, &OneForm), q: (&VectorField, &OneForm)) -> Result<Expr, Error> {
    let (x, omega) = p;
    let (y, mu) = q;
    check_dim(x.dim(), omega.dim())?;
    check_dim(y.dim(), mu.dim())?;
    let s = mu.eval_on(x)? + omega.eval_on(y)?;
    Ok(s.scale(&half()))
}

/// `[X, Y]_m = Σ_j (X_j ∂_j Y_m − Y_j ∂_j X_m)`
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, Error> {
    check_dim(x.dim(), y.dim())?;
    Ok(VectorField::new((0..x.dim()).map(|m| x.apply_to(y.component(m)) - y.apply_to(x.component(m))).collect()))
}

/// `(dα)_{tj} = ∂_t α_j − ∂_j α_t` for `t < j`.
pub fn exterior_derivative(alpha: &OneForm) -> TwoForm {
    TwoForm::from_fn(alpha.dim(), |t, j| alpha.component(j).derivative(t) - alpha.component(t).derivative(j))
}

/// `(ι_X Ω)_j = Σ_t X_t Ω_{tj}`
pub fn contract(x: &VectorField, omega: &TwoForm) -> Result<OneForm, Error> {
    check_dim(omega.dim(), x.dim())?;
    let n = x.dim();
    Ok(OneForm::new(
        (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&t| t != j && !x.component(t).is_identically_zero())
                    .map(|t| x.component(t) * omega.coefficient(t, j))
                    .sum()
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Chart;

    fn e(s: &str) -> Expr {
        Chart::new(2).unwrap().parse(s).unwrap().normalize()
    }

    fn vf(a: &str, b: &str) -> VectorField {
        VectorField::new(vec![e(a), e(b)])
    }

    fn form(a: &str, b: &str) -> OneForm {
        OneForm::new(vec![e(a), e(b)])
    }

    #[test]
    fn musical_maps_keep_coordinates() {
        assert_eq!(VectorField::basis(2, 0).flat(), OneForm::basis(2, 0));
        assert_eq!(form("y", "1").sharp(), vf("y", "1"));
        assert_eq!(VectorField::zero(2).flat(), OneForm::zero(2));
    }

    #[test]
    fn inner_product_examples() {
        let d1 = VectorField::basis(2, 0);
        let d2 = VectorField::basis(2, 1);
        assert_eq!(inner_product(&d1, &d1).unwrap(), Expr::one());
        assert_eq!(inner_product(&vf("x", "0"), &vf("y", "0")).unwrap(), e("x*y"));
        assert_eq!(inner_product(&d1, &d2).unwrap(), Expr::zero());
        assert!(inner_product(&d1, &VectorField::basis(3, 0)).is_err());
    }

    #[test]
    fn pairing_examples() {
        let d1 = VectorField::basis(2, 0);
        let d2 = VectorField::basis(2, 1);
        let dx1 = OneForm::basis(2, 0);
        let dx2 = OneForm::basis(2, 1);
        assert_eq!(pairing_plus((&d1, &dx1), (&d1, &dx1)).unwrap(), Expr::one());
        assert_eq!(pairing_plus((&d1, &dx2), (&d2, &dx1.neg())).unwrap(), Expr::zero());
        let x = vf("x", "y^2");
        let mu = form("3", "x");
        let half_mu_x = mu.eval_on(&x).unwrap().scale(&half());
        assert_eq!(pairing_plus((&x, &OneForm::zero(2)), (&VectorField::zero(2), &mu)).unwrap(), half_mu_x);
    }

    #[test]
    fn lie_bracket_examples() {
        let d1 = VectorField::basis(2, 0);
        let d2 = VectorField::basis(2, 1);
        assert_eq!(lie_bracket(&d1, &d2).unwrap(), VectorField::zero(2));
        // [x∂_2, ∂_1] = −∂_2, computed by hand: only −∂_1(x)·∂_2 survives.
        assert_eq!(lie_bracket(&vf("0", "x"), &d1).unwrap(), vf("0", "-1"));
        let x = vf("x*y", "sin(x)");
        assert_eq!(lie_bracket(&x, &x).unwrap(), VectorField::zero(2));
    }

    #[test]
    fn exterior_derivative_examples() {
        assert!(exterior_derivative(&OneForm::basis(2, 0)).is_identically_zero());
        let d = exterior_derivative(&form("y", "0"));
        assert_eq!(d.coefficient(0, 1), Expr::int(-1));
        assert_eq!(d.coefficient(1, 0), Expr::int(1));
        assert!(exterior_derivative(&form("x", "y")).is_identically_zero());
    }

    #[test]
    fn contraction_examples() {
        let minus_vol = TwoForm::from_fn(2, |_, _| Expr::int(-1));
        let vol = TwoForm::from_fn(2, |_, _| Expr::int(1));
        assert_eq!(contract(&VectorField::basis(2, 1), &minus_vol).unwrap(), OneForm::basis(2, 0));
        assert_eq!(contract(&VectorField::basis(2, 0), &vol).unwrap(), OneForm::basis(2, 1));
        let x = vf("x^2", "exp(y)");
        let om = TwoForm::from_fn(2, |_, _| e("x*y + 1"));
        let c = contract(&x, &om).unwrap();
        assert!(c.eval_on(&x).unwrap().is_identically_zero());
    }

    #[test]
    fn two_form_slots_cover_upper_triangle() {
        let n = 4;
        let f = TwoForm::from_fn(n, |t, j| Expr::int((10 * t + j) as i64));
        for t in 0..n {
            for j in 0..n {
                let expected = match t.cmp(&j) {
                    std::cmp::Ordering::Less => Expr::int((10 * t + j) as i64),
                    std::cmp::Ordering::Greater => Expr::int(-((10 * j + t) as i64)),
                    std::cmp::Ordering::Equal => Expr::zero(),
                };
                assert_eq!(f.coefficient(t, j), expected);
            }
        }
    }
}
