use nalgebra::DMatrix;
use rayon::prelude::*;

use super::matrix::{determinant, is_orthogonal, AutMatrix};
use super::Residual;
use crate::backend::{Backend, Mode};
use crate::error::Error;
use crate::expr::Expr;
use crate::exterior::{inner_product, pairing_plus, OneForm, VectorField};

/// Generating pairs `(X_i, ω_i)` of a subbundle of `TM ⊕ T*M`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracGenerators {
    pairs: Vec<(VectorField, OneForm)>,
    source: Option<AutMatrix>,
}

impl DiracGenerators {
    /// Hand-built generators; every slot must share one dimension.
    pub fn new(pairs: Vec<(VectorField, OneForm)>) -> Result<Self, Error> {
        if let Some((x0, _)) = pairs.first() {
            let n = x0.dim();
            for (x, w) in &pairs {
                for d in [x.dim(), w.dim()] {
                    if d != n {
                        return Err(Error::DimensionMismatch { expected: n, found: d });
                    }
                }
            }
        }
        Ok(DiracGenerators { pairs, source: None })
    }

    pub fn pairs(&self) -> &[(VectorField, OneForm)] {
        &self.pairs
    }

    pub fn source(&self) -> Option<&AutMatrix> {
        self.source.as_ref()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Chart dimension (0 for an empty set).
    pub fn dim(&self) -> usize {
        self.pairs.first().map_or(0, |(x, _)| x.dim())
    }

    fn all_exprs(&self) -> impl Iterator<Item = &Expr> {
        self.pairs.iter().flat_map(|(x, w)| x.components().iter().chain(w.components()))
    }
}

/// `L_B`: the pairs `((I+B)∂_i, (I−B)dx_i)`. Rejects non-orthogonal `B`.
pub fn build_generators(b: &AutMatrix, backend: &Backend) -> Result<DiracGenerators, Error> {
    if !is_orthogonal(b, backend)? {
        return Err(Error::NotOrthogonal);
    }
    Ok(generators_unchecked(b))
}

pub(crate) fn generators_unchecked(b: &AutMatrix) -> DiracGenerators {
    let plus = b.one_plus();
    let minus = b.one_minus();
    let pairs = (0..b.dim()).map(|i| (VectorField::new(plus.column(i)), OneForm::new(minus.column(i)))).collect();
    DiracGenerators { pairs, source: Some(b.clone()) }
}

/// Pairwise `⟨g_i, g_k⟩₊` for `i ≤ k`, keyed `[i, k]`.
pub fn isotropy_residuals(l: &DiracGenerators, backend: &Backend) -> Result<Vec<Residual>, Error> {
    backend.ensure_supported(l.all_exprs())?;
    let idx = upper_pairs(l.len(), true);
    idx.par_iter()
        .map(|&(i, k)| {
            let (x, w) = &l.pairs[i];
            let (y, m) = &l.pairs[k];
            let e = pairing_plus((x, w), (y, m))?;
            Residual::of(vec![i, k], &[e], backend)
        })
        .collect()
}

pub fn check_isotropy(l: &DiracGenerators, backend: &Backend) -> Result<bool, Error> {
    Ok(isotropy_residuals(l, backend)?.iter().all(|r| r.zero))
}

/// `⟨P₁g_i, P₁τg_k⟩ + ⟨P₂g_i, P₂τg_k⟩` for all `i, k`, keyed `[i, k]`.
pub fn tau_residuals(l: &DiracGenerators, backend: &Backend) -> Result<Vec<Residual>, Error> {
    backend.ensure_supported(l.all_exprs())?;
    let n = l.len();
    let idx: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).collect();
    idx.par_iter()
        .map(|&(i, k)| {
            let (xi, wi) = &l.pairs[i];
            let (xk, wk) = &l.pairs[k];
            // τ(X, ω) = (ω♯, X♭)
            let e = inner_product(xi, &wk.sharp())? + inner_product(&wi.sharp(), xk)?;
            Residual::of(vec![i, k], &[e], backend)
        })
        .collect()
}

pub fn check_tau_complementarity(l: &DiracGenerators, backend: &Backend) -> Result<bool, Error> {
    Ok(tau_residuals(l, backend)?.iter().all(|r| r.zero))
}

/// Column `g` of the stacked `2n × k` generator matrix.
fn stacked(l: &DiracGenerators) -> Vec<Vec<Expr>> {
    l.pairs.iter().map(|(x, w)| x.components().iter().chain(w.components()).cloned().collect()).collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Smallest numeric rank of the stacked generator matrix over the sample grid.
pub fn min_sampled_rank(l: &DiracGenerators, backend: &Backend) -> Result<usize, Error> {
    let cols = stacked(l);
    let n = l.dim();
    if cols.is_empty() {
        return Ok(0);
    }
    let grid = backend.grid(n)?;
    let ranks: Vec<usize> = grid
        .par_iter()
        .map(|p| {
            let m = DMatrix::from_fn(2 * n, cols.len(), |r, c| cols[c][r].eval_f64(p));
            let sv = m.svd(false, false).singular_values;
            let top = sv.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
            sv.iter().filter(|s| **s > backend.tolerance * top).count()
        })
        .collect();
    Ok(ranks.into_iter().min().unwrap_or(0))
}

/// Maximality: rank `n` at every grid point (numeric) or a nonvanishing
/// `n × n` minor (exact).
pub fn check_rank(l: &DiracGenerators, backend: &Backend) -> Result<bool, Error> {
    let n = l.dim();
    if l.len() < n || n == 0 {
        return Ok(false);
    }
    match backend.mode {
        Mode::Numeric => Ok(min_sampled_rank(l, backend)? == n),
        Mode::Exact => {
            backend.ensure_supported(l.all_exprs())?;
            let cols = stacked(l);
            let get = |r: usize, c: usize| cols[c][r].clone();
            for rows in combinations(2 * n, n) {
                for gens in combinations(l.len(), n) {
                    if !determinant(&get, &rows, &gens).is_identically_zero() {
                        return Ok(true);
                    }
                }
            }
            Ok(false)
        }
    }
}

/// Components of `(I−Bᵀ)Z + (I+Bᵀ)η♯`, which vanish exactly on `L_B`.
pub(crate) fn membership_defect(z: &VectorField, eta: &OneForm, b: &AutMatrix) -> Result<Vec<Expr>, Error> {
    let bt = b.transpose();
    let lhs = bt.one_minus().apply(z.components())?;
    let rhs = bt.one_plus().apply(eta.components())?;
    Ok(lhs.iter().zip(&rhs).map(|(a, c)| a + c).collect())
}

/// Whether `(Z, η)` lies in `L_B`, via `(I−Bᵀ)Z + (I+Bᵀ)η♯ = 0`.
pub fn membership(z: &VectorField, eta: &OneForm, b: &AutMatrix, backend: &Backend) -> Result<bool, Error> {
    if !is_orthogonal(b, backend)? {
        return Err(Error::NotOrthogonal);
    }
    let defect = membership_defect(z, eta, b)?;
    backend.ensure_supported(&defect)?;
    Ok(Residual::of(vec![], &defect, backend)?.zero)
}

pub(crate) fn upper_pairs(n: usize, diagonal: bool) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((if diagonal { i } else { i + 1 })..n).map(move |k| (i, k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Chart;

    fn rot90() -> AutMatrix {
        AutMatrix::parse(&Chart::new(2).unwrap(), &[vec!["0", "-1"], vec!["1", "0"]]).unwrap()
    }

    #[test]
    fn identity_and_minus_identity_generators() {
        let ex = Backend::exact();
        let l = build_generators(&AutMatrix::identity(2), &ex).unwrap();
        for (i, (x, w)) in l.pairs().iter().enumerate() {
            assert_eq!(*x, VectorField::basis(2, i).scale(&Expr::int(2)));
            assert_eq!(*w, OneForm::zero(2));
        }
        let l = build_generators(&AutMatrix::scalar(2, Expr::int(-1)), &ex).unwrap();
        for (i, (x, w)) in l.pairs().iter().enumerate() {
            assert_eq!(*x, VectorField::zero(2));
            assert_eq!(*w, OneForm::basis(2, i).scale(&Expr::int(2)));
        }
    }

    #[test]
    fn rotation_generators_apply_columnwise() {
        // I+B = [[1,-1],[1,1]], I-B = [[1,1],[-1,1]]
        let l = build_generators(&rot90(), &Backend::exact()).unwrap();
        let (x0, w0) = &l.pairs()[0];
        assert_eq!(x0.components(), &[Expr::int(1), Expr::int(1)]);
        assert_eq!(w0.components(), &[Expr::int(1), Expr::int(-1)]);
        let (x1, w1) = &l.pairs()[1];
        assert_eq!(x1.components(), &[Expr::int(-1), Expr::int(1)]);
        assert_eq!(w1.components(), &[Expr::int(1), Expr::int(1)]);
        assert!(check_isotropy(&l, &Backend::exact()).unwrap());
    }

    #[test]
    fn non_orthogonal_is_rejected() {
        let r = build_generators(&AutMatrix::scalar(2, Expr::int(2)), &Backend::exact());
        assert!(matches!(r, Err(Error::NotOrthogonal)));
    }

    #[test]
    fn non_isotropic_hand_set() {
        let l = DiracGenerators::new(vec![(VectorField::basis(2, 0), OneForm::basis(2, 0))]).unwrap();
        assert!(!check_isotropy(&l, &Backend::exact()).unwrap());
        let r = isotropy_residuals(&l, &Backend::numeric()).unwrap();
        assert_eq!(r[0].max_abs, Some(1.0));
    }

    #[test]
    fn tau_examples() {
        let ex = Backend::exact();
        assert!(check_tau_complementarity(&build_generators(&AutMatrix::identity(2), &ex).unwrap(), &ex).unwrap());
        assert!(check_tau_complementarity(&build_generators(&rot90(), &ex).unwrap(), &ex).unwrap());
        let num = Backend::numeric();
        let rx = AutMatrix::rotation(Expr::var(0));
        assert!(check_tau_complementarity(&build_generators(&rx, &num).unwrap(), &num).unwrap());
    }

    #[test]
    fn rank_examples() {
        for backend in [Backend::exact(), Backend::numeric()] {
            assert!(check_rank(&build_generators(&AutMatrix::identity(2), &backend).unwrap(), &backend).unwrap());
            assert!(check_rank(&build_generators(&rot90(), &backend).unwrap(), &backend).unwrap());
            let dup = DiracGenerators::new(vec![
                (VectorField::basis(2, 0), OneForm::zero(2)),
                (VectorField::basis(2, 0), OneForm::zero(2)),
            ])
            .unwrap();
            assert!(!check_rank(&dup, &backend).unwrap());
        }
    }

    #[test]
    fn membership_examples() {
        let ex = Backend::exact();
        let b = rot90();
        let l = build_generators(&b, &ex).unwrap();
        for (x, w) in l.pairs() {
            assert!(membership(x, w, &b, &ex).unwrap());
        }
        let (x0, w0) = &l.pairs()[0];
        assert!(!membership(x0, &w0.neg(), &b, &ex).unwrap());
        assert!(membership(&VectorField::zero(2), &OneForm::zero(2), &b, &ex).unwrap());
        let two = AutMatrix::scalar(2, Expr::int(2));
        assert!(matches!(membership(x0, w0, &two, &ex), Err(Error::NotOrthogonal)));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(6, 3).len(), 20);
        assert_eq!(combinations(4, 2)[0], vec![0, 1]);
    }
}
