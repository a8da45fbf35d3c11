use nalgebra::DMatrix;
use num_rational::BigRational;

use crate::backend::Backend;
use crate::error::Error;
use crate::expr::{Chart, Expr};
use crate::exterior::{OneForm, VectorField};

/// Square matrix of chart functions, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AutMatrix {
    n: usize,
    entries: Vec<Expr>,
}

impl AutMatrix {
    /// Square matrix from rows; entries are normalized.
    pub fn from_rows(rows: Vec<Vec<Expr>>) -> Result<Self, Error> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Shape { expected: 1, rows: 0, cols: 0 });
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Shape { expected: n, rows: n, cols: row.len() });
            }
            entries.extend(row.iter().map(Expr::normalize));
        }
        Ok(AutMatrix { n, entries })
    }

    /// Parses and normalizes every entry with `chart`; the matrix must be `dim × dim`.
    pub fn parse(chart: &Chart, rows: &[Vec<&str>]) -> Result<Self, Error> {
        let n = chart.dim();
        if rows.len() != n {
            return Err(Error::Shape { expected: n, rows: rows.len(), cols: rows.first().map_or(0, Vec::len) });
        }
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| chart.parse(s).map_err(Error::from)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        AutMatrix::from_rows(parsed)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Expr) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        AutMatrix { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        AutMatrix::scalar(n, Expr::one())
    }

    pub fn scalar(n: usize, s: Expr) -> Self {
        AutMatrix::from_fn(n, |r, c| if r == c { s.clone() } else { Expr::zero() })
    }

    /// 2×2 rotation by the function `f`: `[[cos f, −sin f], [sin f, cos f]]`.
    pub fn rotation(f: Expr) -> Self {
        let c = f.clone().cos();
        let s = f.sin();
        AutMatrix { n: 2, entries: vec![c.clone(), -&s, s, c] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &Expr {
        &self.entries[row * self.n + col]
    }

    pub fn entries(&self) -> &[Expr] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Expr]> {
        self.entries.chunks(self.n)
    }

    pub fn transpose(&self) -> Self {
        AutMatrix::from_fn(self.n, |r, c| self.get(c, r).clone())
    }

    fn same_dim(&self, other: &AutMatrix) -> Result<(), Error> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n, found: other.n })
        }
    }

    pub fn add(&self, other: &AutMatrix) -> Result<Self, Error> {
        self.same_dim(other)?;
        Ok(AutMatrix::from_fn(self.n, |r, c| self.get(r, c) + other.get(r, c)))
    }

    pub fn sub(&self, other: &AutMatrix) -> Result<Self, Error> {
        self.same_dim(other)?;
        Ok(AutMatrix::from_fn(self.n, |r, c| self.get(r, c) - other.get(r, c)))
    }

    pub fn mul(&self, other: &AutMatrix) -> Result<Self, Error> {
        self.same_dim(other)?;
        Ok(AutMatrix::from_fn(self.n, |r, c| (0..self.n).map(|k| self.get(r, k) * other.get(k, c)).sum()))
    }

    /// `I + B`
    pub fn one_plus(&self) -> Self {
        AutMatrix::from_fn(self.n, |r, c| if r == c { Expr::one() + self.get(r, c) } else { self.get(r, c).clone() })
    }

    /// `I − B`
    pub fn one_minus(&self) -> Self {
        AutMatrix::from_fn(self.n, |r, c| if r == c { Expr::one() - self.get(r, c) } else { -self.get(r, c) })
    }

    /// Matrix–vector product on a coordinate array.
    pub fn apply(&self, v: &[Expr]) -> Result<Vec<Expr>, Error> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: v.len() });
        }
        Ok((0..self.n)
            .map(|r| (0..self.n).filter(|&c| !v[c].is_identically_zero()).map(|c| self.get(r, c) * &v[c]).sum())
            .collect())
    }

    pub fn apply_field(&self, x: &VectorField) -> Result<VectorField, Error> {
        Ok(VectorField::new(self.apply(x.components())?))
    }

    /// Acts on 1-forms through the Euclidean identification.
    pub fn apply_form(&self, w: &OneForm) -> Result<OneForm, Error> {
        Ok(OneForm::new(self.apply(w.components())?))
    }

    pub fn column(&self, c: usize) -> Vec<Expr> {
        (0..self.n).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.entries.iter().all(Expr::is_polynomial)
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(Expr::is_constant)
    }

    /// Rational entries, when every entry is a rational constant.
    pub fn as_rational(&self) -> Option<Vec<Vec<BigRational>>> {
        self.rows().map(|r| r.iter().map(Expr::as_rational).collect()).collect()
    }

    pub fn from_rational(rows: &[Vec<BigRational>]) -> Self {
        let n = rows.len();
        AutMatrix::from_fn(n, |r, c| Expr::Const(rows[r][c].clone()))
    }

    pub fn eval_f64(&self, point: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |r, c| self.get(r, c).eval_f64(point))
    }

    /// Largest variable index used by any entry.
    pub fn max_var(&self) -> Option<usize> {
        self.entries.iter().filter_map(Expr::max_var).max()
    }

    /// Symbolic determinant by cofactor expansion.
    pub fn determinant(&self) -> Expr {
        let idx: Vec<usize> = (0..self.n).collect();
        determinant(&|r, c| self.get(r, c).clone(), &idx, &idx)
    }
}

/// Cofactor expansion along the first listed row.
pub(crate) fn determinant(get: &dyn Fn(usize, usize) -> Expr, rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        0 => Expr::one(),
        1 => get(rows[0], cols[0]),
        _ => {
            let r0 = rows[0];
            let sub_rows = &rows[1..];
            let mut terms = Vec::with_capacity(cols.len());
            for (k, &c) in cols.iter().enumerate() {
                let entry = get(r0, c);
                if entry.is_identically_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|&cc| cc != c).collect();
                let minor = determinant(get, sub_rows, &sub_cols);
                let term = entry * minor;
                terms.push(if k % 2 == 0 { term } else { -term });
            }
            terms.into_iter().sum()
        }
    }
}

/// `true` iff every entry of `B·Bᵀ − I` is zero under `backend`.
pub fn is_orthogonal(b: &AutMatrix, backend: &Backend) -> Result<bool, Error> {
    backend.ensure_supported(b.entries())?;
    let defect = b.mul(&b.transpose())?.sub(&AutMatrix::identity(b.dim()))?;
    for e in defect.entries() {
        if !backend.is_zero(e)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> AutMatrix {
        let chart = Chart::new(rows.len()).unwrap();
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        AutMatrix::parse(&chart, &rows).unwrap()
    }

    #[test]
    fn orthogonality_examples() {
        let rot = m(&[&["0", "-1"], &["1", "0"]]);
        assert!(is_orthogonal(&rot, &Backend::exact()).unwrap());
        let two = AutMatrix::scalar(2, Expr::int(2));
        assert!(!is_orthogonal(&two, &Backend::exact()).unwrap());
        let rot_x = m(&[&["cos(x)", "-sin(x)"], &["sin(x)", "cos(x)"]]);
        assert!(is_orthogonal(&rot_x, &Backend::numeric()).unwrap());
        assert!(matches!(is_orthogonal(&rot_x, &Backend::exact()), Err(Error::NotPolynomial)));
    }

    #[test]
    fn rows_are_normalized() {
        let raw = Expr::Mul(vec![Expr::int(3), Expr::rational(1, 5)]);
        let a = AutMatrix::from_rows(vec![vec![raw]]).unwrap();
        assert_eq!(a.get(0, 0), &Expr::rational(3, 5));
    }

    #[test]
    fn shape_errors() {
        let chart = Chart::new(2).unwrap();
        let bad = vec![vec!["1", "0", "0"], vec!["0", "1", "0"]];
        assert!(matches!(AutMatrix::parse(&chart, &bad), Err(Error::Shape { expected: 2, cols: 3, .. })));
        let bad_rows = vec![vec!["1", "0"]];
        assert!(AutMatrix::parse(&chart, &bad_rows).is_err());
    }

    #[test]
    fn determinant_matches_hand_expansion() {
        let a = m(&[&["1", "2", "0"], &["0", "x", "1"], &["3", "0", "y"]]);
        // 1·(x·y − 0) − 2·(0·y − 1·3) + 0 = xy + 6
        let c = Chart::new(3).unwrap();
        assert_eq!(a.determinant(), c.parse("x*y + 6").unwrap().normalize());
    }

    #[test]
    fn rotation_constructor() {
        let r = AutMatrix::rotation(Expr::var(0));
        let rot_x = m(&[&["cos(x)", "-sin(x)"], &["sin(x)", "cos(x)"]]);
        assert_eq!(r.entries(), &rot_x.entries().iter().map(Expr::normalize).collect::<Vec<_>>()[..]);
    }
}
