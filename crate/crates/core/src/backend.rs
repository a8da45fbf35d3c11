//! Zero-testing backends.
//!
//! Exact mode decides `e == 0` on the canonical form and is only available for
//! polynomial expressions. Numeric mode samples a uniform grid on a box and
//! accepts `|e(p)| <= tolerance` at every grid point.

use crate::error::Error;
use crate::expr::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Numeric,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Numeric => "numeric",
        }
    }
}

/// Closed interval per axis. A single interval applies to every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBox(Vec<(f64, f64)>);

impl SampleBox {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self, Error> {
        SampleBox::per_axis(vec![(lo, hi)])
    }

    pub fn per_axis(axes: Vec<(f64, f64)>) -> Result<Self, Error> {
        if axes.is_empty() {
            return Err(Error::Backend("sample box has no axes".into()));
        }
        for &(lo, hi) in &axes {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Backend(format!("invalid interval [{lo}, {hi}]")));
            }
        }
        Ok(SampleBox(axes))
    }

    pub fn axes(&self) -> &[(f64, f64)] {
        &self.0
    }

    fn axis(&self, i: usize) -> Result<(f64, f64), Error> {
        match self.0.len() {
            1 => Ok(self.0[0]),
            len if i < len => Ok(self.0[i]),
            len => Err(Error::Backend(format!("sample box has {len} axes, axis {i} requested"))),
        }
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox(vec![(-1.0, 1.0)])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Backend {
    pub mode: Mode,
    pub sample_box: SampleBox,
    pub points_per_axis: usize,
    pub tolerance: f64,
}

/// Outcome of a zero test. `max_abs` is the grid maximum in numeric mode.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTest {
    pub zero: bool,
    pub max_abs: Option<f64>,
}

pub const DEFAULT_POINTS: usize = 9;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

impl Backend {
    pub fn new(mode: Mode, sample_box: SampleBox, points_per_axis: usize, tolerance: f64) -> Result<Self, Error> {
        if points_per_axis == 0 {
            return Err(Error::Backend("points per axis must be positive".into()));
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::Backend(format!("tolerance {tolerance} must be a nonnegative real")));
        }
        if mode == Mode::Numeric && tolerance <= 0.0 {
            return Err(Error::Backend("numeric mode needs a positive tolerance".into()));
        }
        Ok(Backend { mode, sample_box, points_per_axis, tolerance })
    }

    pub fn exact() -> Self {
        Backend { mode: Mode::Exact, ..Backend::numeric() }
    }

    /// `[-1, 1]ⁿ`, 9 points per axis, tolerance 1e-9.
    pub fn numeric() -> Self {
        Backend {
            mode: Mode::Numeric,
            sample_box: SampleBox::default(),
            points_per_axis: DEFAULT_POINTS,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn with_points(mut self, points_per_axis: usize) -> Self {
        self.points_per_axis = points_per_axis.max(1);
        self
    }

    /// Fails when exact mode meets a transcendental expression.
    pub fn ensure_supported<'a>(&self, exprs: impl IntoIterator<Item = &'a Expr>) -> Result<(), Error> {
        if self.mode == Mode::Exact && !exprs.into_iter().all(Expr::is_polynomial) {
            return Err(Error::NotPolynomial);
        }
        Ok(())
    }

    /// Row-major list of grid points in `dim` dimensions.
    pub fn grid(&self, dim: usize) -> Result<Vec<Vec<f64>>, Error> {
        let m = self.points_per_axis;
        let mut ticks = Vec::with_capacity(dim);
        for axis in 0..dim {
            let (lo, hi) = self.sample_box.axis(axis)?;
            let t: Vec<f64> = if m == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                (0..m).map(|k| lo + (hi - lo) * (k as f64) / ((m - 1) as f64)).collect()
            };
            ticks.push(t);
        }
        let mut points = vec![Vec::with_capacity(dim)];
        for t in &ticks {
            points = points
                .into_iter()
                .flat_map(|p| {
                    t.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(*v);
                        q
                    })
                })
                .collect();
        }
        Ok(points)
    }

    /// Largest `|e|` over the grid (NaN propagates as infinity).
    pub fn max_abs(&self, e: &Expr) -> Result<f64, Error> {
        let dim = e.max_var().map_or(0, |m| m + 1);
        let mut worst = 0.0_f64;
        for p in self.grid(dim)? {
            let v = e.eval_f64(&p).abs();
            worst = if v.is_nan() { f64::INFINITY } else { worst.max(v) };
        }
        Ok(worst)
    }

    pub fn zero_test(&self, e: &Expr) -> Result<ZeroTest, Error> {
        match self.mode {
            Mode::Exact => {
                self.ensure_supported([e])?;
                Ok(ZeroTest { zero: e.is_identically_zero(), max_abs: None })
            }
            Mode::Numeric => {
                let m = self.max_abs(e)?;
                Ok(ZeroTest { zero: m <= self.tolerance, max_abs: Some(m) })
            }
        }
    }

    pub fn is_zero(&self, e: &Expr) -> Result<bool, Error> {
        Ok(self.zero_test(e)?.zero)
    }
}
