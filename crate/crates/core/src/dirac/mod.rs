//! Automorphism matrices, the Dirac structures `L_B` they generate, and the
//! integrability tests.

mod generators;
mod integrability;
mod matrix;
mod recover;

pub use generators::{
    build_generators, check_isotropy, check_rank, check_tau_complementarity, isotropy_residuals, membership,
    min_sampled_rank, tau_residuals, DiracGenerators,
};
pub use integrability::{
    check_integrable_direct, courant_bracket, cross_check, pde_residual, CrossCheck, ExtendedPairs,
    IntegrabilityVerdict, MembershipCheck, Method, PairResidual, TestField,
};
pub use matrix::{is_orthogonal, AutMatrix};
pub use recover::{recover_automorphism, Recovered};

use crate::backend::Backend;
use crate::error::Error;
use crate::expr::Expr;

/// Zero test of one residual, which may have several components.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub index: Vec<usize>,
    pub zero: bool,
    /// Grid maximum of the largest component; `None` in exact mode.
    pub max_abs: Option<f64>,
}

impl Residual {
    pub fn of(index: Vec<usize>, components: &[Expr], backend: &Backend) -> Result<Self, Error> {
        let mut zero = true;
        let mut max_abs: Option<f64> = None;
        for c in components {
            let t = backend.zero_test(c)?;
            zero &= t.zero;
            if let Some(m) = t.max_abs {
                max_abs = Some(max_abs.map_or(m, |cur| cur.max(m)));
            }
        }
        Ok(Residual { index, zero, max_abs })
    }
}
