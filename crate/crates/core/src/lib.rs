//! Dirac structures `L_B` on a coordinate chart of ℝⁿ built from orthogonal
//! automorphism matrices with function entries, and two independent
//! integrability tests for them.
//!
//! Modules, bottom-up:
//! - [`expr`]: symbolic scalar functions (parse, normalize, differentiate, evaluate)
//! - [`backend`]: exact and grid-sampled zero tests
//! - [`exterior`]: vector fields, 1-forms, 2-forms and the operations between them
//! - [`dirac`]: automorphism matrices, generators of `L_B`, Courant bracket, integrability
//! - [`topology`]: θ-coordinates, the sup-norm, the connecting path, component labels

pub mod backend;
pub mod dirac;
pub mod error;
pub mod expr;
pub mod exterior;
pub mod topology;

pub use backend::{Backend, Mode, SampleBox, ZeroTest, DEFAULT_POINTS, DEFAULT_TOLERANCE};
pub use dirac::{
    build_generators, check_integrable_direct, check_isotropy, check_rank, check_tau_complementarity, courant_bracket,
    cross_check, is_orthogonal, isotropy_residuals, membership, min_sampled_rank, pde_residual, recover_automorphism,
    tau_residuals, AutMatrix, CrossCheck, DiracGenerators, ExtendedPairs, IntegrabilityVerdict, MembershipCheck,
    Method, PairResidual, Recovered, Residual, TestField,
};
pub use error::Error;
pub use expr::{default_names, Chart, Expr, ParseError, ParseErrorKind};
pub use exterior::{
    contract, exterior_derivative, inner_product, lie_bracket, pairing_plus, OneForm, TwoForm, VectorField,
};
pub use topology::{
    classify_component, connect_path, sample_path, sup_norm, sup_norm_profile, theta_map, ComponentLabel, PathSample,
    SupNorm, ThetaCoordinates,
};
