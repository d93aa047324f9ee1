//! One-dimensional solvers after separation of variables.

mod forms;
mod iteration;
mod radial;
mod scaled;
mod zeta;

pub use forms::{ap_check, quadratic_form, rayleigh_min, ApVerdict, RayleighWeight};
pub use iteration::{
    dyadic_schedule, monotone_truncated_solve, IterationConfig, IterationTrace, PotentialField,
};
pub use radial::{
    discrete_residual, ef_transform, radial_solve, radial_solve_with_potential, Boundary,
    EfCoefficients, Grid1D, RadialFn, RadialProblem, NODES_PER_DECADE,
};
pub use scaled::{flat_quotient, scaled_test_quotient, ProductProfile, Profile1D, ProfileFn};
pub use zeta::{fit_growth, zeta0_divergence, zeta0_divergence_with, zeta0_profile, ZetaConfig, ZetaVerdict};
