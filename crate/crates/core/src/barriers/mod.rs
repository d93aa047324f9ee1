//! Closed-form barrier families and the supersolution certificates built on
//! them.

mod flat;
mod report;
mod tube;

pub use flat::{
    certify_flat_barrier, certify_prop32, flat_sample_points, PROP32_RADIUS_FLOOR, omega_bar, omega_tilted, residual_flat,
    residual_pullback, x_power, BarrierSpec, PullbackResidual, SampleGrid,
};
pub use report::{AnalyticStage, ResidualReport, Verdict};
pub use tube::{
    certify_prop44, gamma_weight_integral, lemma43_lhs, theta_energy, tube_alpha, tube_alpha_sup,
    tube_barrier, verify_lemma43, GammaIntegral, TubeBarrierSpec, TubeSample,
};
