use serde::{Deserialize, Serialize};

use super::radial::{radial_solve, Boundary, Grid1D, RadialProblem, NODES_PER_DECADE};
use crate::error::{HardyError, Result};
use crate::geometry::ConeSpec;
use crate::spectral::{alpha_minus, hardy_constant, section_eigenvalue};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaConfig {
    pub r0: f64,
    pub r1: f64,
    pub per_decade: usize,
    pub min_r_squared: f64,
}

impl Default for ZetaConfig {
    fn default() -> Self {
        Self {
            r0: 2f64.powi(-16),
            r1: 0.5,
            per_decade: NODES_PER_DECADE,
            min_r_squared: 0.999,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaVerdict {
    pub divergent: bool,
    /// Fitted `γ` in `ζ₀(r) ~ r^{-γ}`.
    pub gamma: f64,
    /// `α⁻`, the exponent the fit should recover.
    pub alpha_minus: f64,
    pub r_squared: f64,
    /// `N/γ - 1`: the exponent where the verdict changes.
    pub p_flip: f64,
}

/// Radial profile of the energy solution of `-Δζ - c r⁻² ζ = 1` on the cone
/// over `cone`, on the shell `(r0, r1)` with `ζ(r1) = 0`.
pub fn zeta0_profile(n: usize, c: f64, cone: &ConeSpec, cfg: &ZetaConfig) -> Result<Grid1D> {
    let lambda1 = section_eigenvalue(n, cone)?;
    let mu = hardy_constant(n, lambda1);
    if !(c > lambda1 && c <= mu) {
        return Err(HardyError::Precondition(format!(
            "need λ₁ < c ≤ μ, got λ₁ = {lambda1}, c = {c}, μ = {mu}"
        )));
    }
    let problem = RadialProblem::new(n, lambda1, c, cfg.r0, cfg.r1)?
        .with_rhs(|_| 1.0)
        .with_boundary(Boundary::Decaying, Boundary::Dirichlet(0.0));
    radial_solve(&problem, cfg.per_decade)
}

/// Least-squares slope of `ln ζ` against `ln r` over `[r0, 10 r0]`.
pub fn fit_growth(profile: &Grid1D, r0: f64) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = profile
        .radii()
        .iter()
        .zip(&profile.values)
        .filter(|(r, v)| **r <= 10.0 * r0 * (1.0 + 1e-12) && **v > 0.0)
        .map(|(r, v)| (r.ln(), v.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(HardyError::Fit("fewer than three positive samples in the last decade".into()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pts {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok((-slope, r2))
}

/// Divergence of `∫ ζ₀^{p+1}` near the vertex, decided from the fitted
/// growth exponent: divergent iff `γ(p+1) ≥ N`.
pub fn zeta0_divergence(n: usize, c: f64, p: f64, cone: &ConeSpec) -> Result<ZetaVerdict> {
    zeta0_divergence_with(n, c, p, cone, &ZetaConfig::default())
}

pub fn zeta0_divergence_with(n: usize, c: f64, p: f64, cone: &ConeSpec, cfg: &ZetaConfig) -> Result<ZetaVerdict> {
    let profile = zeta0_profile(n, c, cone, cfg)?;
    let (gamma, r2) = fit_growth(&profile, cfg.r0)?;
    if r2 < cfg.min_r_squared {
        return Err(HardyError::Fit(format!(
            "log-log fit has R² = {r2} below {}",
            cfg.min_r_squared
        )));
    }
    let lambda1 = section_eigenvalue(n, cone)?;
    Ok(ZetaVerdict {
        divergent: gamma * (p + 1.0) >= n as f64,
        gamma,
        alpha_minus: alpha_minus(n, c, lambda1)?,
        r_squared: r2,
        p_flip: n as f64 / gamma - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_regime() {
        assert!(matches!(
            zeta0_divergence(3, 0.0, 3.0, &ConeSpec::hemisphere()),
            Err(HardyError::Precondition(_))
        ));
    }

    #[test]
    fn critical_growth() {
        let cfg = ZetaConfig {
            per_decade: 512,
            ..Default::default()
        };
        let v = zeta0_divergence_with(3, 2.25, 5.0, &ConeSpec::hemisphere(), &cfg).unwrap();
        assert!((v.gamma - 0.5).abs() < 1e-3, "{v:?}");
        assert!(v.divergent);
        let v = zeta0_divergence_with(3, 2.25, 4.9, &ConeSpec::hemisphere(), &cfg).unwrap();
        assert!(!v.divergent);
    }
}
