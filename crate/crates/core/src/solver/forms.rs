use serde::{Deserialize, Serialize};

use super::iteration::PotentialField;
use super::radial::Grid1D;
use crate::barriers::x_power;
use crate::error::{HardyError, Result};
use crate::linalg::{min_generalized_eigenvalue, SymTridiagonal};

/// Separated form `∫ (φ_r² + λ r⁻² φ² - b φ²) r^{N-1} dr` of a test
/// function vanishing at both ends, evaluated as the discrete form of the
/// solver in the variable `ψ = r^{(N-2)/2} φ`.
pub fn quadratic_form(n: usize, lambda: f64, potential: &PotentialField, phi: &Grid1D) -> Result<f64> {
    phi.check_uniform()?;
    let scale = phi.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ends = phi.values[0].abs().max(phi.values[phi.len() - 1].abs());
    if ends > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(HardyError::Precondition(
            "test function must vanish at both ends of the shell".into(),
        ));
    }
    let psi = phi.psi(n);
    let h = phi.spacing();
    let g = 0.5 * (n as f64 - 2.0);
    let m0 = g * g + lambda;
    let kinetic: f64 = psi.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h;
    let radii = phi.radii();
    let potential_part: f64 = psi[1..psi.len() - 1]
        .iter()
        .zip(&radii[1..])
        .map(|(p, &r)| (m0 - r * r * potential.eval(r)) * p * p)
        .sum::<f64>()
        * h;
    Ok(kinetic + potential_part)
}

/// Weight of the `L²` norm in the Rayleigh quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayleighWeight {
    /// `r⁻²`: the Hardy quotient.
    InverseSquare,
    /// `X_{-2}(r) r⁻²`: the logarithmic remainder.
    LogInverseSquare,
    /// `1`: the plain `L²` norm.
    Unit,
}

/// Form matrix on the interior nodes of `grid`.
fn form_matrix(n: usize, lambda: f64, potential: &PotentialField, grid: &Grid1D) -> Result<(SymTridiagonal, Vec<f64>, f64)> {
    grid.check_uniform()?;
    let h = grid.spacing();
    let g = 0.5 * (n as f64 - 2.0);
    let m0 = g * g + lambda;
    let radii = grid.radii();
    let inner = &radii[1..radii.len() - 1];
    let diag = inner
        .iter()
        .map(|&r| 2.0 / h + h * (m0 - r * r * potential.eval(r)))
        .collect();
    let k = SymTridiagonal::new(diag, vec![-1.0 / h; inner.len() - 1]);
    Ok((k, inner.to_vec(), h))
}

/// Smallest discrete Rayleigh quotient of the form against the weighted
/// `L²` norm, with Dirichlet ends.
pub fn rayleigh_min(
    n: usize,
    lambda: f64,
    potential: &PotentialField,
    grid: &Grid1D,
    weight: RayleighWeight,
) -> Result<f64> {
    let (k, r, h) = form_matrix(n, lambda, potential, grid)?;
    let mass = r
        .iter()
        .map(|&r| match weight {
            RayleighWeight::InverseSquare => Ok(h),
            RayleighWeight::Unit => Ok(h * r * r),
            RayleighWeight::LogInverseSquare => x_power(-2.0, r)
                .map(|x| h * x)
                .map_err(|_| HardyError::Grid("logarithmic weight needs r < 1".into())),
        })
        .collect::<Result<Vec<f64>>>()?;
    min_generalized_eigenvalue(&k, &mass, 1e-13)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApVerdict {
    pub nonnegative: bool,
    pub min_eigenvalue: f64,
    /// `min (-Δu + λr⁻²u - Vu)/(r⁻² u)` over interior nodes.
    pub min_residual: f64,
}

/// Positivity of `∫|∇φ|² + λ∫r⁻²φ² - ∫Vφ²` certified by a positive discrete
/// supersolution `u` of `-Δu + λr⁻²u ≥ Vu`.
pub fn ap_check(n: usize, lambda: f64, u: &Grid1D, v: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<ApVerdict> {
    u.check_uniform()?;
    let last = u.len() - 1;
    if u.values[1..last].iter().any(|x| !(*x > 0.0)) {
        return Err(HardyError::Precondition("u must be positive at interior nodes".into()));
    }
    let psi = u.psi(n);
    let h = u.spacing();
    let g = 0.5 * (n as f64 - 2.0);
    let m0 = g * g + lambda;
    let radii = u.radii();
    let mut min_res = f64::INFINITY;
    for i in 1..last {
        let r = radii[i];
        let row = (-psi[i - 1] + 2.0 * psi[i] - psi[i + 1]) / (h * h) + (m0 - r * r * v(r)) * psi[i];
        min_res = min_res.min(row / psi[i]);
    }
    if min_res < -1e-10 {
        return Err(HardyError::Precondition(format!(
            "u is not a discrete supersolution (residual {min_res:e})"
        )));
    }
    let pot = PotentialField::new(v);
    let (k, _, h) = form_matrix(n, lambda, &pot, u)?;
    let mass = vec![h; k.len()];
    let min_eigenvalue = min_generalized_eigenvalue(&k, &mass, 1e-13)?;
    Ok(ApVerdict {
        nonnegative: min_eigenvalue >= -1e-8,
        min_eigenvalue,
        min_residual: min_res,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_function_has_zero_energy() {
        let g = Grid1D::log_shell(0.01, 1.0, 128).unwrap();
        assert_eq!(quadratic_form(3, 0.0, &PotentialField::zero(), &g).unwrap(), 0.0);
    }

    #[test]
    fn boundary_values_are_checked() {
        let g = Grid1D::log_shell(0.01, 1.0, 128).unwrap().from_fn(|_| 1.0);
        assert!(matches!(
            quadratic_form(3, 0.0, &PotentialField::zero(), &g),
            Err(HardyError::Precondition(_))
        ));
    }

    #[test]
    fn equality_case_of_ap() {
        let g = Grid1D::log_shell(1e-3, 1.0, 512).unwrap().from_fn(|r| r.powf(-0.5));
        let v = ap_check(3, 0.0, &g, |r| 0.25 / (r * r)).unwrap();
        assert!(v.nonnegative);
        let v = ap_check(3, 0.0, &g, |_| 0.0).unwrap();
        assert!(v.nonnegative && v.min_eigenvalue > 0.0);
    }

    #[test]
    fn log_weight_needs_subunit_radii() {
        let g = Grid1D::log_shell(1e-3, 1.0, 64).unwrap();
        let r = rayleigh_min(3, 0.0, &PotentialField::zero(), &g, RayleighWeight::LogInverseSquare);
        assert!(r.is_ok());
        let g = Grid1D::log_shell(1e-3, 2.0, 64).unwrap();
        assert!(matches!(
            rayleigh_min(3, 0.0, &PotentialField::zero(), &g, RayleighWeight::LogInverseSquare),
            Err(HardyError::Grid(_))
        ));
    }
}
