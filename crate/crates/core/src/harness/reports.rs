use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ParamRange;
use crate::error::Result;
use crate::geometry::ConeSpec;
use crate::solver::{rayleigh_min, Grid1D, PotentialField, RayleighWeight};
use crate::spectral::{cap_eigenvalue, hardy_constant, section_eigenvalue, AngularWeight};

/// `(θ₀, λ₁)` over the cap angles of `theta0`.
pub fn eigen_curve(n: usize, theta0: &ParamRange, v: Option<&AngularWeight>) -> Result<Vec<(f64, f64)>> {
    theta0.validate("theta0")?;
    theta0
        .values()
        .into_par_iter()
        .map(|t| cap_eigenvalue(n, t, v).map(|l| (t, l)))
        .collect()
}

/// Which quotient a Hardy check minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HardyWeight {
    /// `∫|∇φ|² / ∫r⁻²φ²`, converging to `μ`.
    Hardy,
    /// `(∫|∇φ|² - μ∫r⁻²φ²) / ∫X₋₂(r)r⁻²φ²`, which stays positive.
    Improved,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyRow {
    pub r0: f64,
    /// `ln(r1/r0)`.
    pub log_width: f64,
    pub value: f64,
    /// Extrapolation `v(L) ≈ limit + C/L²` from this row and the previous one.
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyTable {
    pub n: usize,
    pub lambda1: f64,
    pub mu: f64,
    pub weight: HardyWeight,
    pub r1: f64,
    pub per_decade: usize,
    pub rows: Vec<HardyRow>,
}

impl HardyTable {
    /// Values decrease as the shell widens.
    pub fn monotone_from_above(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].value <= w[0].value)
            && self.rows.iter().all(|r| match self.weight {
                HardyWeight::Hardy => r.value >= self.mu,
                HardyWeight::Improved => true,
            })
    }

    pub fn limit(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.extrapolated)
    }

    pub fn to_text(&self) -> String {
        let target = match self.weight {
            HardyWeight::Hardy => format!("mu = {:.12}", self.mu),
            HardyWeight::Improved => "positive margin".to_string(),
        };
        let mut s = format!(
            "N = {}  lambda1 = {:.12}  {}  ({} nodes/decade, r1 = {})\n{:>14} {:>12} {:>20} {:>20}\n",
            self.n, self.lambda1, target, self.per_decade, self.r1, "r0", "log width", "rayleigh_min", "extrapolated"
        );
        for r in &self.rows {
            let ext = r.extrapolated.map(|e| format!("{e:.14}")).unwrap_or_default();
            s.push_str(&format!("{:>14.6e} {:>12.6} {:>20.14} {:>20}\n", r.r0, r.log_width, r.value, ext));
        }
        s
    }
}

/// Discrete Rayleigh minima on the shells `(2^{-j}, r1)` for `j` in `shells`.
pub fn hardy_check(
    n: usize,
    cone: &ConeSpec,
    weight: HardyWeight,
    shells: &[u32],
    r1: f64,
    per_decade: usize,
) -> Result<HardyTable> {
    let lambda1 = section_eigenvalue(n, cone)?;
    let mu = hardy_constant(n, lambda1);
    let (potential, w) = match weight {
        HardyWeight::Hardy => (PotentialField::zero(), RayleighWeight::InverseSquare),
        HardyWeight::Improved => (PotentialField::inverse_square(mu), RayleighWeight::LogInverseSquare),
    };
    let mut shells = shells.to_vec();
    shells.sort_unstable();
    let values: Vec<(f64, f64, f64)> = shells
        .par_iter()
        .map(|&j| {
            let r0 = 0.5f64.powi(j as i32);
            let grid = Grid1D::log_shell(r0, r1, per_decade)?;
            let v = rayleigh_min(n, lambda1, &potential, &grid, w)?;
            Ok((r0, (r1 / r0).ln(), v))
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<HardyRow> = Vec::with_capacity(values.len());
    for (i, &(r0, l, v)) in values.iter().enumerate() {
        let extrapolated = match (weight, i.checked_sub(1).map(|k| values[k])) {
            (HardyWeight::Hardy, Some((_, l0, v0))) => Some((l * l * v - l0 * l0 * v0) / (l * l - l0 * l0)),
            _ => None,
        };
        rows.push(HardyRow {
            r0,
            log_width: l,
            value: v,
            extrapolated,
        });
    }
    Ok(HardyTable {
        n,
        lambda1,
        mu,
        weight,
        r1,
        per_decade,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hemisphere_point_on_curve() {
        let r = ParamRange::new(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, 1).unwrap();
        let c = eigen_curve(3, &r, None).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].1 - 2.0).abs() < 1e-8);
    }

    #[test]
    fn punctured_ball_table() {
        let t = hardy_check(3, &ConeSpec::FullSphere, HardyWeight::Hardy, &[4, 6, 8], 0.5, 256).unwrap();
        assert!(t.monotone_from_above());
        assert!((t.limit().unwrap() - 0.25).abs() < 5e-3, "{t:?}");
    }
}
