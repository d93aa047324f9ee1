use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::geometry::TubeSpec;
use crate::quad::GaussLegendre;

/// Value and derivative of a one-variable profile. Profiles with
/// `log_scale` return the logarithmic derivative `x f'(x)` instead.
pub type ProfileFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;

/// Compactly supported profile on `support`, integrated in `ln x` when
/// `log_scale` is set.
#[derive(Clone)]
pub struct Profile1D {
    pub f: ProfileFn,
    pub support: (f64, f64),
    pub log_scale: bool,
}

impl fmt::Debug for Profile1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile1D")
            .field("support", &self.support)
            .field("log_scale", &self.log_scale)
            .finish_non_exhaustive()
    }
}

fn bump_core(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step from 0 at `x ≤ 0` to 1 at `x ≥ 1`, with its derivative.
fn smooth_step(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let (a, b) = (bump_core(x), bump_core(1.0 - x));
    let (da, db) = (a / (x * x), -b / ((1.0 - x) * (1.0 - x)));
    let s = a + b;
    (a / s, (da * s - a * (da + db)) / (s * s))
}

impl Profile1D {
    /// `exp(-1/(1 - u²))` with `u` mapping `support` onto `(-1, 1)`.
    pub fn bump(lo: f64, hi: f64) -> Self {
        let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        Self {
            f: Arc::new(move |x| {
                let u = (x - mid) / half;
                if u.abs() >= 1.0 {
                    return (0.0, 0.0);
                }
                let d = 1.0 - u * u;
                let v = (-1.0 / d).exp();
                (v, v * (-2.0 * u / (d * d)) / half)
            }),
            support: (lo, hi),
            log_scale: false,
        }
    }

    /// `ρ^{exponent}` cut off smoothly on `[inner, 2·inner]` and `[1/2, 1]`.
    pub fn power_with_cutoffs(exponent: f64, inner: f64) -> Self {
        let l2 = std::f64::consts::LN_2;
        let mid = inner.sqrt();
        Self {
            f: Arc::new(move |r: f64| {
                let (ci, dci) = smooth_step((r / inner).ln() / l2);
                let (co, dco) = smooth_step(2.0 * (1.0 - r));
                let p = (r / mid).powf(exponent);
                let v = p * ci * co;
                let rdv = exponent * v + p * (dci / l2) * co - 2.0 * r * p * ci * dco;
                (v, rdv)
            }),
            support: (inner, 1.0),
            log_scale: true,
        }
    }

    pub fn value(&self, x: f64) -> (f64, f64) {
        (self.f)(x)
    }

    /// `(x, weight, f, x f')` at composite Gauss nodes over the support.
    pub(crate) fn nodes_scaled(&self, gl: &GaussLegendre) -> Vec<(f64, f64, f64, f64)> {
        let (lo, hi) = self.support;
        let (a, b, panels) = if self.log_scale {
            let (a, b) = (lo.ln(), hi.ln());
            (a, b, (((b - a) / 0.05).ceil() as usize).max(8))
        } else {
            (lo, hi, 64)
        };
        let width = (b - a) / panels as f64;
        let mut out = Vec::new();
        for p in 0..panels {
            let (pa, pb) = (a + width * p as f64, a + width * (p + 1) as f64);
            for (x, w) in gl.nodes_on(pa, pb) {
                if self.log_scale {
                    let pt = x.exp();
                    let (v, xdv) = self.value(pt);
                    out.push((pt, w * pt, v, xdv));
                } else {
                    let (v, dv) = self.value(x);
                    out.push((x, w, v, x * dv));
                }
            }
        }
        out
    }

    /// `(x, weight, f, f')` at composite Gauss nodes over the support.
    pub(crate) fn nodes(&self, gl: &GaussLegendre) -> Vec<(f64, f64, f64, f64)> {
        if self.log_scale {
            return self.nodes_scaled(gl).into_iter().map(|(x, w, v, xdv)| (x, w, v, xdv / x)).collect();
        }
        let (lo, hi) = self.support;
        let width = (hi - lo) / 64.0;
        let mut out = Vec::new();
        for p in 0..64 {
            let (pa, pb) = (lo + width * p as f64, lo + width * (p + 1) as f64);
            for (x, w) in gl.nodes_on(pa, pb) {
                let (v, dv) = self.value(x);
                out.push((x, w, v, dv));
            }
        }
        out
    }
}

/// `w(ỹ, ȳ) = A(|ỹ|) B(ȳ)` with `ỹ` normal and `ȳ` the arclength along `Γ`.
#[derive(Debug, Clone)]
pub struct ProductProfile {
    pub radial: Profile1D,
    pub axial: Profile1D,
}

impl ProductProfile {
    /// Radial bump on `[0.5, 1]` times an axial bump on `[-1, 1]`.
    pub fn bump() -> Self {
        Self {
            radial: Profile1D::bump(0.5, 1.0),
            axial: Profile1D::bump(-1.0, 1.0),
        }
    }

    /// `|ỹ|^{-(n-2)/2 + 1/m}` with cutoffs at `e^{-2m}` and `1`, for normal
    /// dimension `n`.
    pub fn hardy_family(normal_dim: usize, m: f64) -> Self {
        let e = -0.5 * (normal_dim as f64 - 2.0) + 1.0 / m;
        Self {
            radial: Profile1D::power_with_cutoffs(e, (-2.0 * m).exp()),
            axial: Profile1D::bump(-1.0, 1.0),
        }
    }
}

/// `∫|∇w|² / ∫|ỹ|⁻² w²` over `ℝ^n × ℝ`.
pub fn flat_quotient(normal_dim: usize, w: &ProductProfile) -> f64 {
    let gl = GaussLegendre::new(16);
    let n = normal_dim as i32;
    let (mut a_grad, mut a_l2, mut a_hardy) = (0.0, 0.0, 0.0);
    for (r, wt, v, rdv) in w.radial.nodes_scaled(&gl) {
        let base = wt * r.powi(n - 3);
        a_grad += base * rdv * rdv;
        a_l2 += base * (v * r).powi(2);
        a_hardy += base * v * v;
    }
    let ax = w.axial.nodes(&gl);
    let b_l2: f64 = ax.iter().map(|(_, wt, v, _)| wt * v * v).sum();
    let b_grad: f64 = ax.iter().map(|(_, wt, _, d)| wt * d * d).sum();
    (a_grad * b_l2 + a_l2 * b_grad) / (a_hardy * b_l2)
}

/// Quotient of `∫|∇φ_ε|²` over `∫(q + C₀ δ^{2√(1-q)}) δ⁻² φ_ε²` for the
/// rescaled profile `φ_ε = ε^{(2-N)/2} w(ε⁻¹ Y⁻¹(x))` centred at `φ = 0` on
/// the circle, one value per `ε`.
pub fn scaled_test_quotient(tube: &TubeSpec, w: &ProductProfile, c0: f64, epsilons: &[f64]) -> Result<Vec<f64>> {
    tube.require_circle()?;
    let n = tube.dimension - tube.k;
    let rr = tube.circle_radius;
    let gl = GaussLegendre::new(16);
    let ni = n as i32;
    let rad = w.radial.nodes_scaled(&gl);
    let ax = w.axial.nodes(&gl);
    let b_l2: f64 = ax.iter().map(|(_, wt, v, _)| wt * v * v).sum();
    let b_grad: f64 = ax.iter().map(|(_, wt, _, d)| wt * d * d).sum();
    let a_grad: f64 = rad.iter().map(|(r, wt, _, rdv)| wt * rdv * rdv * r.powi(ni - 3)).sum();
    let (_, rho_max) = w.radial.support;
    let sig_max = w.axial.support.0.abs().max(w.axial.support.1.abs());
    // polar-angle rule for averages over S^{n-1}
    let psi_nodes: Vec<(f64, f64)> = GaussLegendre::new(32).nodes_on(0.0, PI);
    let norm: f64 = psi_nodes.iter().map(|(p, wt)| wt * p.sin().powi(ni - 2)).sum();
    epsilons
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) || eps * rho_max >= tube.beta || eps * sig_max >= PI * rr {
                return domain(format!("ε = {eps} pushes the support out of the tube chart"));
            }
            let avg_inv = |t: f64| {
                psi_nodes
                    .iter()
                    .map(|(p, wt)| wt * p.sin().powi(ni - 2) / (1.0 + t * p.cos()))
                    .sum::<f64>()
                    / norm
            };
            let a_l2_curved: f64 = rad
                .iter()
                .map(|(r, wt, v, _)| wt * (v * r).powi(2) * r.powi(ni - 3) * avg_inv(eps * r / rr))
                .sum();
            let num = a_grad * b_l2 + a_l2_curved * b_grad;
            let mut den = 0.0;
            for (s, ws, bv, _) in &ax {
                let q = tube.weight.eval(eps * s / rr);
                let gap = tube.weight.deficit(eps * s / rr).max(0.0).sqrt();
                let inner: f64 = rad
                    .iter()
                    .map(|(r, wt, v, _)| {
                        let extra = if c0 == 0.0 { 0.0 } else { c0 * (eps * r).powf(2.0 * gap) };
                        wt * v * v * r.powi(ni - 3) * (q + extra)
                    })
                    .sum();
                den += ws * bv * bv * inner;
            }
            Ok(num / den)
        })
        .collect()
}
