use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::flat::x_power;
use super::report::{AnalyticStage, ResidualReport, Verdict};
use crate::error::{domain, Result};
use crate::geometry::{fd_laplacian, tube_distance_projection, TubeSpec, TubeWeight};
use crate::quad::{sphere_area, tanh_sinh, GaussLegendre};

/// `θ`-family barrier `ω_a = δ^{-α_q} X_a(δ)` on a tube.
#[derive(Debug, Clone)]
pub struct TubeBarrierSpec {
    pub tube: TubeSpec,
    pub a: f64,
}

impl TubeBarrierSpec {
    pub fn new(tube: TubeSpec, a: f64) -> Self {
        Self { tube, a }
    }
}

/// Tube point given by the angle on `Γ`, the distance `delta` and the angle
/// `psi` of the normal offset between the in-plane radial direction and `x³`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeSample {
    pub phi: f64,
    pub delta: f64,
    pub psi: f64,
}

impl TubeSample {
    pub fn new(phi: f64, delta: f64, psi: f64) -> Self {
        Self { phi, delta, psi }
    }

    pub fn point(&self, tube: &TubeSpec) -> Vec<f64> {
        let mut off = vec![0.0; tube.dimension - 1];
        off[0] = self.delta * self.psi.cos();
        off[1] = self.delta * self.psi.sin();
        tube.point(self.phi, &off)
    }
}

/// `α_q` from `δ` and the weight deficit `1 - q(σ)`.
fn alpha_from(tube: &TubeSpec, delta: f64, deficit: f64) -> Result<f64> {
    let inner = deficit + delta;
    if inner < 0.0 {
        return domain(format!(
            "1 - q(σ) + δ = {inner} is negative: q exceeds its normalization"
        ));
    }
    let a = tube.half_codim_gap();
    Ok(a - a * inner.sqrt())
}

/// `α_q(x) = (N-k-2)/2 - √α̃(x)`.
pub fn tube_alpha(tube: &TubeSpec, x: &[f64]) -> Result<f64> {
    let (delta, phi) = tube_distance_projection(tube, x)?;
    alpha_from(tube, delta, tube.weight.deficit(phi))
}

/// `sup α_q` over the tube, attained as `δ → 0` at the maximum of `q`.
pub fn tube_alpha_sup(tube: &TubeSpec) -> f64 {
    let a = tube.half_codim_gap();
    a * (1.0 - (1.0 - tube.weight.max_value()).max(0.0).sqrt())
}

fn log_barrier(spec: &TubeBarrierSpec, x: &[f64]) -> Result<f64> {
    let (delta, phi) = tube_distance_projection(&spec.tube, x)?;
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("δ = {delta} must lie in (0, 1)"));
    }
    let alpha = alpha_from(&spec.tube, delta, spec.tube.weight.deficit(phi))?;
    Ok(-alpha * delta.ln() + spec.a * (-delta.ln()).ln())
}

/// `ω_a(x) = δ(x)^{-α(x)} X_a(δ(x))`.
pub fn tube_barrier(spec: &TubeBarrierSpec, x: &[f64]) -> Result<f64> {
    Ok(log_barrier(spec, x)?.exp())
}

/// `(Δω_a)/ω_a` by Richardson-extrapolated central differences.
fn laplacian_over_barrier(spec: &TubeBarrierSpec, x: &[f64], h: f64) -> Result<f64> {
    let l0 = log_barrier(spec, x)?;
    let field = |p: &[f64]| Ok((log_barrier(spec, p)? - l0).exp());
    let coarse = fd_laplacian(field, x, h)?;
    let fine = fd_laplacian(field, x, 0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Left side of the tube residual bound divided by `ω_a`, returned with the
/// part carried by the logarithmic terms.
pub fn lemma43_lhs(spec: &TubeBarrierSpec, x: &[f64], h: f64) -> Result<(f64, f64)> {
    let tube = &spec.tube;
    let (delta, phi) = tube_distance_projection(tube, x)?;
    let q = tube.weight.eval(phi);
    let a = spec.a;
    let gap = tube.half_codim_gap();
    let root = gap * (tube.weight.deficit(phi) + delta).max(0.0).sqrt();
    let d2 = delta * delta;
    let lq = -laplacian_over_barrier(spec, x, h)? - gap * gap * q / d2;
    let log_terms = if a == 0.0 {
        0.0
    } else {
        -2.0 * a * root * x_power(-1.0, delta)? / d2 + a * (a - 1.0) * x_power(-2.0, delta)? / d2
    };
    Ok((lq + log_terms, log_terms))
}

/// Bounded-ratio check of the tube residual estimate.
///
/// `fd` is `L_q ω_a / ω_a`, `closed_form` the logarithmic terms over `ω_a`,
/// and `ratios` the left side over `|log δ| δ^{-3/2} ω_a`. The report passes
/// when `max/min` of the ratios stays within `tolerance` (default 10) and the
/// samples span at least three decades in `δ`; `max_relative_mismatch` holds
/// that spread.
pub fn verify_lemma43(spec: &TubeBarrierSpec, samples: &[TubeSample], h_rel: f64) -> Result<ResidualReport> {
    spec.tube.require_circle()?;
    let mut rep = ResidualReport::new("lemma43", 10.0);
    let (mut dmin, mut dmax) = (f64::INFINITY, 0.0f64);
    for s in samples {
        if !(s.delta > 0.0 && s.delta < spec.tube.beta) {
            return domain(format!("sample δ = {} lies outside the tube", s.delta));
        }
        let x = s.point(&spec.tube);
        let h = h_rel * s.delta;
        let (lhs, logs) = lemma43_lhs(spec, &x, h)?;
        let scale = (-s.delta.ln()) * s.delta.powf(-1.5);
        dmin = dmin.min(s.delta);
        dmax = dmax.max(s.delta);
        rep.points.push(x);
        rep.fd.push(lhs - logs);
        rep.closed_form.push(logs);
        rep.ratios.push(lhs / scale);
        rep.h_values.push(h);
    }
    rep.max_relative_mismatch = rep.ratio_spread();
    let spans = dmax / dmin >= 1e3 * (1.0 - 1e-12);
    rep.verdict = Verdict::from_bool(
        !samples.is_empty() && spans && rep.max_relative_mismatch <= rep.tolerance,
    );
    Ok(rep)
}

/// Certificate for `u = ω₀ - ω_{-1}` on `Γ_β`.
///
/// The analytic stage is the sign of `-2 + (p-1) sup α`. The numeric stage
/// evaluates the logarithm of `δ^{-2+(p-1)α} X_{-5}(δ) (1 - X_{-1}(δ))^{1-p}`
/// (`ratios`, must be `≥ 0`) together with the exponent `-2 + (p-1)α`
/// (`closed_form`). Samples with `δ ≥ e^{-1}` fail because `u` vanishes or
/// changes sign there; samples with `δ ≥ beta` are ignored. The threshold is
/// the largest sampled `δ` below which everything passes.
pub fn certify_prop44(tube: &TubeSpec, p: f64, beta: f64, samples: &[TubeSample]) -> Result<ResidualReport> {
    if !(p >= 1.0) {
        return domain(format!("exponent p = {p} must be at least 1"));
    }
    if !(beta > 0.0) {
        return domain("tube radius β must be positive");
    }
    let sup = tube_alpha_sup(tube);
    let exponent = -2.0 + (p - 1.0) * sup;
    let analytic = AnalyticStage {
        exponent,
        pass: p < 1.0 + 2.0 / sup,
    };
    let mut rep = ResidualReport::new("prop44", 0.0);
    rep.analytic = Some(analytic);
    let mut rows: Vec<(f64, bool, f64)> = Vec::new();
    for s in samples.iter().filter(|s| s.delta > 0.0 && s.delta < beta) {
        let alpha = alpha_from(tube, s.delta, tube.weight.deficit(s.phi))?;
        let e = -2.0 + (p - 1.0) * alpha;
        let l = -s.delta.ln();
        let log_lhs = if l <= 1.0 {
            f64::NEG_INFINITY
        } else {
            -e * l - 5.0 * l.ln() + (1.0 - p) * (1.0 - 1.0 / l).ln()
        };
        let ok = log_lhs >= -rep.tolerance;
        rows.push((s.delta, ok, log_lhs));
        rep.points.push(vec![s.phi, s.delta, s.psi]);
        rep.closed_form.push(e);
        rep.ratios.push(log_lhs);
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut threshold = None;
    let mut worst = 0.0f64;
    for &(d, ok, v) in &rows {
        if !ok {
            break;
        }
        worst = worst.max(-v);
        threshold = Some(d);
    }
    if threshold.is_none() {
        worst = rows.iter().map(|r| -r.2).fold(0.0, f64::max);
    }
    rep.max_relative_mismatch = worst.max(0.0);
    rep.threshold = threshold;
    rep.verdict = Verdict::from_bool(analytic.pass && threshold.is_some());
    Ok(rep)
}

/// Value of `∫_Γ (1 - q)^{-1/2} dσ`, or where and at which order it blows up.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaIntegral {
    Finite { value: f64 },
    /// `1 - q ~ κ|φ - at|^order` with `order ≥ 2` (`0` for `q ≡ 1`).
    Divergent { at: f64, order: f64 },
}

impl GammaIntegral {
    pub fn is_divergent(&self) -> bool {
        matches!(self, GammaIntegral::Divergent { .. })
    }
}

const SCAN: usize = 4096;

fn deficit_zeros(weight: &TubeWeight) -> Vec<f64> {
    let mut zeros = weight.max_points();
    let d = |i: usize| weight.deficit(2.0 * PI * (i % SCAN) as f64 / SCAN as f64);
    for i in 0..SCAN {
        let (l, m, r) = (d(i + SCAN - 1), d(i), d(i + 1));
        if m.abs() <= 1e-12 && m <= l && m <= r {
            let phi = 2.0 * PI * i as f64 / SCAN as f64;
            if !zeros.iter().any(|z| (z - phi).abs() < 1e-9) {
                zeros.push(phi);
            }
        }
    }
    zeros.sort_by(f64::total_cmp);
    zeros
}

fn local_order(weight: &TubeWeight, at: f64) -> f64 {
    let (e1, e2) = (1e-3f64, 1e-4f64);
    [1.0, -1.0]
        .iter()
        .map(|&side| {
            let d1 = weight.deficit(at + side * e1);
            let d2 = weight.deficit(at + side * e2);
            (d1 / d2).ln() / (e1 / e2).ln()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `∫_Γ (1 - q(σ))^{-1/2} dσ` over the circle, in arclength.
pub fn gamma_weight_integral(tube: &TubeSpec) -> Result<GammaIntegral> {
    tube.require_circle()?;
    let w = &tube.weight;
    let rr = tube.circle_radius;
    if (0..SCAN).any(|i| w.deficit(2.0 * PI * i as f64 / SCAN as f64) < -1e-12) {
        return domain("weight exceeds 1 on Γ");
    }
    if let TubeWeight::Constant(v) = w {
        return Ok(if *v >= 1.0 {
            GammaIntegral::Divergent { at: 0.0, order: 0.0 }
        } else {
            GammaIntegral::Finite {
                value: 2.0 * PI * rr / (1.0 - v).sqrt(),
            }
        });
    }
    let zeros = deficit_zeros(w);
    for &z in &zeros {
        let m = local_order(w, z);
        if m > 2.0 - 1e-3 {
            return Ok(GammaIntegral::Divergent { at: z, order: m });
        }
    }
    if zeros.is_empty() {
        // periodic and smooth: the trapezoid rule converges spectrally
        let m = 8192;
        let s: f64 = (0..m)
            .map(|i| w.deficit(2.0 * PI * i as f64 / m as f64).powf(-0.5))
            .sum();
        return Ok(GammaIntegral::Finite {
            value: rr * 2.0 * PI * s / m as f64,
        });
    }
    let mut total = 0.0;
    for (i, &z) in zeros.iter().enumerate() {
        let next = if i + 1 < zeros.len() { zeros[i + 1] } else { zeros[0] + 2.0 * PI };
        total += tanh_sinh(z, next, 1e-10, |_, da, db| {
            let phi = if da < db { z + da } else { next - db };
            w.deficit(phi).powf(-0.5)
        });
    }
    Ok(GammaIntegral::Finite { value: rr * total })
}

/// Dirichlet energy `∫_{Γ_β} |∇θ_a|²` of `θ_a = ω₀ + ω_a` over a circle tube.
///
/// `θ_a` depends on `(φ, δ)` only, so the normal sphere is integrated out in
/// closed form (`|∂_δθ|²` term) and by Gauss–Legendre in the polar angle
/// (`|∂_φθ|²` term). The radial integral runs in `u = -ln δ`, scaled by the
/// local decay rate `2√α̃`.
pub fn theta_energy(spec: &TubeBarrierSpec) -> Result<f64> {
    let tube = &spec.tube;
    tube.require_circle()?;
    if tube.beta >= 1.0 {
        return domain("energy needs β < 1");
    }
    let n = tube.dimension - 1;
    let gap = tube.half_codim_gap();
    let rr = tube.circle_radius;
    let beta = tube.beta;
    let a = spec.a;
    let gl = GaussLegendre::new(16);
    // |S^{n-2}| ∫ f(cos ψ) sin^{n-2}ψ dψ
    let s_lower = sphere_area(n - 1);
    let inv_rho = |delta: f64| {
        s_lower
            * gl.composite(0.0, PI, 4, |psi| psi.sin().powi(n as i32 - 2) / (rr + delta * psi.cos()))
    };
    let w1 = rr * sphere_area(n);
    let w = &tube.weight;
    let eta = 1e-6;
    let radial = |phi: f64, d: f64| -> f64 {
        let dp = (w.deficit(phi + eta) - w.deficit(phi - eta)) / (2.0 * eta);
        let u0 = -beta.ln();
        let rate = 2.0 * gap * (d + beta).sqrt().min(d.sqrt().max(1e-300)).max(1e-300);
        let span = 60.0 / rate + 40.0;
        gl.composite(0.0, span, 64, |v| {
            let u = u0 + v;
            let delta = (-u).exp();
            let inner = d + delta;
            let sq = inner.sqrt();
            let alpha = gap - gap * sq;
            let xa = u.powf(a);
            // δ ∂_δ ln θ and ∂_φ ln θ
            let dd = gap * delta / (2.0 * sq) * u - alpha - a * u.powf(a - 1.0) / (1.0 + xa);
            let dphi = gap * dp / (2.0 * sq) * u;
            // θ² δ^{n-3} dδ = exp(2αu + 2 ln(1 + X_a) - (n - 2) u) du
            let jac = (2.0 * alpha * u + 2.0 * (1.0 + xa).ln() - (n as f64 - 2.0) * u).exp();
            jac * (dd * dd * w1 + delta * delta * dphi * dphi * inv_rho(delta))
        })
    };
    let zeros = deficit_zeros(w);
    let phi_integral = if zeros.is_empty() {
        let m = 256;
        (0..m)
            .map(|i| {
                let phi = 2.0 * PI * i as f64 / m as f64;
                radial(phi, w.deficit(phi))
            })
            .sum::<f64>()
            * 2.0
            * PI
            / m as f64
    } else {
        let mut total = 0.0;
        for (i, &z) in zeros.iter().enumerate() {
            let next = if i + 1 < zeros.len() { zeros[i + 1] } else { zeros[0] + 2.0 * PI };
            total += tanh_sinh(z, next, 1e-6, |_, da, db| {
                let phi = if da < db { z + da } else { next - db };
                radial(phi, w.deficit(phi))
            });
        }
        total
    };
    Ok(phi_integral)
}
