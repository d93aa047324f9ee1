//! First Dirichlet eigenvalues of (weighted) spherical caps, Hardy constants
//! of cones and the critical exponents built from them.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, HardyError, Result};
use crate::geometry::ConeSpec;

/// Axisymmetric potential `V(θ) ≥ 0` on a cap.
#[derive(Clone)]
pub enum AngularWeight {
    Constant(f64),
    /// Piecewise constant: `(θ_end, value)` pairs in increasing `θ_end`;
    /// the last value extends to the cap boundary.
    Piecewise(Vec<(f64, f64)>),
    Smooth {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        v_max: f64,
    },
}

impl AngularWeight {
    /// `value·χ_{θ < theta1}`: the indicator of a concentric subcap.
    pub fn subcap_indicator(theta1: f64, value: f64) -> Self {
        AngularWeight::Piecewise(vec![(theta1, value), (f64::INFINITY, 0.0)])
    }

    /// `c + amp·(cos θ)^{e}` on the hemisphere, clamped at `cos θ = 0`.
    pub fn cosine_power(c: f64, amp: f64, exponent: f64) -> Self {
        AngularWeight::Smooth {
            f: Arc::new(move |t: f64| c + amp * t.cos().max(0.0).powf(exponent)),
            v_max: c + amp.max(0.0),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            AngularWeight::Constant(v) => *v,
            AngularWeight::Piecewise(parts) => parts
                .iter()
                .find(|(end, _)| theta < *end)
                .or(parts.last())
                .map_or(0.0, |p| p.1),
            AngularWeight::Smooth { f, .. } => f(theta),
        }
    }

    pub fn v_max(&self) -> f64 {
        match self {
            AngularWeight::Constant(v) => *v,
            AngularWeight::Piecewise(parts) => {
                parts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
            }
            AngularWeight::Smooth { v_max, .. } => *v_max,
        }
    }

    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            AngularWeight::Piecewise(parts) => parts
                .iter()
                .map(|p| p.0)
                .filter(|&t| t > lo && t < hi)
                .collect(),
            _ => Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            AngularWeight::Constant(v) => v.is_finite(),
            AngularWeight::Piecewise(parts) => {
                !parts.is_empty()
                    && parts.iter().all(|p| p.1.is_finite())
                    && parts.windows(2).all(|w| w[0].0 < w[1].0)
            }
            AngularWeight::Smooth { v_max, .. } => v_max.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            domain("angular weight must be finite with increasing breakpoints")
        }
    }
}

impl fmt::Debug for AngularWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AngularWeight::Constant(v) => write!(f, "Constant({v})"),
            AngularWeight::Piecewise(p) => write!(f, "Piecewise({p:?})"),
            AngularWeight::Smooth { v_max, .. } => write!(f, "Smooth {{ v_max: {v_max} }}"),
        }
    }
}

/// Shooting parameters.
#[derive(Debug, Clone, Copy)]
pub struct ShootingConfig {
    pub start: f64,
    pub steps: usize,
    pub tol: f64,
    pub max_widenings: usize,
    pub max_bisections: usize,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            start: 1e-6,
            steps: 10_000,
            tol: 1e-10,
            // caps down to θ₀ ≈ 0.01 need λ ≈ 6e4
            max_widenings: 12,
            max_bisections: 200,
        }
    }
}

/// Precomputed RK4 coefficients on one segment, uniform in `τ = ln θ`.
struct Segment {
    h: f64,
    // per half-step node: (1 - (N-2)θcotθ, θ², V(θ))
    coef: Vec<(f64, f64, f64)>,
}

struct Shooter {
    segments: Vec<Segment>,
    theta_start: f64,
    n: f64,
    v0: f64,
}

impl Shooter {
    fn new(n: usize, theta0: f64, v: Option<&AngularWeight>, cfg: &ShootingConfig) -> Self {
        let nf = n as f64;
        let ts = cfg.start.min(0.5 * theta0);
        let mut cuts = vec![ts];
        if let Some(w) = v {
            cuts.extend(w.breakpoints(ts, theta0));
        }
        cuts.push(theta0);
        let total = theta0.ln() - ts.ln();
        let vat = |t: f64| v.map_or(0.0, |w| w.eval(t));
        let segments = cuts
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].ln(), w[1].ln());
                let m = (((b - a) / total) * cfg.steps as f64).ceil().max(8.0) as usize;
                let h = (b - a) / m as f64;
                // V is sampled strictly inside the segment so jumps never leak across
                let coef = (0..=2 * m)
                    .map(|i| {
                        let th = (a + 0.5 * h * i as f64).exp();
                        let tcot = if th < 1e-4 {
                            1.0 - th * th / 3.0
                        } else {
                            th / th.tan()
                        };
                        let vv = vat(th.clamp(w[0] * (1.0 + 1e-14), w[1] * (1.0 - 1e-14)));
                        (1.0 - (nf - 2.0) * tcot, th * th, vv)
                    })
                    .collect();
                Segment { h, coef }
            })
            .collect();
        Self {
            segments,
            theta_start: ts,
            n: nf,
            v0: vat(0.0),
        }
    }

    /// True iff `Φ_λ` stays positive on `(0, θ₀]`.
    fn stays_positive(&self, lambda: f64) -> bool {
        let big = lambda + self.v0;
        let t2 = self.theta_start * self.theta_start;
        let mut phi = 1.0 - big * t2 / (2.0 * (self.n - 1.0));
        let mut p = -big * t2 / (self.n - 1.0);
        if phi <= 0.0 {
            return false;
        }
        for seg in &self.segments {
            let h = seg.h;
            let rhs = |c: (f64, f64, f64), f: f64, q: f64| (q, q * c.0 - c.1 * (lambda + c.2) * f);
            let steps = (seg.coef.len() - 1) / 2;
            for i in 0..steps {
                let (c0, c1, c2) = (seg.coef[2 * i], seg.coef[2 * i + 1], seg.coef[2 * i + 2]);
                let k1 = rhs(c0, phi, p);
                let k2 = rhs(c1, phi + 0.5 * h * k1.0, p + 0.5 * h * k1.1);
                let k3 = rhs(c1, phi + 0.5 * h * k2.0, p + 0.5 * h * k2.1);
                let k4 = rhs(c2, phi + h * k3.0, p + h * k3.1);
                phi += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                p += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                if !(phi > 0.0) {
                    return false;
                }
            }
        }
        true
    }
}

/// First Dirichlet eigenvalue of `-Δ_{S^{N-1}} - V` on the cap of polar
/// angle `theta0`.
pub fn cap_eigenvalue(n: usize, theta0: f64, v: Option<&AngularWeight>) -> Result<f64> {
    cap_eigenvalue_with(n, theta0, v, &ShootingConfig::default())
}

pub fn cap_eigenvalue_with(
    n: usize,
    theta0: f64,
    v: Option<&AngularWeight>,
    cfg: &ShootingConfig,
) -> Result<f64> {
    if n < 3 {
        return domain(format!("dimension N = {n} must be at least 3"));
    }
    if !(theta0 > 0.0 && theta0 < PI) {
        return domain(format!("cap angle {theta0} must lie in (0, π)"));
    }
    if let Some(w) = v {
        w.validate()?;
    }
    let shooter = Shooter::new(n, theta0, v, cfg);
    let v_max = v.map_or(0.0, |w| w.v_max().max(0.0));
    let mut lo = -v_max - 1.0;
    let mut hi = 4.0 * (n * n) as f64;
    let mut widen = 0;
    while !shooter.stays_positive(lo) {
        if widen == cfg.max_widenings {
            return Err(HardyError::Search(format!("no lower bracket down to λ = {lo}")));
        }
        lo = 2.0 * lo - 1.0;
        widen += 1;
    }
    widen = 0;
    while shooter.stays_positive(hi) {
        if widen == cfg.max_widenings {
            return Err(HardyError::Search(format!(
                "no sign change of Φ(θ₀) up to λ = {hi}"
            )));
        }
        lo = lo.max(hi);
        hi *= 2.0;
        widen += 1;
    }
    for _ in 0..cfg.max_bisections {
        if hi - lo <= cfg.tol * hi.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if shooter.stays_positive(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(HardyError::Convergence(format!(
        "bisection stalled at [{lo}, {hi}]"
    )))
}

/// `λ₁` of the cone's section, exact for the hemisphere and the full sphere.
pub fn section_eigenvalue(n: usize, cone: &ConeSpec) -> Result<f64> {
    match *cone {
        ConeSpec::FullSphere => Ok(0.0),
        ConeSpec::Cap { theta0 } if theta0 == 0.5 * PI => Ok(n as f64 - 1.0),
        ConeSpec::Cap { theta0 } => cap_eigenvalue(n, theta0, None),
    }
}

/// `μ(C_Σ) = (N-2)²/4 + λ₁`.
pub fn hardy_constant(n: usize, lambda1: f64) -> f64 {
    let h = 0.5 * (n as f64 - 2.0);
    h * h + lambda1
}

/// Smaller root of `α² - (N-2)α + c - λ₁ = 0`.
pub fn alpha_minus(n: usize, c: f64, lambda1: f64) -> Result<f64> {
    let mu = hardy_constant(n, lambda1);
    if c > mu {
        return Err(HardyError::AboveHardyConstant { c, mu });
    }
    let half = 0.5 * (n as f64 - 2.0);
    let disc = (mu - c).sqrt();
    // product of the roots is c - λ₁; this form keeps the sign exact near c = λ₁
    if half + disc > 0.0 {
        Ok((c - lambda1) / (half + disc))
    } else {
        Ok(half - disc)
    }
}

/// `1 + (2 - s)/α⁻`.
pub fn critical_exponent(alpha_minus: f64, s: f64) -> Result<f64> {
    if !(alpha_minus > 0.0) {
        return domain(format!(
            "α⁻ = {alpha_minus} is not positive: c does not exceed λ₁"
        ));
    }
    if !(s < 2.0) {
        return domain(format!("weight exponent s = {s} must be below 2"));
    }
    Ok(1.0 + (2.0 - s) / alpha_minus)
}

/// `(N-k+2)/(N-k-2)` for a tube around a `k`-dimensional submanifold.
pub fn tube_critical_exponent(n: usize, k: usize) -> Result<f64> {
    if n < k + 3 {
        return domain(format!("need N - k > 2, got N = {n}, k = {k}"));
    }
    critical_exponent(0.5 * (n as f64 - k as f64 - 2.0), 0.0)
}

/// An instance of `-Δu - c|x|^{-2}u ≥ |x|^{-s}u^q` on the cone `C_Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyProblem {
    pub n: usize,
    pub c: f64,
    pub s: f64,
    pub cone: ConeSpec,
}

impl HardyProblem {
    pub fn new(n: usize, c: f64, cone: ConeSpec) -> Self {
        Self { n, c, s: 0.0, cone }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeFlags {
    pub c_above_lambda1: bool,
    pub c_at_most_mu: bool,
}

impl RegimeFlags {
    pub fn valid(&self) -> bool {
        self.c_above_lambda1 && self.c_at_most_mu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub lambda1: f64,
    pub mu: f64,
    /// `None` when `c > μ`.
    pub alpha_minus: Option<f64>,
    /// `None` outside `λ₁ < c ≤ μ`.
    pub p_critical: Option<f64>,
    pub q_critical: Option<f64>,
    pub flags: RegimeFlags,
}

pub fn exponent_report(problem: &HardyProblem) -> Result<ExponentReport> {
    if problem.n < 3 {
        return domain(format!("dimension N = {} must be at least 3", problem.n));
    }
    let lambda1 = section_eigenvalue(problem.n, &problem.cone)?;
    let mu = hardy_constant(problem.n, lambda1);
    let flags = RegimeFlags {
        c_above_lambda1: problem.c > lambda1,
        c_at_most_mu: problem.c <= mu,
    };
    let alpha = alpha_minus(problem.n, problem.c, lambda1).ok();
    let (p, q) = match alpha {
        Some(a) if flags.valid() => (
            Some(critical_exponent(a, 0.0)?),
            critical_exponent(a, problem.s).ok(),
        ),
        _ => (None, None),
    };
    Ok(ExponentReport {
        lambda1,
        mu,
        alpha_minus: alpha,
        p_critical: p,
        q_critical: q,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hemisphere_eigenvalues() {
        for n in [3, 4, 5, 7] {
            let v = cap_eigenvalue(n, 0.5 * PI, None).unwrap();
            assert!((v - (n as f64 - 1.0)).abs() < 1e-8, "N={n}: {v}");
        }
    }

    #[test]
    fn constant_weight_shifts() {
        let base = cap_eigenvalue(4, 1.0, None).unwrap();
        let w = AngularWeight::Constant(0.7);
        let shifted = cap_eigenvalue(4, 1.0, Some(&w)).unwrap();
        assert!((base - shifted - 0.7).abs() < 1e-9);
    }

    #[test]
    fn narrow_caps_need_widening() {
        // λ₁ ≈ (j₀/θ₀)² for small caps in N = 3
        let v = cap_eigenvalue(3, 0.05, None).unwrap();
        let j0 = 2.404_825_557_695_773;
        assert!((v / (j0 / 0.05f64).powi(2) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(cap_eigenvalue(2, 1.0, None).is_err());
        assert!(cap_eigenvalue(3, PI, None).is_err());
        assert!(cap_eigenvalue(3, 0.0, None).is_err());
    }

    #[test]
    fn exponent_formulas() {
        assert_eq!(hardy_constant(3, 2.0), 2.25);
        assert_eq!(hardy_constant(4, 0.0), 1.0);
        assert_eq!(hardy_constant(7, 6.0), 12.25);
        assert_eq!(alpha_minus(3, 2.25, 2.0).unwrap(), 0.5);
        assert_eq!(alpha_minus(3, 2.0, 2.0).unwrap(), 0.0);
        assert!(matches!(
            alpha_minus(3, 3.0, 2.0),
            Err(HardyError::AboveHardyConstant { .. })
        ));
        assert_eq!(critical_exponent(0.5, 0.0).unwrap(), 5.0);
        assert_eq!(critical_exponent(1.0, 0.0).unwrap(), 3.0);
        assert!(critical_exponent(0.0, 0.0).is_err());
        assert_eq!(tube_critical_exponent(5, 1).unwrap(), 3.0);
    }

    #[test]
    fn reports() {
        let r = exponent_report(&HardyProblem::new(3, 2.25, ConeSpec::hemisphere())).unwrap();
        assert_eq!(r.p_critical, Some(5.0));
        let r = exponent_report(&HardyProblem::new(4, 1.0, ConeSpec::FullSphere)).unwrap();
        assert_eq!(r.p_critical, Some(3.0));
        let r = exponent_report(&HardyProblem::new(3, 3.0, ConeSpec::hemisphere())).unwrap();
        assert!(!r.flags.c_at_most_mu && r.p_critical.is_none());
    }
}
