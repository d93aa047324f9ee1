use serde::{Deserialize, Serialize};

use super::report::{AnalyticStage, ResidualReport, Verdict};
use crate::error::{domain, HardyError, Result};
use crate::geometry::{
    curvature_term, fd_laplacian, norm, FermiChart, Orientation,
};
use crate::spectral::alpha_minus;

/// `X_a(t) = |log t|^a` for `t ∈ (0, 1)`.
pub fn x_power(a: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return domain(format!("X_a needs an argument in (0, 1), got {t}"));
    }
    Ok((-t.ln()).powf(a))
}

/// Parameters of `ω_{a,K}(y) = e^{Ky¹} y¹ |y|^{-N/2 + √(N²/4 - c)} X_a(|y|)`.
///
/// With a chart, the barrier is pulled back to `W_{a,K} = ω_{a,K} ∘ F⁻¹`;
/// without one it lives on the flat half-space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub n: usize,
    pub c: f64,
    pub a: f64,
    pub k: f64,
    pub chart: Option<FermiChart>,
}

impl BarrierSpec {
    pub fn new(n: usize, c: f64, a: f64, k: f64) -> Result<Self> {
        let quarter = 0.25 * (n * n) as f64;
        if n < 2 {
            return domain("barrier dimension must be at least 2");
        }
        if c > quarter {
            return Err(HardyError::AboveHardyConstant { c, mu: quarter });
        }
        Ok(Self {
            n,
            c,
            a,
            k,
            chart: None,
        })
    }

    pub fn with_chart(mut self, chart: FermiChart) -> Self {
        self.chart = Some(chart);
        self
    }

    /// `√(N²/4 - c)`.
    pub fn root(&self) -> f64 {
        (0.25 * (self.n * self.n) as f64 - self.c).max(0.0).sqrt()
    }

    /// Radial exponent `-N/2 + √(N²/4 - c)`.
    pub fn exponent(&self) -> f64 {
        -0.5 * self.n as f64 + self.root()
    }

    /// `ln ω_{a,K}(y)` for `y¹ > 0`.
    fn log_omega(&self, y: &[f64]) -> f64 {
        let r = norm(y);
        y[0].ln() + self.exponent() * r.ln() + self.a * (-r.ln()).ln() + self.k * y[0]
    }

    fn check_point(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.n {
            return domain(format!("point has {} coordinates, expected {}", y.len(), self.n));
        }
        if y[0] < 0.0 {
            return domain("barriers live on the half-space y¹ ≥ 0");
        }
        let r = norm(y);
        if !(r > 0.0 && r < 1.0) {
            return domain(format!("|y| = {r} must lie in (0, 1)"));
        }
        Ok(r)
    }
}

/// `ω̄_a(y) = y¹ |y|^{-N/2 + √(N²/4 - c)} X_a(|y|)`.
pub fn omega_bar(spec: &BarrierSpec, y: &[f64], a: f64) -> Result<f64> {
    let r = spec.check_point(y)?;
    if y[0] == 0.0 {
        return Ok(0.0);
    }
    Ok(y[0] * (spec.exponent() * r.ln() + a * (-r.ln()).ln()).exp())
}

/// `ω_{a,K}(y) = e^{Ky¹} ω̄_a(y)`.
pub fn omega_tilted(spec: &BarrierSpec, y: &[f64]) -> Result<f64> {
    Ok((spec.k * y[0]).exp() * omega_bar(spec, y, spec.a)?)
}

/// Closed form of `L_y ω_{a,K}` with
/// `L_y = -Δ - c|y|⁻² + a(a-1)|y|⁻² X_{-2}(|y|)`.
pub fn residual_flat(spec: &BarrierSpec, y: &[f64]) -> Result<f64> {
    let r = spec.check_point(y)?;
    if y[0] == 0.0 {
        return Err(HardyError::SingularPoint(
            "the tilt term -2K/y¹ is singular on y¹ = 0".into(),
        ));
    }
    let w = omega_tilted(spec, y)?;
    let s = spec.root();
    let x1 = x_power(-1.0, r)?;
    let (a, k) = (spec.a, spec.k);
    let r2 = r * r;
    Ok(w * (-2.0 * k / y[0] + 2.0 * a * s * x1 / r2
        + 2.0 * k * (0.5 * spec.n as f64 - s + a * x1) * y[0] / r2
        - k * k))
}

/// `L_y ω_{a,K}` assembled with the finite-difference Laplacian.
pub(crate) fn flat_operator_fd(spec: &BarrierSpec, y: &[f64], h: f64) -> Result<f64> {
    let r = spec.check_point(y)?;
    let w = omega_tilted(spec, y)?;
    let lap = fd_laplacian(|p| omega_tilted(spec, p), y, h)?;
    let a = spec.a;
    Ok(-lap - spec.c * w / (r * r) + a * (a - 1.0) * x_power(-2.0, r)? * w / (r * r))
}

/// Richardson check of [`residual_flat`] against [`fd_laplacian`] at steps
/// `h = h_rel·|y|` and `h/2`.
///
/// `closed_form` holds the identity's value, `fd` the assembly at `h`, and
/// `ratios` the error ratio `e(h)/e(h/2)`, which must lie in `[3.6, 4.4]`.
pub fn certify_flat_barrier(spec: &BarrierSpec, points: &[Vec<f64>], h_rel: f64) -> Result<ResidualReport> {
    let mut rep = ResidualReport::new("flat-barrier", 1e-3);
    let mut ok = true;
    for y in points {
        let r = norm(y);
        let h = h_rel * r;
        let exact = residual_flat(spec, y)?;
        let f1 = flat_operator_fd(spec, y, h)?;
        let f2 = flat_operator_fd(spec, y, 0.5 * h)?;
        let ratio = (f1 - exact) / (f2 - exact);
        let scale = omega_tilted(spec, y)? / (r * r);
        let rel = (f1 - exact).abs() / scale;
        ok &= (3.6..=4.4).contains(&ratio);
        rep.max_relative_mismatch = rep.max_relative_mismatch.max(rel);
        rep.points.push(y.clone());
        rep.closed_form.push(exact);
        rep.fd.push(f1);
        rep.ratios.push(ratio);
        rep.h_values.push(h);
    }
    rep.verdict = Verdict::from_bool(ok && rep.max_relative_mismatch <= rep.tolerance);
    Ok(rep)
}

/// `count` deterministic points in the half-space `y¹ > 0` with
/// `|y| ∈ [0.02, 0.2]` and `y¹ ≥ |y|/5`, from a Kronecker sequence.
pub fn flat_sample_points(n: usize, count: usize) -> Vec<Vec<f64>> {
    let alphas: Vec<f64> = (0..n).map(|j| ((j + 2) as f64).sqrt().fract()).collect();
    (1..=count)
        .map(|k| {
            let u: Vec<f64> = alphas.iter().map(|a| (k as f64 * a).fract()).collect();
            let r = 0.02 * 10f64.powf(u[0]);
            let mut y: Vec<f64> = u[1..].iter().map(|v| 2.0 * v - 1.0).collect();
            let m = norm(&y).max(1e-3);
            y.iter_mut().for_each(|v| *v /= m);
            let tan = 4.0 * ((1..n).map(|i| u[i] - 0.5).sum::<f64>()).abs().min(1.0) + 0.2;
            let mut out = vec![0.0; n];
            let scale = r / (1.0 + tan * tan).sqrt();
            out[0] = scale;
            for (i, v) in y.iter().enumerate() {
                out[i + 1] = scale * tan * v;
            }
            out
        })
        .collect()
}

/// Remainder of the pulled-back expansion at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullbackResidual {
    /// `L_x W_{a,K}(x) / W_{a,K}(x)` by finite differences.
    pub operator_over_w: f64,
    /// The two leading terms divided by `W_{a,K}(x)`.
    pub leading_over_w: f64,
    /// Remainder divided by `|x|⁻¹ W_{a,K}(x)`.
    pub ratio: f64,
    pub h: f64,
}

fn pulled_back(spec: &BarrierSpec, x: &[f64]) -> Result<Vec<f64>> {
    match &spec.chart {
        Some(chart) => chart.inverse_unchecked(x),
        None => Ok(x.to_vec()),
    }
}

/// `(L_x W)/W` with `L_x = -Δ - c|x|⁻² + a(a-1)|x|⁻²X_{-2}(|x|)`, computed on a
/// rescaled copy of `W` so the magnitude of `W` never matters. The Laplacian
/// is Richardson-extrapolated from steps `h` and `h/2`.
fn pulled_operator_over_w(spec: &BarrierSpec, x: &[f64], h: f64, with_log_term: bool) -> Result<f64> {
    let y0 = pulled_back(spec, x)?;
    spec.check_point(&y0)?;
    if y0[0] <= 0.0 {
        return Err(HardyError::SingularPoint("point lies on the boundary".into()));
    }
    let l0 = spec.log_omega(&y0);
    let field = |p: &[f64]| -> Result<f64> {
        let y = pulled_back(spec, p)?;
        spec.check_point(&y)?;
        if y[0] <= 0.0 {
            return domain("stencil crosses the boundary");
        }
        Ok((spec.log_omega(&y) - l0).exp())
    };
    let coarse = fd_laplacian(field, x, h)?;
    let fine = fd_laplacian(field, x, 0.5 * h)?;
    let lap = (4.0 * fine - coarse) / 3.0;
    let rx = norm(x);
    let mut v = -lap - spec.c / (rx * rx);
    if with_log_term {
        v += spec.a * (spec.a - 1.0) * x_power(-2.0, rx)? / (rx * rx);
    }
    Ok(v)
}

/// Remainder of `L_x W_{a,K}` after the curvature term `-(2K + h_M)/d_M` and
/// the logarithmic term, normalised by `|x|⁻¹ W_{a,K}`.
pub fn residual_pullback(spec: &BarrierSpec, x: &[f64], h: Option<f64>) -> Result<PullbackResidual> {
    let rx = norm(x);
    let h = h.unwrap_or(1e-3 * rx);
    let y = pulled_back(spec, x)?;
    let d = y[0];
    if d == 0.0 {
        return Err(HardyError::SingularPoint("x lies on the hypersurface".into()));
    }
    let hm = match &spec.chart {
        Some(chart) => curvature_term(chart, x)?,
        None => 0.0,
    };
    let op = pulled_operator_over_w(spec, x, h, true)?;
    let leading = -(2.0 * spec.k + hm) / d + 2.0 * spec.a * spec.root() * x_power(-1.0, rx)? / (rx * rx);
    Ok(PullbackResidual {
        operator_over_w: op,
        leading_over_w: leading,
        ratio: (op - leading) * rx,
        h,
    })
}

/// Radii × directions in the `(y¹, y²)` half-plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleGrid {
    pub radii: Vec<f64>,
    pub directions: Vec<(f64, f64)>,
}

impl SampleGrid {
    /// Dyadic radii `r, r/2, …` down to `floor`, over the default fan.
    pub fn dyadic(r: f64, floor: f64) -> Self {
        let mut radii = Vec::new();
        let mut t = r;
        while t >= floor {
            radii.push(t);
            t *= 0.5;
        }
        Self {
            radii,
            directions: Self::fan(9),
        }
    }

    /// `m` directions `(sin(kπ/(m+1)), cos(kπ/(m+1)))`, all with `y¹ > 0`.
    pub fn fan(m: usize) -> Vec<(f64, f64)> {
        (1..=m)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / (m + 1) as f64;
                (t.sin(), t.cos())
            })
            .collect()
    }

    pub fn point(n: usize, r: f64, dir: (f64, f64)) -> Vec<f64> {
        let mut y = vec![0.0; n];
        y[0] = r * dir.0;
        y[1] = r * dir.1;
        y
    }
}

/// Default grid for [`certify_prop32`].
pub const PROP32_RADIUS_FLOOR: f64 = 1e-140;

/// Certificate for `w = ω_{1/(2p), 1-N} ∘ F⁻¹` on the exterior of the unit
/// ball near a boundary point.
///
/// The analytic stage is the sign of `(p-1)α⁻ - 2` with `α⁻` taken on the
/// hemisphere. The numeric stage evaluates, at `y` on the grid,
/// `|y|²(-Δw - c|x|⁻²w)/w` (`fd`), `|y|² w^{p-1}` (`closed_form`) and their
/// difference (`ratios`), which must stay above `-tolerance` at every radius
/// below the returned threshold. The predicted threshold solves the
/// sufficient inequality `C|y|^{(p-1)α⁻-2}|log|y||^{-5/2+1/(2p)} ≥ 1` with
/// `C` the smallest `fd / X_{-2}` at the coarsest radius where it is positive.
pub fn certify_prop32(n: usize, c: f64, p: f64, r: f64, grid: &SampleGrid) -> Result<ResidualReport> {
    let nf = n as f64;
    if n < 3 {
        return domain("dimension must be at least 3");
    }
    if c <= nf - 1.0 {
        return domain(format!("need c > N - 1 = {}, got c = {c}", nf - 1.0));
    }
    if !(p > 1.0) {
        return domain(format!("exponent p = {p} must exceed 1"));
    }
    if !(r > 0.0 && r <= 0.5) {
        return domain(format!("radius r = {r} must lie in (0, 0.5]"));
    }
    let alpha = alpha_minus(n, c, nf - 1.0)?;
    let exponent = (p - 1.0) * alpha - 2.0;
    let analytic = AnalyticStage {
        exponent,
        pass: p < 1.0 + 2.0 / alpha,
    };
    let chart = FermiChart::new(n, Orientation::Outside, 0.9)?;
    let spec = BarrierSpec::new(n, c, 0.5 / p, 1.0 - nf)?.with_chart(chart);

    let mut rep = ResidualReport::new("prop32", 1e-6);
    rep.analytic = Some(analytic);
    let mut radii: Vec<f64> = grid.radii.iter().copied().filter(|&t| t <= r).collect();
    radii.sort_by(|a, b| b.total_cmp(a));
    let mut radius_ok = Vec::with_capacity(radii.len());
    let mut worst = Vec::with_capacity(radii.len());
    let mut coarse: Option<(f64, f64)> = None;
    for &rad in &radii {
        let mut level_c = f64::INFINITY;
        let mut ok = true;
        let mut bad = 0.0f64;
        for &dir in &grid.directions {
            let y = SampleGrid::point(n, rad, dir);
            let x = chart.map_unchecked(&y);
            let h = 3e-3 * norm(&x);
            let op = pulled_operator_over_w(&spec, &x, h, false)?;
            let fd = rad * rad * op;
            let target = (2.0 * rad.ln() + (p - 1.0) * spec.log_omega(&y)).exp();
            let res = fd - target;
            level_c = level_c.min(fd / x_power(-2.0, rad)?);
            if res < -rep.tolerance {
                ok = false;
            }
            bad = bad.max(-res);
            rep.points.push(y);
            rep.fd.push(fd);
            rep.closed_form.push(target);
            rep.ratios.push(res);
            rep.h_values.push(h);
        }
        if coarse.is_none() && level_c > 0.0 {
            coarse = Some((level_c, rad));
        }
        radius_ok.push(ok);
        worst.push(bad);
    }
    // scan from the finest radius outwards
    let mut threshold = None;
    let mut mismatch = worst.iter().copied().fold(0.0, f64::max);
    let mut acc = 0.0f64;
    for i in (0..radii.len()).rev() {
        if !radius_ok[i] {
            break;
        }
        acc = acc.max(worst[i]);
        threshold = Some(radii[i]);
        mismatch = acc;
    }
    rep.threshold = threshold;
    rep.max_relative_mismatch = mismatch.max(0.0);
    if let (true, Some((cst, rad))) = (analytic.pass, coarse) {
        rep.predicted_threshold = predicted_crossover(cst, exponent, p, -rad.ln());
    }
    rep.verdict = Verdict::from_bool(analytic.pass && threshold.is_some());
    Ok(rep)
}

/// Largest radius below which `C|y|^e |log|y||^{-5/2 + 1/(2p)} ≥ 1`, from
/// `t = -ln|y| ≥ t0`.
fn predicted_crossover(c: f64, e: f64, p: f64, t0: f64) -> Option<f64> {
    let k = -2.5 + 0.5 / p;
    let g = |t: f64| c.ln() - e * t + k * t.ln();
    // g is convex with minimum at k/e
    let start = t0.max(k / e);
    if g(start) >= 0.0 {
        return Some((-start).exp());
    }
    let mut hi = 2.0 * start.max(1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return None;
        }
    }
    let mut lo = start;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some((-hi).exp())
}
