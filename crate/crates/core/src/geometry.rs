//! Model geometries: spherical caps, the Fermi chart of a unit sphere, and a
//! circular tube. Every map here is closed form.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, HardyError, Result};

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Geodesic cap `{σ ∈ S^{N-1} : σ·E₁ > delta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapSpec {
    pub dimension: usize,
    pub delta: f64,
}

impl CapSpec {
    pub fn new(dimension: usize, delta: f64) -> Result<Self> {
        if dimension < 3 {
            return domain(format!("cap dimension N = {dimension} must be at least 3"));
        }
        if !(0.0..1.0).contains(&delta) {
            return domain(format!("cap aperture delta = {delta} must lie in [0, 1)"));
        }
        Ok(Self { dimension, delta })
    }

    pub fn hemisphere(dimension: usize) -> Result<Self> {
        Self::new(dimension, 0.0)
    }

    pub fn is_hemisphere(&self) -> bool {
        self.delta == 0.0
    }

    /// Polar angle of the cap boundary.
    pub fn theta0(&self) -> f64 {
        if self.delta == 0.0 {
            0.5 * PI
        } else {
            self.delta.acos()
        }
    }
}

/// The section of the cone `C_Σ`: a cap given by its polar angle, or the
/// whole sphere (punctured ball).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeSpec {
    FullSphere,
    Cap { theta0: f64 },
}

impl ConeSpec {
    pub fn hemisphere() -> Self {
        ConeSpec::Cap { theta0: 0.5 * PI }
    }

    pub fn from_cap(cap: &CapSpec) -> Self {
        ConeSpec::Cap { theta0: cap.theta0() }
    }

    pub fn is_hemisphere(&self) -> bool {
        matches!(self, ConeSpec::Cap { theta0 } if *theta0 == 0.5 * PI)
    }

    /// Aperture used when Lemma-style shrinking `Σ̃ ⊂⊂ Σ` is needed.
    pub fn shrunk(&self, margin_fraction: f64) -> Self {
        match *self {
            ConeSpec::FullSphere => ConeSpec::FullSphere,
            ConeSpec::Cap { theta0 } => ConeSpec::Cap {
                theta0: theta0 * (1.0 - margin_fraction),
            },
        }
    }
}

/// Which side of the unit sphere the chart parameterizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Interior of the ball `B₁(E₁)`.
    Inside,
    /// Exterior of the ball `B₁(-E₁)`.
    Outside,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Inside => 1.0,
            Orientation::Outside => -1.0,
        }
    }
}

/// Fermi chart `y ↦ Exp₀(ȳ) + y¹ N(Exp₀(ȳ))` of a unit sphere through the
/// origin. The unit normal at the origin is `E₁` for both orientations, so the
/// ball is centered at `E₁` when the chart covers its interior and at `-E₁`
/// when it covers the exterior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiChart {
    pub dimension: usize,
    pub orientation: Orientation,
    pub radius: f64,
}

impl FermiChart {
    pub fn new(dimension: usize, orientation: Orientation, radius: f64) -> Result<Self> {
        if dimension < 2 {
            return domain("chart dimension must be at least 2");
        }
        if !(radius > 0.0) {
            return domain(format!("chart radius {radius} must be positive"));
        }
        if orientation == Orientation::Inside && radius > 1.0 {
            return domain("interior chart radius cannot exceed the ball radius 1");
        }
        Ok(Self {
            dimension,
            orientation,
            radius,
        })
    }

    /// Center of the model ball.
    pub fn center(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dimension];
        c[0] = self.orientation.sign();
        c
    }

    /// `F_M(y)` without the chart-domain checks; analytic in `y`.
    pub(crate) fn map_unchecked(&self, y: &[f64]) -> Vec<f64> {
        let sgn = self.orientation.sign();
        let s = norm(&y[1..]);
        let mut x = vec![0.0; self.dimension];
        let half = (0.5 * s).sin();
        x[0] = sgn * 2.0 * half * half + y[0] * s.cos();
        let scale = (1.0 - sgn * y[0]) * if s > 0.0 { s.sin() / s } else { 1.0 };
        for i in 1..self.dimension {
            x[i] = scale * y[i];
        }
        x
    }

    /// `F_M^{-1}(x)` without the chart-domain checks.
    pub(crate) fn inverse_unchecked(&self, x: &[f64]) -> Result<Vec<f64>> {
        let sgn = self.orientation.sign();
        let perp = norm(&x[1..]);
        let x1 = x[0];
        let sq = x.iter().map(|v| v * v).sum::<f64>();
        // |x - C|² = 1 - 2 sgn x¹ + |x|²
        let rho = (1.0 - 2.0 * sgn * x1 + sq).max(0.0).sqrt();
        if rho == 0.0 {
            return domain("point sits at the center of the model ball");
        }
        let d = match self.orientation {
            Orientation::Inside => (2.0 * x1 - sq) / (1.0 + rho),
            Orientation::Outside => (2.0 * x1 + sq) / (1.0 + rho),
        };
        let s = perp.atan2(1.0 - sgn * x1);
        let mut y = vec![0.0; self.dimension];
        y[0] = d;
        if perp > 0.0 {
            for i in 1..self.dimension {
                y[i] = s * x[i] / perp;
            }
        }
        Ok(y)
    }
}

pub fn fermi_map(chart: &FermiChart, y: &[f64]) -> Result<Vec<f64>> {
    check_dim(chart.dimension, y.len())?;
    if y[0] < 0.0 {
        return domain(format!("chart coordinate y¹ = {} must be nonnegative", y[0]));
    }
    let r = norm(y);
    if r >= chart.radius {
        return domain(format!(
            "|y| = {r} lies outside the chart radius {}",
            chart.radius
        ));
    }
    Ok(chart.map_unchecked(y))
}

pub fn fermi_inverse(chart: &FermiChart, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(chart.dimension, x.len())?;
    let y = chart.inverse_unchecked(x)?;
    if y[0] < 0.0 {
        return domain("point lies on the wrong side of the sphere");
    }
    if norm(&y) >= chart.radius {
        return domain("point lies outside the chart image");
    }
    Ok(y)
}

/// Signed distance to the sphere, positive on the chart side.
pub fn sphere_distance(chart: &FermiChart, x: &[f64]) -> Result<f64> {
    check_dim(chart.dimension, x.len())?;
    Ok(chart.inverse_unchecked(x)?[0])
}

/// `h_M = Δ d_M` in closed form at a point with distance `d`.
pub fn curvature_at_distance(dimension: usize, orientation: Orientation, d: f64) -> Result<f64> {
    let n1 = dimension as f64 - 1.0;
    match orientation {
        Orientation::Outside => {
            if d <= -1.0 {
                return domain("exterior distance must exceed -1");
            }
            Ok(n1 / (1.0 + d))
        }
        Orientation::Inside => {
            if d >= 1.0 {
                return domain(format!("interior distance d = {d} must be below 1"));
            }
            Ok(-n1 / (1.0 - d))
        }
    }
}

/// `Δ d_M(x)` for the chart's sphere.
pub fn curvature_term(chart: &FermiChart, x: &[f64]) -> Result<f64> {
    let d = sphere_distance(chart, x)?;
    curvature_at_distance(chart.dimension, chart.orientation, d)
}

/// Induced metric `g_ij = <∂_i F, ∂_j F>` by central differences.
pub fn chart_metric(chart: &FermiChart, y: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = chart.dimension;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut yp = y.to_vec();
            let mut ym = y.to_vec();
            yp[j] += h;
            ym[j] -= h;
            let xp = chart.map_unchecked(&yp);
            let xm = chart.map_unchecked(&ym);
            xp.iter().zip(&xm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        })
        .collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| cols[i].iter().zip(&cols[j]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect()
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return domain(format!("point has {got} coordinates, expected {expected}"));
    }
    Ok(())
}

/// Weight `q` on the closed curve, as a function of the angle `φ`.
#[derive(Clone)]
pub enum TubeWeight {
    Constant(f64),
    /// `q(φ) = 1 - amplitude·|sin(φ/2)|^order`, maximal at `φ = 0`.
    PowerDip { amplitude: f64, order: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl TubeWeight {
    pub fn eval(&self, phi: f64) -> f64 {
        match self {
            TubeWeight::Constant(v) => *v,
            TubeWeight::PowerDip { amplitude, order } => {
                1.0 - amplitude * (0.5 * phi).sin().abs().powf(*order)
            }
            TubeWeight::Custom(f) => f(phi),
        }
    }

    /// `1 - q(φ)`, evaluated without cancellation where possible.
    pub fn deficit(&self, phi: f64) -> f64 {
        match self {
            TubeWeight::PowerDip { amplitude, order } => {
                amplitude * (0.5 * phi).sin().abs().powf(*order)
            }
            _ => 1.0 - self.eval(phi),
        }
    }

    /// Angles where `q` is known to attain its maximum.
    pub fn max_points(&self) -> Vec<f64> {
        match self {
            TubeWeight::PowerDip { .. } => vec![0.0],
            _ => Vec::new(),
        }
    }

    /// Maximum over a dense sampling (exact for the built-in profiles).
    pub fn max_value(&self) -> f64 {
        match self {
            TubeWeight::Constant(v) => *v,
            TubeWeight::PowerDip { amplitude, .. } => 1.0f64.max(1.0 - amplitude),
            TubeWeight::Custom(f) => (0..4096)
                .map(|i| f(2.0 * PI * i as f64 / 4096.0))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

impl fmt::Debug for TubeWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TubeWeight::Constant(v) => write!(f, "Constant({v})"),
            TubeWeight::PowerDip { amplitude, order } => {
                write!(f, "PowerDip {{ amplitude: {amplitude}, order: {order} }}")
            }
            TubeWeight::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

/// Tube of radius `beta` around a closed curve `Γ`. The geometric operations
/// use a circle of radius `circle_radius` in the `(x¹, x²)` plane (`k = 1`);
/// the exponent formulas accept any `k` with `N - k > 2`.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    pub dimension: usize,
    pub k: usize,
    pub circle_radius: f64,
    pub beta: f64,
    pub weight: TubeWeight,
}

impl TubeSpec {
    pub fn new(dimension: usize, k: usize, circle_radius: f64, beta: f64, weight: TubeWeight) -> Result<Self> {
        if k < 1 {
            return domain("submanifold dimension k must be at least 1");
        }
        if dimension < k + 3 {
            return domain(format!(
                "need N - k > 2, got N = {dimension}, k = {k}"
            ));
        }
        if !(circle_radius > 0.0) || !(beta > 0.0) {
            return domain("circle and tube radii must be positive");
        }
        if beta >= circle_radius {
            return domain(format!(
                "tube radius {beta} must be below the circle radius {circle_radius}"
            ));
        }
        Ok(Self {
            dimension,
            k,
            circle_radius,
            beta,
            weight,
        })
    }

    /// Circle tube in `N` dimensions with `q ≡ 1`.
    pub fn circle(dimension: usize, circle_radius: f64, beta: f64) -> Result<Self> {
        Self::new(dimension, 1, circle_radius, beta, TubeWeight::Constant(1.0))
    }

    pub fn with_weight(mut self, weight: TubeWeight) -> Self {
        self.weight = weight;
        self
    }

    /// `(N - k - 2) / 2`.
    pub fn half_codim_gap(&self) -> f64 {
        0.5 * (self.dimension as f64 - self.k as f64 - 2.0)
    }

    pub fn is_normalized(&self) -> bool {
        (self.weight.max_value() - 1.0).abs() < 1e-12
    }

    pub(crate) fn require_circle(&self) -> Result<()> {
        if self.k != 1 {
            return Err(HardyError::Domain(format!(
                "tube geometry is implemented for circles (k = 1), got k = {}",
                self.k
            )));
        }
        Ok(())
    }

    /// Point at angle `phi` on `Γ`, displaced by `offset` in the normal space
    /// (`offset[0]` radial in the circle plane, the rest along `x³..x^N`).
    pub fn point(&self, phi: f64, offset: &[f64]) -> Vec<f64> {
        let rho = self.circle_radius + offset[0];
        let mut x = vec![0.0; self.dimension];
        x[0] = rho * phi.cos();
        x[1] = rho * phi.sin();
        x[2..].copy_from_slice(&offset[1..]);
        x
    }
}

/// Distance to the circle `Γ` and the angle of the nearest point.
pub fn tube_distance_projection(tube: &TubeSpec, x: &[f64]) -> Result<(f64, f64)> {
    tube.require_circle()?;
    check_dim(tube.dimension, x.len())?;
    let rho = x[0].hypot(x[1]);
    let out = norm(&x[2..]);
    let radial = rho - tube.circle_radius;
    let delta = radial.hypot(out);
    if rho == 0.0 || delta >= tube.circle_radius {
        return domain("nearest point on the circle is not unique");
    }
    Ok((delta, x[1].atan2(x[0])))
}

/// Nearest point `σ(x)` on the circle.
pub fn tube_projection_point(tube: &TubeSpec, x: &[f64]) -> Result<Vec<f64>> {
    let (_, phi) = tube_distance_projection(tube, x)?;
    Ok(tube.point(phi, &vec![0.0; tube.dimension - 1]))
}

/// Default finite-difference step `1e-4·max(1, |x|)`.
pub fn default_step(x: &[f64]) -> f64 {
    1e-4 * norm(x).max(1.0)
}

/// Central second-difference Laplacian on the `2N`-point stencil.
pub fn fd_laplacian<F>(field: F, x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if !(h > 0.0) {
        return domain(format!("finite-difference step {h} must be positive"));
    }
    let center = field(x)?;
    let mut p = x.to_vec();
    let mut acc = 0.0;
    for i in 0..x.len() {
        p[i] = x[i] + h;
        let fp = field(&p)?;
        p[i] = x[i] - h;
        let fm = field(&p)?;
        p[i] = x[i];
        acc += fp + fm - 2.0 * center;
    }
    Ok(acc / (h * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(o: Orientation) -> FermiChart {
        FermiChart::new(3, o, 0.5).unwrap()
    }

    #[test]
    fn chart_fixes_normal_ray() {
        for o in [Orientation::Inside, Orientation::Outside] {
            let c = chart(o);
            assert_eq!(fermi_map(&c, &[0.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
            let x = fermi_map(&c, &[0.3, 0.0, 0.0]).unwrap();
            assert!((x[0] - 0.3).abs() < 1e-15 && x[1] == 0.0 && x[2] == 0.0);
            let y = fermi_inverse(&c, &[0.3, 0.0, 0.0]).unwrap();
            assert!((y[0] - 0.3).abs() < 1e-15 && y[1].abs() < 1e-15);
        }
    }

    #[test]
    fn tangential_coordinates_follow_great_circles() {
        for o in [Orientation::Inside, Orientation::Outside] {
            let c = chart(o);
            let s = 0.2;
            let x = fermi_map(&c, &[0.0, s, 0.0]).unwrap();
            assert!((norm(&x) - 2.0 * (0.5 * s).sin()).abs() < 1e-15);
            // on the sphere
            let cen = c.center();
            let r: f64 = x.iter().zip(&cen).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            assert!((r - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn chart_rejects_out_of_range() {
        let c = chart(Orientation::Outside);
        assert!(fermi_map(&c, &[0.4, 0.4, 0.0]).is_err());
        assert!(fermi_map(&c, &[-0.1, 0.0, 0.0]).is_err());
        assert!(fermi_inverse(&c, &[-0.1, 0.0, 0.0]).is_err());
    }

    #[test]
    fn curvature_closed_forms() {
        assert_eq!(curvature_at_distance(3, Orientation::Outside, 0.0).unwrap(), 2.0);
        assert_eq!(curvature_at_distance(3, Orientation::Inside, 0.0).unwrap(), -2.0);
        assert_eq!(curvature_at_distance(3, Orientation::Outside, 1.0).unwrap(), 1.0);
        assert!(curvature_at_distance(3, Orientation::Inside, 1.0).is_err());
    }

    #[test]
    fn curvature_matches_fd_laplacian_of_distance() {
        for o in [Orientation::Inside, Orientation::Outside] {
            let c = FermiChart::new(4, o, 0.5).unwrap();
            let x = fermi_map(&c, &[0.1, 0.05, -0.07, 0.02]).unwrap();
            let fd = fd_laplacian(|p| sphere_distance(&c, p), &x, 1e-4).unwrap();
            let exact = curvature_term(&c, &x).unwrap();
            assert!((fd - exact).abs() < 1e-6, "{fd} vs {exact}");
        }
    }

    #[test]
    fn fd_laplacian_examples() {
        let x = [0.3, -0.2, 0.7];
        let v = fd_laplacian(|p| Ok(p.iter().map(|a| a * a).sum()), &x, 1e-3).unwrap();
        assert!((v - 6.0).abs() < 1e-7);
        let v = fd_laplacian(|p| Ok(p[0]), &x, 1e-3).unwrap();
        assert!(v.abs() < 1e-10);
        let v = fd_laplacian(|p| Ok(1.0 / norm(p)), &x, 1e-3).unwrap();
        assert!(v.abs() < 1e-5);
        assert!(fd_laplacian(|p| Ok(p[0]), &x, 0.0).is_err());
        assert!(fd_laplacian(
            |p| if p[0] > 0.3 { domain("outside") } else { Ok(0.0) },
            &x,
            1e-3
        )
        .is_err());
    }

    #[test]
    fn tube_examples() {
        let tube = TubeSpec::circle(4, 1.0, 0.5).unwrap();
        let (d, phi) = tube_distance_projection(&tube, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(d.abs() < 1e-15 && (phi - 0.5 * PI).abs() < 1e-15);
        let (d, phi) = tube_distance_projection(&tube, &[1.2, 0.0, 0.0, 0.0]).unwrap();
        assert!((d - 0.2).abs() < 1e-15 && phi == 0.0);
        assert!(tube_distance_projection(&tube, &[0.0, 0.0, 0.3, 0.0]).is_err());
        assert!(TubeSpec::circle(3, 1.0, 0.5).is_err());
        assert!(TubeSpec::new(5, 0, 1.0, 0.5, TubeWeight::Constant(1.0)).is_err());
    }

    #[test]
    fn cap_spec_validation() {
        assert!(CapSpec::new(2, 0.0).is_err());
        assert!(CapSpec::new(3, 1.0).is_err());
        let h = CapSpec::hemisphere(5).unwrap();
        assert!(h.is_hemisphere());
        assert_eq!(h.theta0(), 0.5 * PI);
        assert!(ConeSpec::from_cap(&h).is_hemisphere());
    }
}
