//! Small dense-free linear algebra for tridiagonal systems.

use crate::error::{HardyError, Result};

/// A tridiagonal matrix stored by diagonals. `lower[i]` couples row `i + 1`
/// to column `i`, `upper[i]` couples row `i` to column `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len() + 1, diag.len());
        assert_eq!(upper.len() + 1, diag.len());
        Self { lower, diag, upper }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm. Fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if rhs.len() != n {
            return Err(HardyError::Grid(format!(
                "rhs length {} does not match matrix size {n}",
                rhs.len()
            )));
        }
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut piv = self.diag[0];
        if piv == 0.0 {
            return Err(HardyError::Coercivity("zero pivot in row 0".into()));
        }
        c[0] = if n > 1 { self.upper[0] / piv } else { 0.0 };
        d[0] = rhs[0] / piv;
        for i in 1..n {
            piv = self.diag[i] - self.lower[i - 1] * c[i - 1];
            if piv == 0.0 || !piv.is_finite() {
                return Err(HardyError::Coercivity(format!("zero pivot in row {i}")));
            }
            if i + 1 < n {
                c[i] = self.upper[i] / piv;
            }
            d[i] = (rhs[i] - self.lower[i - 1] * d[i - 1]) / piv;
        }
        let mut x = d;
        for i in (0..n.saturating_sub(1)).rev() {
            let next = x[i + 1];
            x[i] -= c[i] * next;
        }
        Ok(x)
    }
}

/// Symmetric tridiagonal matrix: `diag` and the off-diagonal `off`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// LDL^T pivots of `self - shift * I`.
    pub fn ldl_pivots(&self, shift: f64) -> Vec<f64> {
        let n = self.len();
        let mut piv = Vec::with_capacity(n);
        let mut d = self.diag[0] - shift;
        piv.push(d);
        for i in 1..n {
            let prev = if d == 0.0 { f64::MIN_POSITIVE } else { d };
            d = self.diag[i] - shift - self.off[i - 1] * self.off[i - 1] / prev;
            piv.push(d);
        }
        piv
    }

    /// Number of eigenvalues strictly below `shift` (Sylvester inertia).
    pub fn count_below(&self, shift: f64) -> usize {
        self.ldl_pivots(shift).iter().filter(|&&d| d < 0.0).count()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.count_below(0.0) == 0 && self.ldl_pivots(0.0).iter().all(|&d| d > 0.0)
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Smallest eigenvalue by bisection on the inertia count.
    pub fn min_eigenvalue(&self, rel_tol: f64) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= rel_tol * hi.abs().max(lo.abs()).max(1e-300) {
                break;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `LDLᵀ` factorization of a positive definite [`SymTridiagonal`], reused
/// across right-hand sides.
#[derive(Debug, Clone)]
pub struct LdlFactor {
    pivots: Vec<f64>,
    mult: Vec<f64>,
}

impl LdlFactor {
    /// Fails with a coercivity error when a pivot is not positive.
    pub fn new(m: &SymTridiagonal) -> Result<Self> {
        let pivots = m.ldl_pivots(0.0);
        if let Some(i) = pivots.iter().position(|&d| !(d > 0.0)) {
            return Err(HardyError::Coercivity(format!(
                "discrete form is not positive definite (pivot {i} = {:e})",
                pivots[i]
            )));
        }
        let mult = m.off.iter().zip(&pivots).map(|(o, d)| o / d).collect();
        Ok(Self { pivots, mult })
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.pivots.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.mult[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.pivots[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.mult[i] * x[i + 1];
        }
        x
    }
}

impl SymTridiagonal {
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut v = self.diag[i] * x[i];
                if i > 0 {
                    v += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    v += self.off[i] * x[i + 1];
                }
                v
            })
            .collect()
    }
}

/// Smallest eigenvalue of the pencil `(K, diag(mass))` with `K` symmetric
/// tridiagonal and a positive diagonal mass matrix.
pub fn min_generalized_eigenvalue(k: &SymTridiagonal, mass: &[f64], rel_tol: f64) -> Result<f64> {
    if mass.len() != k.len() {
        return Err(HardyError::Grid("mass matrix size mismatch".into()));
    }
    if let Some(i) = mass.iter().position(|&m| !(m > 0.0) || !m.is_finite()) {
        return Err(HardyError::Grid(format!(
            "mass matrix is singular or indefinite at node {i}"
        )));
    }
    let s: Vec<f64> = mass.iter().map(|m| 1.0 / m.sqrt()).collect();
    let diag = k.diag.iter().zip(&s).map(|(d, si)| d * si * si).collect();
    let off = k
        .off
        .iter()
        .enumerate()
        .map(|(i, o)| o * s[i] * s[i + 1])
        .collect();
    Ok(SymTridiagonal::new(diag, off).min_eigenvalue(rel_tol))
}
