use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::radial::{coercivity_context, Discretization, Grid1D, RadialProblem};
use crate::error::{HardyError, Result};
use crate::linalg::LdlFactor;

/// Nonnegative potential `b(r)` with an optional truncation level.
#[derive(Clone)]
pub struct PotentialField {
    pub b: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub truncation: Option<f64>,
}

impl fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialField")
            .field("truncation", &self.truncation)
            .finish_non_exhaustive()
    }
}

impl PotentialField {
    pub fn new(b: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            b: Arc::new(b),
            truncation: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(|_| 0.0)
    }

    /// `c / r²`.
    pub fn inverse_square(c: f64) -> Self {
        Self::new(move |r| c / (r * r))
    }

    pub fn truncated(&self, k: f64) -> Self {
        Self {
            b: Arc::clone(&self.b),
            truncation: Some(k),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let v = (self.b)(r);
        match self.truncation {
            Some(k) => v.min(k),
            None => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationConfig {
    pub tol: f64,
    pub max_inner: usize,
    pub per_decade: usize,
    pub monotone_slack: f64,
}

impl Default for IterationConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_inner: 10_000,
            per_decade: super::radial::NODES_PER_DECADE,
            monotone_slack: 1e-12,
        }
    }
}

/// `2⁰, 2¹, …, 2^{top}`.
pub fn dyadic_schedule(top: u32) -> Vec<f64> {
    (0..=top).map(|j| 2f64.powi(j as i32)).collect()
}

/// Record of the truncated iteration: one limit `v^k` per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub levels: Vec<f64>,
    pub iterates: Vec<Grid1D>,
    pub inner_steps: Vec<usize>,
    /// One flag per inner step across all levels: `v_n ≥ v_{n-1}` pointwise.
    pub monotone: Vec<bool>,
    /// One flag per level after the first: `v^k ≥ v^{k'}` pointwise.
    pub outer_monotone: Vec<bool>,
    /// Sup-difference between the last two levels.
    pub final_residual: f64,
}

impl IterationTrace {
    pub fn all_monotone(&self) -> bool {
        self.monotone.iter().all(|&f| f) && self.outer_monotone.iter().all(|&f| f)
    }

    pub fn last(&self) -> Option<&Grid1D> {
        self.iterates.last()
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn nondecreasing(new: &[f64], old: &[f64], slack: f64) -> bool {
    new.iter().zip(old).all(|(n, o)| n - o >= -slack)
}

/// Monotone scheme `-Δv_n = b_k v_{n-1} + f` started from `-Δv₀ = f`, for
/// each truncation level `k` of the schedule.
///
/// The base operator is the problem's own (`c` included); `potential` is the
/// part that gets truncated.
pub fn monotone_truncated_solve(
    problem: &RadialProblem,
    potential: &PotentialField,
    schedule: &[f64],
    cfg: &IterationConfig,
) -> Result<IterationTrace> {
    if schedule.is_empty() {
        return Err(HardyError::Precondition("empty truncation schedule".into()));
    }
    let d = Discretization::new(problem, cfg.per_decade, None)?;
    let fac = LdlFactor::new(&d.matrix).map_err(coercivity_context)?;
    let n = problem.n;
    let r2: Vec<f64> = d.r.iter().map(|r| r * r).collect();
    let mut trace = IterationTrace {
        levels: schedule.to_vec(),
        iterates: Vec::with_capacity(schedule.len()),
        inner_steps: Vec::with_capacity(schedule.len()),
        monotone: Vec::new(),
        outer_monotone: Vec::new(),
        final_residual: f64::NAN,
    };
    let start = d.grid.with_psi(n, &d.assemble_psi(&fac.solve(&d.rhs(None))));
    if start.values.iter().any(|v| *v < -cfg.monotone_slack) {
        return Err(HardyError::Precondition(
            "data must be nonnegative for the monotone scheme".into(),
        ));
    }
    for &k in schedule {
        let trunc = potential.truncated(k);
        let weight: Vec<f64> = d.r.iter().zip(&r2).map(|(&r, &r2)| r2 * trunc.eval(r)).collect();
        if weight.iter().any(|w| *w < 0.0) {
            return Err(HardyError::Precondition("potential must be nonnegative".into()));
        }
        let mut v = start.clone();
        let mut psi = v.psi(n);
        let mut steps = 0;
        loop {
            let extra: Vec<f64> = weight.iter().zip(&psi).map(|(w, p)| w * p).collect();
            let next_psi = d.assemble_psi(&fac.solve(&d.rhs(Some(&extra))));
            let next = d.grid.with_psi(n, &next_psi);
            steps += 1;
            trace
                .monotone
                .push(nondecreasing(&next.values, &v.values, cfg.monotone_slack));
            let diff = sup_diff(&next.values, &v.values);
            v = next;
            psi = next_psi;
            if diff <= cfg.tol {
                break;
            }
            if steps >= cfg.max_inner {
                return Err(HardyError::Convergence(format!(
                    "inner iteration at k = {k} stalled at sup-difference {diff:e} after {steps} steps"
                )));
            }
        }
        if let Some(prev) = trace.iterates.last() {
            trace
                .outer_monotone
                .push(nondecreasing(&v.values, &prev.values, cfg.monotone_slack));
            trace.final_residual = sup_diff(&v.values, &prev.values);
        }
        trace.inner_steps.push(steps);
        trace.iterates.push(v);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::radial::radial_solve;

    #[test]
    fn vacuous_truncation() {
        let p = RadialProblem::new(3, 0.0, 0.0, 1e-2, 1.0).unwrap().with_rhs(|_| 1.0);
        let cfg = IterationConfig {
            per_decade: 512,
            ..Default::default()
        };
        let tr = monotone_truncated_solve(&p, &PotentialField::zero(), &[1.0, 4.0], &cfg).unwrap();
        let direct = radial_solve(&p, 512).unwrap();
        for it in &tr.iterates {
            assert!(sup_diff(&it.values, &direct.values) < 1e-14);
        }
        assert_eq!(tr.final_residual, 0.0);
    }

    #[test]
    fn truncation_caps_the_potential() {
        let b = PotentialField::inverse_square(1.0).truncated(4.0);
        assert_eq!(b.eval(0.1), 4.0);
        assert_eq!(b.eval(1.0), 1.0);
    }
}
