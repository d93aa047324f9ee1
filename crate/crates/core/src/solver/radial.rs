use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{HardyError, Result};
use crate::linalg::{LdlFactor, SymTridiagonal};

/// Radial data function `r ↦ value`.
pub type RadialFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Boundary condition at one end of the shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Prescribed value of `u`.
    Dirichlet(f64),
    /// Inner end only: `ψ_t = -√m ψ`, which selects the solution decaying
    /// like the slower homogeneous mode as `r → 0`.
    Decaying,
}

/// `-Δu + λ r⁻² u - c r⁻² u = f` on the shell `r0 < r < r1`, for the mode of
/// angular eigenvalue `λ`.
#[derive(Clone)]
pub struct RadialProblem {
    pub n: usize,
    pub lambda: f64,
    pub c: f64,
    pub r0: f64,
    pub r1: f64,
    pub f: RadialFn,
    pub inner: Boundary,
    pub outer: Boundary,
}

impl fmt::Debug for RadialProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProblem")
            .field("n", &self.n)
            .field("lambda", &self.lambda)
            .field("c", &self.c)
            .field("r0", &self.r0)
            .field("r1", &self.r1)
            .field("inner", &self.inner)
            .field("outer", &self.outer)
            .finish_non_exhaustive()
    }
}

impl RadialProblem {
    /// Zero data and zero Dirichlet values.
    pub fn new(n: usize, lambda: f64, c: f64, r0: f64, r1: f64) -> Result<Self> {
        if n < 2 {
            return Err(HardyError::Domain("dimension must be at least 2".into()));
        }
        if !(r0 > 0.0 && r0 < r1) {
            return Err(HardyError::Domain(format!(
                "shell needs 0 < r0 < r1, got ({r0}, {r1})"
            )));
        }
        Ok(Self {
            n,
            lambda,
            c,
            r0,
            r1,
            f: Arc::new(|_| 0.0),
            inner: Boundary::Dirichlet(0.0),
            outer: Boundary::Dirichlet(0.0),
        })
    }

    pub fn with_rhs(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.f = Arc::new(f);
        self
    }

    pub fn with_boundary(mut self, inner: Boundary, outer: Boundary) -> Self {
        self.inner = inner;
        self.outer = outer;
        self
    }

    /// `(N-2)/2`.
    pub fn gamma(&self) -> f64 {
        0.5 * (self.n as f64 - 2.0)
    }
}

/// Coefficients after `u(r) = r^{shift} ψ(t)`, `t = -ln r`:
/// `-ψ'' + mass·ψ = r^{rhs_exponent} f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfCoefficients {
    pub shift: f64,
    pub mass: f64,
    pub rhs_exponent: f64,
}

impl EfCoefficients {
    /// Exponents `±√mass` of the homogeneous solutions `e^{±√mass·t}`.
    pub fn homogeneous_rates(&self) -> Option<(f64, f64)> {
        (self.mass >= 0.0).then(|| (-self.mass.sqrt(), self.mass.sqrt()))
    }
}

pub fn ef_transform(problem: &RadialProblem) -> EfCoefficients {
    let g = problem.gamma();
    EfCoefficients {
        shift: -g,
        mass: g * g + problem.lambda - problem.c,
        rhs_exponent: g + 2.0,
    }
}

/// Values on nodes uniform in `t = -ln r`; `nodes` holds `t`, so the first
/// node is the outer radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
}

/// Default resolution of the log-radial grids.
pub const NODES_PER_DECADE: usize = 4096;

impl Grid1D {
    /// Nodes for the shell `(r0, r1)` with about `per_decade` intervals per
    /// decade of radius, and zero values.
    pub fn log_shell(r0: f64, r1: f64, per_decade: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0 < r1) {
            return Err(HardyError::Grid(format!("invalid shell ({r0}, {r1})")));
        }
        let (ta, tb) = (-r1.ln(), -r0.ln());
        let m = (((tb - ta) / std::f64::consts::LN_10) * per_decade as f64)
            .ceil()
            .max(2.0) as usize;
        let h = (tb - ta) / m as f64;
        let mut nodes: Vec<f64> = (0..=m).map(|i| ta + h * i as f64).collect();
        nodes[m] = tb;
        Ok(Self {
            values: vec![0.0; m + 1],
            nodes,
        })
    }

    pub fn from_fn(mut self, f: impl Fn(f64) -> f64) -> Self {
        self.values = self.nodes.iter().map(|t| f((-t).exp())).collect();
        self
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        (self.nodes[self.len() - 1] - self.nodes[0]) / (self.len() - 1) as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        self.nodes.iter().map(|t| (-t).exp()).collect()
    }

    /// `ψ = r^{(N-2)/2} u`.
    pub fn psi(&self, n: usize) -> Vec<f64> {
        let g = 0.5 * (n as f64 - 2.0);
        self.nodes
            .iter()
            .zip(&self.values)
            .map(|(t, u)| (-g * t).exp() * u)
            .collect()
    }

    pub(crate) fn with_psi(&self, n: usize, psi: &[f64]) -> Self {
        let g = 0.5 * (n as f64 - 2.0);
        Self {
            nodes: self.nodes.clone(),
            values: self.nodes.iter().zip(psi).map(|(t, p)| (g * t).exp() * p).collect(),
        }
    }

    /// `(r, value)` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,value\n");
        for (r, v) in self.radii().iter().zip(&self.values) {
            s.push_str(&format!("{r:.16e},{v:.16e}\n"));
        }
        s
    }

    pub(crate) fn check_uniform(&self) -> Result<()> {
        if self.len() < 3 {
            return Err(HardyError::Grid("need at least 3 nodes".into()));
        }
        let h = self.spacing();
        let uniform = self
            .nodes
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-12 * h.max(1.0) && w[1] > w[0]);
        if uniform && self.values.len() == self.len() {
            Ok(())
        } else {
            Err(HardyError::Grid("nodes must be uniform and increasing in t".into()))
        }
    }
}

/// The discrete operator `-ψ'' + (mass - r² b)ψ` on the unknown nodes,
/// symmetrized, with its data vector.
pub(crate) struct Discretization {
    pub grid: Grid1D,
    pub n: usize,
    pub r: Vec<f64>,
    /// Index range of the unknowns in the node list.
    pub first: usize,
    pub last: usize,
    pub matrix: SymTridiagonal,
    /// Row weights that symmetrize the scheme (`h`, or `h/2` on a Robin row).
    pub row_weight: Vec<f64>,
    /// `r^{(N+2)/2} f` at every node.
    pub g: Vec<f64>,
    /// Dirichlet contributions to the right-hand side.
    pub boundary_rhs: Vec<f64>,
    pub psi_outer: f64,
    pub psi_inner: Option<f64>,
}

impl Discretization {
    pub fn new(problem: &RadialProblem, per_decade: usize, extra_r2b: Option<&dyn Fn(f64) -> f64>) -> Result<Self> {
        let grid = Grid1D::log_shell(problem.r0, problem.r1, per_decade)?;
        Self::on_grid(problem, grid, extra_r2b)
    }

    pub fn on_grid(problem: &RadialProblem, grid: Grid1D, extra_r2b: Option<&dyn Fn(f64) -> f64>) -> Result<Self> {
        grid.check_uniform()?;
        let ef = ef_transform(problem);
        let h = grid.spacing();
        let r = grid.radii();
        let len = grid.len();
        let g_exp = ef.rhs_exponent;
        let g: Vec<f64> = r.iter().map(|&ri| ri.powf(g_exp) * (problem.f)(ri)).collect();
        let mass: Vec<f64> = r
            .iter()
            .map(|&ri| ef.mass - extra_r2b.map_or(0.0, |b| b(ri)))
            .collect();
        let gm = problem.gamma();
        let psi_outer = match problem.outer {
            Boundary::Dirichlet(u) => u * problem.r1.powf(gm),
            Boundary::Decaying => {
                return Err(HardyError::Precondition(
                    "the decaying condition applies at the inner radius only".into(),
                ))
            }
        };
        let (last, psi_inner) = match problem.inner {
            Boundary::Dirichlet(u) => (len - 2, Some(u * problem.r0.powf(gm))),
            Boundary::Decaying => (len - 1, None),
        };
        let first = 1;
        let m = last - first + 1;
        let mut diag = Vec::with_capacity(m);
        let mut row_weight = Vec::with_capacity(m);
        let mut boundary_rhs = vec![0.0; m];
        for i in first..=last {
            if i == len - 1 {
                // ghost node ψ_{n} = ψ_{n-2} - 2h√m ψ_{n-1}, row halved
                let root = mass[i].max(0.0).sqrt();
                diag.push((1.0 + h * root) / h + 0.5 * h * mass[i]);
                row_weight.push(0.5 * h);
            } else {
                diag.push(2.0 / h + h * mass[i]);
                row_weight.push(h);
            }
        }
        let off = vec![-1.0 / h; m - 1];
        boundary_rhs[0] += psi_outer / h;
        if let Some(pi) = psi_inner {
            boundary_rhs[m - 1] += pi / h;
        }
        Ok(Self {
            grid,
            n: problem.n,
            r,
            first,
            last,
            matrix: SymTridiagonal::new(diag, off),
            row_weight,
            g,
            boundary_rhs,
            psi_outer,
            psi_inner,
        })
    }

    /// Right-hand side for data `g + extra` (per node).
    pub fn rhs(&self, extra: Option<&[f64]>) -> Vec<f64> {
        (self.first..=self.last)
            .enumerate()
            .map(|(j, i)| {
                self.row_weight[j] * (self.g[i] + extra.map_or(0.0, |e| e[i])) + self.boundary_rhs[j]
            })
            .collect()
    }

    /// Full nodal `ψ` from the unknowns.
    pub fn assemble_psi(&self, inner: &[f64]) -> Vec<f64> {
        let mut psi = Vec::with_capacity(self.grid.len());
        psi.push(self.psi_outer);
        psi.extend_from_slice(inner);
        if let Some(p) = self.psi_inner {
            psi.push(p);
        }
        psi
    }

    pub fn unknowns<'a>(&self, psi: &'a [f64]) -> &'a [f64] {
        &psi[self.first..=self.last]
    }
}

/// Second-order solve of the radial problem on a log-uniform grid.
pub fn radial_solve(problem: &RadialProblem, per_decade: usize) -> Result<Grid1D> {
    let d = Discretization::new(problem, per_decade, None)?;
    solve_discretization(&d, None)
}

/// Solve with an additional potential `b(r)` subtracted from the operator.
pub fn radial_solve_with_potential(
    problem: &RadialProblem,
    per_decade: usize,
    b: impl Fn(f64) -> f64,
) -> Result<Grid1D> {
    let r2b = move |r: f64| r * r * b(r);
    let d = Discretization::new(problem, per_decade, Some(&r2b))?;
    solve_discretization(&d, None)
}

pub(crate) fn solve_discretization(d: &Discretization, extra: Option<&[f64]>) -> Result<Grid1D> {
    let fac = LdlFactor::new(&d.matrix).map_err(coercivity_context)?;
    let rhs = d.rhs(extra);
    let x = fac.solve(&rhs);
    Ok(d.grid.with_psi(d.n, &d.assemble_psi(&x)))
}

pub(crate) fn coercivity_context(e: HardyError) -> HardyError {
    match e {
        HardyError::Coercivity(m) => HardyError::Coercivity(format!(
            "{m}; the Hardy coefficient exceeds what the shell supports, and beyond μ there is no positive solution at all"
        )),
        other => other,
    }
}

/// Max-norm residual of the discrete equation, relative to the data scale.
pub fn discrete_residual(problem: &RadialProblem, sol: &Grid1D) -> Result<f64> {
    let d = Discretization::on_grid(problem, Grid1D { nodes: sol.nodes.clone(), values: vec![0.0; sol.len()] }, None)?;
    let psi = sol.psi(problem.n);
    let kx = d.matrix.mul_vec(d.unknowns(&psi));
    let rhs = d.rhs(None);
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()))
        + d.matrix.diag.iter().zip(d.unknowns(&psi)).fold(0.0f64, |m, (a, x)| m.max((a * x).abs()));
    let res = kx.iter().zip(&rhs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(if scale > 0.0 { res / scale } else { res })
}
