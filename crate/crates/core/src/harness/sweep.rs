use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{SweepConfig, SweepGeometry};
use crate::barriers::{certify_prop32, certify_prop44, tube_alpha_sup, ResidualReport, SampleGrid, TubeSample, PROP32_RADIUS_FLOOR};
use crate::error::{HardyError, Result};
use crate::geometry::{ConeSpec, TubeSpec, TubeWeight};
use crate::solver::{zeta0_divergence_with, ZetaConfig};
use crate::spectral::{critical_exponent, exponent_report, HardyProblem};

/// Outer radius of the Prop-3.2-type certifier grid.
pub const CERT_RADIUS: f64 = 0.25;

/// Outcome of one stage of a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StageVerdict {
    Pass,
    Fail,
    Skipped { reason: String },
}

impl StageVerdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            StageVerdict::Pass
        } else {
            StageVerdict::Fail
        }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        StageVerdict::Skipped { reason: reason.into() }
    }

    pub fn is_pass(&self) -> bool {
        matches!(self, StageVerdict::Pass)
    }
}

impl fmt::Display for StageVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StageVerdict::Pass => write!(f, "pass"),
            StageVerdict::Fail => write!(f, "fail"),
            StageVerdict::Skipped { reason } => write!(f, "skipped({})", sanitize(reason)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ZetaCell {
    Divergent { gamma: f64 },
    Finite { gamma: f64 },
    Skipped { reason: String },
}

impl ZetaCell {
    pub fn is_divergent(&self) -> Option<bool> {
        match self {
            ZetaCell::Divergent { .. } => Some(true),
            ZetaCell::Finite { .. } => Some(false),
            ZetaCell::Skipped { .. } => None,
        }
    }
}

impl fmt::Display for ZetaCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZetaCell::Divergent { .. } => write!(f, "divergent"),
            ZetaCell::Finite { .. } => write!(f, "finite"),
            ZetaCell::Skipped { reason } => write!(f, "skipped({})", sanitize(reason)),
        }
    }
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| if matches!(c, ',' | '\n' | '\r' | '"') { ';' } else { c })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub c: f64,
    pub p: f64,
    pub lambda1: Option<f64>,
    pub mu: Option<f64>,
    pub alpha_minus: Option<f64>,
    pub p_critical: Option<f64>,
    pub cert_analytic: StageVerdict,
    pub cert_numeric: StageVerdict,
    pub zeta0: ZetaCell,
    pub max_residual: Option<f64>,
    pub threshold: Option<f64>,
}

impl SweepCell {
    /// Both certifier stages passed.
    pub fn certified(&self) -> bool {
        self.cert_analytic.is_pass() && self.cert_numeric.is_pass()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_sha256: String,
    /// Sorted by `(c, p)`.
    pub cells: Vec<SweepCell>,
}

/// Sample grid of the Prop-3.2-type certifier.
pub fn prop32_grid(floor: Option<f64>) -> SampleGrid {
    SampleGrid::dyadic(CERT_RADIUS, floor.unwrap_or(PROP32_RADIUS_FLOOR))
}

/// Tube distances `10^{-j/4}` for `j = 4..=1200`, at the maximum of `q`.
pub fn prop44_samples() -> Vec<TubeSample> {
    (4..=1200).map(|j| TubeSample::new(0.0, 10f64.powf(-0.25 * j as f64), 0.0)).collect()
}

fn apply_report(cell: &mut SweepCell, rep: &ResidualReport) {
    if let Some(a) = rep.analytic {
        cell.cert_analytic = StageVerdict::from_bool(a.pass);
    }
    cell.cert_numeric = StageVerdict::from_bool(rep.threshold.is_some());
    cell.max_residual = Some(rep.max_relative_mismatch);
    cell.threshold = rep.threshold;
}

fn empty_cell(c: f64, p: f64) -> SweepCell {
    SweepCell {
        c,
        p,
        lambda1: None,
        mu: None,
        alpha_minus: None,
        p_critical: None,
        cert_analytic: StageVerdict::skipped("disabled"),
        cert_numeric: StageVerdict::skipped("disabled"),
        zeta0: ZetaCell::Skipped {
            reason: "disabled".into(),
        },
        max_residual: None,
        threshold: None,
    }
}

fn cone_cell(cfg: &SweepConfig, cone: &ConeSpec, c: f64, p: f64) -> SweepCell {
    let mut cell = empty_cell(c, p);
    let report = match exponent_report(&HardyProblem::new(cfg.n, c, *cone)) {
        Ok(r) => r,
        Err(e) => {
            let reason = e.to_string();
            cell.cert_analytic = StageVerdict::skipped(reason.clone());
            cell.cert_numeric = StageVerdict::skipped(reason.clone());
            cell.zeta0 = ZetaCell::Skipped { reason };
            return cell;
        }
    };
    cell.lambda1 = Some(report.lambda1);
    cell.mu = Some(report.mu);
    cell.alpha_minus = report.alpha_minus;
    cell.p_critical = report.p_critical;
    if !report.flags.valid() {
        let reason = format!(
            "c outside (lambda1, mu] = ({}, {}]",
            report.lambda1, report.mu
        );
        cell.cert_analytic = StageVerdict::skipped(reason.clone());
        cell.cert_numeric = StageVerdict::skipped(reason.clone());
        cell.zeta0 = ZetaCell::Skipped { reason };
        return cell;
    }
    if cfg.certify {
        if !cone.is_hemisphere() {
            let reason = "boundary-point certifier needs the hemisphere";
            cell.cert_analytic = StageVerdict::skipped(reason);
            cell.cert_numeric = StageVerdict::skipped(reason);
        } else {
            match certify_prop32(cfg.n, c, p, CERT_RADIUS, &prop32_grid(cfg.radius_floor)) {
                Ok(rep) => apply_report(&mut cell, &rep),
                Err(e) => {
                    cell.cert_analytic = StageVerdict::skipped(e.to_string());
                    cell.cert_numeric = StageVerdict::skipped(e.to_string());
                }
            }
        }
    }
    if cfg.zeta0 {
        let zcfg = ZetaConfig {
            per_decade: cfg.per_decade.unwrap_or(ZetaConfig::default().per_decade),
            ..Default::default()
        };
        cell.zeta0 = match zeta0_divergence_with(cfg.n, c, p, cone, &zcfg) {
            Ok(v) if v.divergent => ZetaCell::Divergent { gamma: v.gamma },
            Ok(v) => ZetaCell::Finite { gamma: v.gamma },
            Err(e) => ZetaCell::Skipped { reason: e.to_string() },
        };
    }
    cell
}

fn tube_cell(cfg: &SweepConfig, k: usize, circle_radius: f64, beta: f64, q: f64, p: f64) -> SweepCell {
    let mut cell = empty_cell(q, p);
    cell.zeta0 = ZetaCell::Skipped {
        reason: "not defined in tube mode".into(),
    };
    if !(q > 0.0 && q <= 1.0) {
        let reason = format!("constant weight q = {q} must lie in (0, 1]");
        cell.cert_analytic = StageVerdict::skipped(reason.clone());
        cell.cert_numeric = StageVerdict::skipped(reason);
        return cell;
    }
    let tube = match TubeSpec::new(cfg.n, k, circle_radius, beta, TubeWeight::Constant(q)) {
        Ok(t) => t,
        Err(e) => {
            cell.cert_analytic = StageVerdict::skipped(e.to_string());
            cell.cert_numeric = StageVerdict::skipped(e.to_string());
            return cell;
        }
    };
    let a = tube.half_codim_gap();
    let sup = tube_alpha_sup(&tube);
    cell.mu = Some(a * a);
    cell.alpha_minus = Some(sup);
    cell.p_critical = critical_exponent(sup, 0.0).ok();
    if cfg.certify {
        match certify_prop44(&tube, p, beta, &prop44_samples()) {
            Ok(rep) => apply_report(&mut cell, &rep),
            Err(e) => {
                cell.cert_analytic = StageVerdict::skipped(e.to_string());
                cell.cert_numeric = StageVerdict::skipped(e.to_string());
            }
        }
    }
    cell
}

/// One cell, exactly as the sweep computes it.
pub fn sweep_cell(cfg: &SweepConfig, c: f64, p: f64) -> SweepCell {
    match cfg.geometry {
        SweepGeometry::Cone { cone } => cone_cell(cfg, &cone, c, p),
        SweepGeometry::Tube { k, circle_radius, beta } => tube_cell(cfg, k, circle_radius, beta, c, p),
    }
}

/// Worker count: the config, else `HARDYCONE_THREADS`, else rayon's default.
pub fn worker_count(cfg: &SweepConfig) -> Option<usize> {
    cfg.threads.or_else(|| {
        std::env::var("HARDYCONE_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&t| t > 0)
    })
}

pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let config_sha256 = cfg.sha256()?;
    let cs = cfg.c.values();
    let ps = cfg.p.values();
    let keys: Vec<(f64, f64)> = cs.iter().flat_map(|&c| ps.iter().map(move |&p| (c, p))).collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = worker_count(cfg) {
        builder = builder.num_threads(t);
    }
    let pool = builder.build().map_err(|e| HardyError::Config(e.to_string()))?;
    let mut cells: Vec<SweepCell> = pool.install(|| keys.par_iter().map(|&(c, p)| sweep_cell(cfg, c, p)).collect());
    cells.sort_by(|a, b| a.c.total_cmp(&b.c).then(a.p.total_cmp(&b.p)));
    Ok(SweepResult { config_sha256, cells })
}

/// Location of the certifier flip along one row of constant `c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowBoundary {
    pub c: f64,
    pub p_critical: Option<f64>,
    /// Largest `p` of the leading run of certified cells.
    pub last_pass: Option<f64>,
    /// Smallest `p` after that run.
    pub first_fail: Option<f64>,
    /// Certified cells form a prefix of the row.
    pub single_flip: bool,
    /// `p_critical` lies within one grid cell of the flip, or beyond the row
    /// end the flip points to.
    pub brackets: bool,
}

pub fn row_boundaries(cells: &[SweepCell]) -> Vec<RowBoundary> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < cells.len() {
        let c = cells[i].c;
        let mut j = i;
        while j < cells.len() && cells[j].c == c {
            j += 1;
        }
        let row = &cells[i..j];
        let lead = row.iter().take_while(|cell| cell.certified()).count();
        let single_flip = row[lead..].iter().all(|cell| !cell.certified());
        let last_pass = lead.checked_sub(1).map(|k| row[k].p);
        let first_fail = row.get(lead).map(|cell| cell.p);
        let p_critical = row.iter().find_map(|cell| cell.p_critical);
        let step = if row.len() > 1 { row[1].p - row[0].p } else { 0.0 };
        let brackets = single_flip
            && match p_critical {
                Some(pc) => {
                    last_pass.map_or(true, |lp| lp - step < pc) && first_fail.map_or(true, |ff| pc <= ff + step)
                }
                None => lead == 0,
            };
        out.push(RowBoundary {
            c,
            p_critical,
            last_pass,
            first_fail,
            single_flip,
            brackets,
        });
        i = j;
    }
    out
}
