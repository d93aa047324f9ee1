//! Sweeps over `(c, p)`, eigenvalue curves, Hardy-constant tables and their
//! CSV/SVG serializations.

mod config;
mod output;
mod reports;
mod sweep;

pub use config::{ParamRange, SweepConfig, SweepGeometry};
pub use output::{eigen_curve_svg, fmt_f64, sweep_csv, sweep_svg, xy_csv, SWEEP_HEADER};
pub use reports::{eigen_curve, hardy_check, HardyRow, HardyTable, HardyWeight};
pub use sweep::{
    prop32_grid, prop44_samples, row_boundaries, run_sweep, sweep_cell, worker_count, RowBoundary, StageVerdict,
    SweepCell, SweepResult, ZetaCell, CERT_RADIUS,
};
