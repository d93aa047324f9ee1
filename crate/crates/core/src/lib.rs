//! Numerical toolkit for Hardy-type semilinear inequalities
//! `-Δu - b(x)u ≥ u^p` on cones, near smooth boundary points and around
//! closed curves.
//!
//! * [`geometry`] — caps, the Fermi chart of a sphere, circle tubes, and a
//!   finite-difference Laplacian.
//! * [`spectral`] — cap eigenvalues by shooting, Hardy constants and
//!   critical exponents.
//! * [`barriers`] — closed-form barrier families and supersolution
//!   certificates.
//! * [`solver`] — radial solves in the log variable, the monotone truncated
//!   iteration, quadratic forms and the `ζ₀` divergence test.
//! * [`harness`] — sweeps and serialized outputs used by the CLI.

pub mod barriers;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod quad;
pub mod solver;
pub mod spectral;

pub use error::{HardyError, Result};
