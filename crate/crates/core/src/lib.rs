//! Band-limited acoustic Casimir pressure between parallel plates, and its
//! effect on the pull-in stability of a one-degree-of-freedom electrostatic
//! micro-switch.
//!
//! * [`numerics`]: adaptive quadrature, bracketed roots, scalar maximization.
//! * [`acoustics`]: the pressure integral, its series form, the ideal and
//!   electrostatic comparison pressures, resonance placement and profiles.
//! * [`mems`]: force balance, dimensionless reduction, bifurcation curves and
//!   pull-in voltages.
//! * [`exec`]: ordered data-parallel maps (rayon behind the `parallel` feature).
//!
//! Units are SI throughout: metres, rad/s, pascals, newtons, volts.

pub mod acoustics;
mod error;
pub mod exec;
pub mod mems;
pub mod numerics;

pub use error::{Error, Result};
pub use exec::Execution;
pub use numerics::{Interval, Tolerance};

/// Vacuum permittivity, F/m (CODATA 2018).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
