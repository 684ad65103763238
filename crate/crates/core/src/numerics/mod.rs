//! Numerical primitives shared by the physics modules: adaptive Gauss–Kronrod
//! quadrature in one and two (iterated) dimensions, bracketed root finding,
//! global scalar maximization on an interval and central differences.
//!
//! Everything here is pure. Identical inputs produce bit-identical outputs.

mod diff;
mod maximize;
mod quadrature;
mod roots;

pub use diff::derivative;
pub use maximize::{find_max, find_max_with, refine_max_with, Maximum, MIN_GRID_SAMPLES};
pub use quadrature::{
    integrate_1d, integrate_1d_with_breaks, integrate_2d, integrate_2d_with_breaks, Quadrature,
};
pub use roots::{find_root, find_root_with};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Which level of an iterated integral failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    Single,
    Outer,
    Inner,
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Level::Single => "1d",
            Level::Outer => "outer",
            Level::Inner => "inner",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("{level} quadrature exhausted its budget of {evals} evaluations (estimate {estimate:e}, error bound {error:e})")]
    BudgetExhausted {
        level: Level,
        estimate: f64,
        error: f64,
        evals: usize,
    },
    #[error("{level} integrand is not finite at x = {x:e}")]
    NonFiniteIntegrand { level: Level, x: f64 },
    #[error("function value is not finite at x = {x:e}")]
    NonFiniteValue { x: f64 },
    #[error("no sign change on [{lo:e}, {hi:e}] (f(lo) = {f_lo:e}, f(hi) = {f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error(
        "root finder did not converge within {evals} evaluations (last bracket [{lo:e}, {hi:e}])"
    )]
    RootBudgetExhausted { lo: f64, hi: f64, evals: usize },
    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("invalid step size h = {0}")]
    InvalidStep(f64),
}

/// Error targets and evaluation budget for the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_evals: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_evals: usize) -> Result<Self, NumericsError> {
        if !(rel > 0.0 && rel.is_finite()) {
            return Err(NumericsError::InvalidTolerance(
                "rel must be positive and finite",
            ));
        }
        if !(abs >= 0.0 && abs.is_finite()) {
            return Err(NumericsError::InvalidTolerance(
                "abs must be non-negative and finite",
            ));
        }
        if max_evals < 100 {
            return Err(NumericsError::InvalidTolerance(
                "max_evals must be at least 100",
            ));
        }
        Ok(Self {
            rel,
            abs,
            max_evals,
        })
    }

    /// Target error for an estimate of magnitude `value`.
    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }

    /// Abscissa tolerance for root solves on functions evaluated under `self`:
    /// relative `1e-12` (or `rel` if tighter), no absolute floor.
    pub fn for_roots(&self) -> Self {
        Self {
            rel: self.rel.min(1e-12),
            abs: 0.0,
            max_evals: self.max_evals,
        }
    }

    pub(crate) fn scaled(&self, rel_factor: f64, abs_factor: f64) -> Self {
        Self {
            rel: self.rel * rel_factor,
            abs: self.abs * abs_factor,
            max_evals: self.max_evals,
        }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-8,
            abs: 1e-14,
            max_evals: 1_000_000,
        }
    }
}

/// A finite interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, NumericsError> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Self { lo, hi })
        } else {
            Err(NumericsError::InvalidInterval { lo, hi })
        }
    }

    /// Like [`Interval::new`], but `None` for an empty or degenerate range.
    pub fn nonempty(lo: f64, hi: f64) -> Option<Self> {
        Self::new(lo, hi).ok()
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Breakpoints splitting the interval into panels no wider than `step`.
    /// The result starts at `lo` and ends at `hi`.
    pub fn panels(&self, step: f64) -> Vec<f64> {
        if !(step > 0.0 && step.is_finite()) || step >= self.width() {
            return vec![self.lo, self.hi];
        }
        let n = (self.width() / step).ceil() as usize;
        let h = self.width() / n as f64;
        let mut pts: Vec<f64> = (0..n).map(|i| self.lo + i as f64 * h).collect();
        pts.push(self.hi);
        pts
    }
}
