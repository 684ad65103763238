use serde::{Deserialize, Serialize};

use super::{acp_pressure, acp_pressure_eval, AcousticEnvironment, Bandwidth};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::numerics::{find_root_with, refine_max_with, Interval, Tolerance};

/// Sampled `P(L)` with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureProfile {
    pub gaps: Vec<f64>,
    pub pressures: Vec<f64>,
    pub env: AcousticEnvironment,
    pub band: Bandwidth,
    pub tol: Tolerance,
    /// Total integrand evaluations.
    pub evals: usize,
    /// Largest per-gap error estimate, Pa.
    pub max_error: f64,
}

impl PressureProfile {
    /// Wraps externally computed samples, checking the profile invariants.
    pub fn from_samples(
        gaps: Vec<f64>,
        pressures: Vec<f64>,
        band: Bandwidth,
        env: AcousticEnvironment,
        tol: Tolerance,
    ) -> Result<Self> {
        validate_gaps(&gaps)?;
        if pressures.len() != gaps.len() {
            return Err(Error::InvalidParameter {
                name: "pressures",
                value: pressures.len() as f64,
                reason: "length must match gaps",
            });
        }
        Ok(Self {
            gaps,
            pressures,
            env,
            band,
            tol,
            evals: 0,
            max_error: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    /// `L·P(L)` for every sample, N/m.
    pub fn scaled_products(&self) -> Vec<f64> {
        self.gaps
            .iter()
            .zip(&self.pressures)
            .map(|(l, p)| l * p)
            .collect()
    }
}

fn validate_gaps(gaps: &[f64]) -> Result<()> {
    let first = *gaps.first().ok_or(Error::InvalidParameter {
        name: "gaps",
        value: 0.0,
        reason: "need at least one gap",
    })?;
    if !(first > 0.0 && first.is_finite()) {
        return Err(Error::InvalidGeometry(first));
    }
    for w in gaps.windows(2) {
        if w[1] <= w[0] || !w[1].is_finite() {
            return Err(Error::InvalidParameter {
                name: "gaps",
                value: w[1],
                reason: "must be finite and strictly increasing",
            });
        }
    }
    Ok(())
}

/// Evaluates the pressure at every gap, in input order.
pub fn pressure_profile(
    gaps: &[f64],
    band: &Bandwidth,
    env: &AcousticEnvironment,
    tol: &Tolerance,
    execution: Execution,
) -> Result<PressureProfile> {
    validate_gaps(gaps)?;
    let evals = exec::try_map(execution, gaps, |&gap| {
        acp_pressure_eval(gap, band, env, tol).map_err(|e| e.at_gap(gap))
    })?;
    Ok(PressureProfile {
        gaps: gaps.to_vec(),
        pressures: evals.iter().map(|e| e.pressure).collect(),
        env: *env,
        band: *band,
        tol: *tol,
        evals: evals.iter().map(|e| e.evals).sum(),
        max_error: evals.iter().map(|e| e.error).fold(0.0, f64::max),
    })
}

/// Gaps where the pressure changes sign, refined with a bracketed root solve
/// between each pair of opposite-sign samples. Increasing order.
pub fn sign_changes(profile: &PressureProfile, tol: &Tolerance) -> Result<Vec<f64>> {
    let p = |gap: f64| -> Result<f64> { acp_pressure(gap, &profile.band, &profile.env, tol) };
    let mut out = Vec::new();
    for i in 0..profile.len().saturating_sub(1) {
        let (a, b) = (profile.pressures[i], profile.pressures[i + 1]);
        if (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0) {
            let bracket = Interval::new(profile.gaps[i], profile.gaps[i + 1])?;
            let root = find_root_with(p, bracket, &tol.for_roots())
                .map_err(|e: Error| e.at_gap(profile.gaps[i]))?;
            out.push(root);
        }
    }
    Ok(out)
}

/// A local pressure extremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub gap: f64,
    pub pressure: f64,
}

/// Extrema of the resonant lobes.
///
/// The resonant sign is the sign of the largest-magnitude sample; every
/// interior sample that is a local maximum of `sign·P` (and has that sign) is
/// refined by a local maximization over its two neighbouring cells. The small
/// opposite-sign bumps between resonances are not reported.
pub fn resonant_extrema(profile: &PressureProfile, tol: &Tolerance) -> Result<Vec<Extremum>> {
    let Some(peak) = profile
        .pressures
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
    else {
        return Ok(Vec::new());
    };
    if peak == 0.0 {
        return Ok(Vec::new());
    }
    let sign = peak.signum();
    let s: Vec<f64> = profile.pressures.iter().map(|p| sign * p).collect();
    let f = |gap: f64| -> Result<f64> {
        acp_pressure(gap, &profile.band, &profile.env, tol).map(|p| sign * p)
    };

    let mut out = Vec::new();
    for i in 1..profile.len().saturating_sub(1) {
        if s[i] > 0.0 && s[i] >= s[i - 1] && s[i] > s[i + 1] {
            let cell = Interval::new(profile.gaps[i - 1], profile.gaps[i + 1])?;
            let m = refine_max_with(f, cell, tol).map_err(|e: Error| e.at_gap(profile.gaps[i]))?;
            out.push(Extremum {
                gap: m.x,
                pressure: sign * m.value,
            });
        }
    }
    Ok(out)
}

/// Stretch of separations between two consecutive sign changes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    pub start: f64,
    pub end: f64,
    /// +1 repulsive, −1 attractive
    pub sign: f64,
}

impl Lobe {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }
}

/// Lobes bounded on both sides by entries of `crossings` (as returned by
/// [`sign_changes`]). The sign is read off the profile samples inside the
/// lobe; lobes with no sample inside are skipped.
pub fn lobes(profile: &PressureProfile, crossings: &[f64]) -> Vec<Lobe> {
    crossings
        .windows(2)
        .filter_map(|w| {
            let (start, end) = (w[0], w[1]);
            profile
                .gaps
                .iter()
                .zip(&profile.pressures)
                .find(|(g, p)| **g > start && **g < end && **p != 0.0)
                .map(|(_, p)| Lobe {
                    start,
                    end,
                    sign: p.signum(),
                })
        })
        .collect()
}
