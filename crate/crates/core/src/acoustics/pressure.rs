use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{AcousticEnvironment, Bandwidth, DomainMode, ModeCoordinates};
use crate::error::{non_negative, Error, Result};
use crate::numerics::{integrate_2d_with_breaks, Tolerance};
use crate::EPSILON_0;

/// Real part of `1/(ξ − 1)` with `ξ = (r² e^{2iθ})⁻¹`, where `r` is the
/// reflectivity product and `θ = k_z L`.
///
/// With `ρ = r²` this is `(ρ cos 2θ − ρ²) / (1 − 2ρ cos 2θ + ρ²)`, which equals
/// the series `Σ_{n≥1} ρⁿ cos 2nθ`. It peaks at `ρ/(1−ρ)` when `θ` is a
/// multiple of π and bottoms out at `−ρ/(1+ρ)` halfway between.
pub fn reflection_factor(r_product: f64, theta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r_product) {
        return Err(Error::Reflectivity(r_product));
    }
    Ok(reflection_factor_unchecked(r_product * r_product, theta))
}

#[inline]
pub(crate) fn reflection_factor_unchecked(rho: f64, theta: f64) -> f64 {
    let c2 = (2.0 * theta).cos();
    (rho * c2 - rho * rho) / (1.0 - 2.0 * rho * c2 + rho * rho)
}

/// Pressure together with quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureEval {
    /// Pa; negative is attractive.
    pub pressure: f64,
    /// Estimated absolute error, Pa.
    pub error: f64,
    pub evals: usize,
}

pub(crate) fn check_gap(gap: f64) -> Result<f64> {
    if gap > 0.0 && gap.is_finite() {
        Ok(gap)
    } else {
        Err(Error::InvalidGeometry(gap))
    }
}

/// Acoustic Casimir pressure at plate separation `gap`, Pa.
pub fn acp_pressure(
    gap: f64,
    band: &Bandwidth,
    env: &AcousticEnvironment,
    tol: &Tolerance,
) -> Result<f64> {
    acp_pressure_eval(gap, band, env, tol).map(|e| e.pressure)
}

/// [`acp_pressure`] with error estimate and evaluation count.
///
/// The `k_z` axis is cut into panels of width `π/(2L)` before adaptive
/// refinement, a quarter of the reflection factor's period, so no panel can
/// straddle a full oscillation. In [`DomainMode::Annulus`] the kink at
/// `k_z = ω₁/c` is an extra breakpoint.
pub fn acp_pressure_eval(
    gap: f64,
    band: &Bandwidth,
    env: &AcousticEnvironment,
    tol: &Tolerance,
) -> Result<PressureEval> {
    check_gap(gap)?;
    let r = env.r_product();
    if env.intensity() == 0.0 || r == 0.0 {
        return Ok(PressureEval {
            pressure: 0.0,
            error: 0.0,
            evals: 0,
        });
    }
    let rho = r * r;
    let (k1, k2) = band.wavenumbers(env.c());
    let outer = env.kz_range(band);
    let mut breaks = outer.panels(PI / (2.0 * gap));
    if env.domain == DomainMode::Annulus {
        breaks.push(k1);
    }

    let q = integrate_2d_with_breaks(
        |k_z, q| ModeCoordinates { k_z, q }.weight() * reflection_factor_unchecked(rho, k_z * gap),
        outer,
        &breaks,
        |k_z| ModeCoordinates::q_range(k_z, k1, k2),
        tol,
    )?;
    let scale = env.sign.prefactor() * env.intensity() / PI;
    Ok(PressureEval {
        pressure: scale * q.value,
        error: scale.abs() * q.error,
        evals: q.evals,
    })
}

/// Broadband, perfectly reflecting limit `−π I_ω / (4L)`, Pa. Always attractive.
pub fn ideal_pressure(gap: f64, intensity: f64) -> Result<f64> {
    check_gap(gap)?;
    non_negative("intensity", intensity)?;
    Ok(-PI * intensity / (4.0 * gap))
}

/// Parallel-plate electrostatic pressure `ε₀ V² / (2L²)`, Pa (magnitude of an
/// attraction).
pub fn electrostatic_pressure(gap: f64, voltage: f64) -> Result<f64> {
    check_gap(gap)?;
    if !voltage.is_finite() {
        return Err(Error::InvalidParameter {
            name: "voltage",
            value: voltage,
            reason: "must be finite",
        });
    }
    Ok(EPSILON_0 * voltage * voltage / (2.0 * gap * gap))
}
