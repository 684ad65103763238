//! One-degree-of-freedom lumped micro-switch: a plate on a spring of stiffness
//! `k` above a fixed plate, rest gap `D`, area `A`, pulled in by an
//! electrostatic voltage and pushed or pulled by the acoustic Casimir pressure.
//!
//! Forces are counted positive when they close the gap. With `L̃ = L/D` the
//! equilibrium condition reduces to
//!
//! ```text
//! λ₁ = L̃²(1 − L̃) + λ₂ f(L̃)
//! λ₁ = ε₀ A V² / (2 k D³),  λ₂ = I_ω A / (k D²),  f(L̃) = L̃² D P(L̃ D) / I_ω
//! ```
//!
//! so `f > 0` where the pressure is repulsive. Pull-in happens at the maximum
//! of the right-hand side over `L̃`.

use serde::{Deserialize, Serialize};

use crate::acoustics::{acp_pressure, AcousticEnvironment, Bandwidth};
use crate::error::{non_negative, positive, Error, Result};
use crate::exec::{self, Execution};
use crate::numerics::{find_max_with, find_root_with, Interval, Tolerance};
use crate::EPSILON_0;

/// Pull-in gap fraction of the purely electrostatic device.
pub const CLASSIC_PULL_IN_FRACTION: f64 = 2.0 / 3.0;
/// Maximum of `L̃²(1 − L̃)`.
pub const CLASSIC_LAMBDA1_MAX: f64 = 4.0 / 27.0;
/// Lower end of the gap-fraction range searched for pull-in; below it the
/// electrostatic term is singular.
pub const MIN_GAP_FRACTION: f64 = 0.01;
/// Argmax displacement from 2/3 beyond which the pull-in point counts as moved.
pub const ARGMAX_SHIFT_THRESHOLD: f64 = 1e-3;
/// Samples in the equilibrium sign scan.
const EQUILIBRIUM_SCAN_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LumpedDevice {
    k_spring: f64,
    rest_gap: f64,
    area: f64,
}

impl LumpedDevice {
    /// Spring constant in N/m, rest gap in m, plate area in m².
    pub fn new(k_spring: f64, rest_gap: f64, area: f64) -> Result<Self> {
        Ok(Self {
            k_spring: positive("k_spring", k_spring)?,
            rest_gap: positive("D", rest_gap)?,
            area: positive("A", area)?,
        })
    }

    pub fn k_spring(&self) -> f64 {
        self.k_spring
    }

    pub fn rest_gap(&self) -> f64 {
        self.rest_gap
    }

    pub fn area(&self) -> f64 {
        self.area
    }
}

impl Default for LumpedDevice {
    /// `k = 1 N/m`, `D = 60 µm`, `A = 1e-8 m²`.
    fn default() -> Self {
        Self {
            k_spring: 1.0,
            rest_gap: 60e-6,
            area: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Actuation {
    voltage: f64,
    pub env: AcousticEnvironment,
    pub band: Bandwidth,
}

impl Actuation {
    pub fn new(voltage: f64, env: AcousticEnvironment, band: Bandwidth) -> Result<Self> {
        Ok(Self {
            voltage: non_negative("voltage", voltage)?,
            env,
            band,
        })
    }

    pub fn voltage(&self) -> f64 {
        self.voltage
    }
}

/// Dimensionless description of one gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessState {
    pub l_tilde: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub f_value: f64,
}

impl DimensionlessState {
    pub fn at(l_tilde: f64, dev: &LumpedDevice, act: &Actuation, tol: &Tolerance) -> Result<Self> {
        Ok(Self {
            l_tilde,
            lambda1: lambda1(dev, act.voltage),
            lambda2: lambda2(dev, &act.env),
            f_value: f_dimensionless(l_tilde, dev, &act.env, &act.band, tol)?,
        })
    }

    /// `L̃²(1 − L̃) + λ₂ f − λ₁`; zero at an equilibrium.
    pub fn residual(&self) -> f64 {
        bifurcation_value(self.l_tilde, self.lambda2, self.f_value) - self.lambda1
    }
}

/// Gap-closing force at separation `gap`, N: spring, electrostatic attraction
/// and `−A·P` from the acoustic pressure.
pub fn net_force(gap: f64, dev: &LumpedDevice, act: &Actuation, tol: &Tolerance) -> Result<f64> {
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::InvalidGeometry(gap));
    }
    let spring = -dev.k_spring * (dev.rest_gap - gap);
    let electrostatic = EPSILON_0 * act.voltage * act.voltage * dev.area / (2.0 * gap * gap);
    let acoustic = -dev.area * acp_pressure(gap, &act.band, &act.env, tol)?;
    Ok(spring + electrostatic + acoustic)
}

/// `ε₀ A V² / (2 k D³)`.
pub fn lambda1(dev: &LumpedDevice, voltage: f64) -> f64 {
    EPSILON_0 * dev.area * voltage * voltage / (2.0 * dev.k_spring * dev.rest_gap.powi(3))
}

/// Voltage giving a particular `λ₁`; inverse of [`lambda1`].
pub fn voltage_for_lambda1(dev: &LumpedDevice, lambda1: f64) -> f64 {
    (2.0 * dev.k_spring * dev.rest_gap.powi(3) * lambda1 / (EPSILON_0 * dev.area)).sqrt()
}

/// `I_ω A / (k D²)`: acoustic-to-elastic force ratio, normalized so that
/// `λ₂ f(L̃)` is exactly the dimensionless acoustic term.
pub fn lambda2(dev: &LumpedDevice, env: &AcousticEnvironment) -> f64 {
    env.intensity() * dev.area / (dev.k_spring * dev.rest_gap * dev.rest_gap)
}

/// Shape function `f(L̃) = L̃² D P(L̃ D) / I_ω`. Independent of the intensity.
pub fn f_dimensionless(
    l_tilde: f64,
    dev: &LumpedDevice,
    env: &AcousticEnvironment,
    band: &Bandwidth,
    tol: &Tolerance,
) -> Result<f64> {
    if !(l_tilde > 0.0 && l_tilde <= 1.0) {
        return Err(Error::InvalidParameter {
            name: "L_tilde",
            value: l_tilde,
            reason: "gap fraction must lie in (0, 1]",
        });
    }
    let unit = env.with_intensity(1.0)?;
    let p = acp_pressure(l_tilde * dev.rest_gap, band, &unit, tol)?;
    Ok(l_tilde * l_tilde * dev.rest_gap * p)
}

/// `L̃²(1 − L̃) + λ₂ f`.
pub fn bifurcation_value(l_tilde: f64, lambda2: f64, f_value: f64) -> f64 {
    let cubic = l_tilde * l_tilde * (1.0 - l_tilde);
    if lambda2 == 0.0 {
        cubic
    } else {
        cubic + lambda2 * f_value
    }
}

/// `λ₁(L̃)` along the equilibrium branch for every grid point. `f` is not
/// called when `lambda2 == 0`.
pub fn bifurcation_curve<F>(
    grid: &[f64],
    lambda2: f64,
    f: F,
    execution: Execution,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    non_negative("lambda2", lambda2)?;
    if let Some(&bad) = grid.iter().find(|&&x| !(x > 0.0 && x <= 1.0)) {
        return Err(Error::InvalidParameter {
            name: "L_tilde",
            value: bad,
            reason: "gap fraction must lie in (0, 1]",
        });
    }
    if lambda2 == 0.0 {
        return Ok(grid
            .iter()
            .map(|&x| bifurcation_value(x, 0.0, 0.0))
            .collect());
    }
    exec::try_map(execution, grid, |&x| {
        Ok(bifurcation_value(x, lambda2, f(x)?))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PullInResult {
    /// Classic pull-in gap `2D/3`, m.
    pub l_in: f64,
    /// Classic pull-in voltage, V.
    pub v_in: f64,
    /// Pull-in voltage from the maximum of the bifurcation curve, V.
    pub v_star: f64,
    pub l_tilde_star: f64,
    pub lambda1_star: f64,
    pub argmax_shifted: bool,
    pub lambda2: f64,
    /// `f(2/3)`.
    pub f_at_classic: f64,
    /// `V_in sqrt(1 + (27/4) λ₂ f(2/3))`; `None` if the radicand is negative.
    pub v_star_closed: Option<f64>,
}

/// `V_in = sqrt(8kD³ / (27 ε₀ A))`, `L_in = 2D/3`.
pub fn pull_in_classic(dev: &LumpedDevice) -> PullInResult {
    let v_in = classic_voltage(dev);
    PullInResult {
        l_in: CLASSIC_PULL_IN_FRACTION * dev.rest_gap,
        v_in,
        v_star: v_in,
        l_tilde_star: CLASSIC_PULL_IN_FRACTION,
        lambda1_star: CLASSIC_LAMBDA1_MAX,
        argmax_shifted: false,
        lambda2: 0.0,
        f_at_classic: 0.0,
        v_star_closed: Some(v_in),
    }
}

fn classic_voltage(dev: &LumpedDevice) -> f64 {
    (8.0 * dev.k_spring * dev.rest_gap.powi(3) / (27.0 * EPSILON_0 * dev.area)).sqrt()
}

/// Pull-in with the acoustic pressure of `env`/`band`.
pub fn pull_in_acoustic(
    dev: &LumpedDevice,
    env: &AcousticEnvironment,
    band: &Bandwidth,
    tol: &Tolerance,
    execution: Execution,
) -> Result<PullInResult> {
    pull_in_with_shape(
        dev,
        lambda2(dev, env),
        |x| f_dimensionless(x, dev, env, band, tol),
        tol,
        execution,
    )
}

/// Pull-in for an arbitrary shape function at a given `λ₂`.
///
/// The bifurcation curve is maximized over `[MIN_GAP_FRACTION, 1]`; the
/// maximum gives `λ₁*` and hence `V*`. The closed form evaluated at the
/// classic pull-in point is reported alongside for comparison.
pub fn pull_in_with_shape<F>(
    dev: &LumpedDevice,
    lambda2: f64,
    f: F,
    tol: &Tolerance,
    execution: Execution,
) -> Result<PullInResult>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    non_negative("lambda2", lambda2)?;
    let v_in = classic_voltage(dev);
    let f_at_classic = f(CLASSIC_PULL_IN_FRACTION)?;
    let curve = |x: f64| -> Result<f64> {
        if lambda2 == 0.0 {
            Ok(bifurcation_value(x, 0.0, 0.0))
        } else {
            Ok(bifurcation_value(x, lambda2, f(x)?))
        }
    };
    let range = Interval::new(MIN_GAP_FRACTION, 1.0)?;
    let max = find_max_with(curve, range, tol, execution)?;
    if max.value <= 0.0 {
        return Err(Error::NoEquilibrium { voltage: 0.0 });
    }
    let radicand = 1.0 + 27.0 / 4.0 * lambda2 * f_at_classic;
    Ok(PullInResult {
        l_in: CLASSIC_PULL_IN_FRACTION * dev.rest_gap,
        v_in,
        v_star: voltage_for_lambda1(dev, max.value),
        l_tilde_star: max.x,
        lambda1_star: max.value,
        argmax_shifted: (max.x - CLASSIC_PULL_IN_FRACTION).abs() > ARGMAX_SHIFT_THRESHOLD,
        lambda2,
        f_at_classic,
        v_star_closed: (radicand >= 0.0).then(|| v_in * radicand.sqrt()),
    })
}

/// An equilibrium separation and its stability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub gap: f64,
    pub l_tilde: f64,
    pub stable: bool,
}

/// All zeros of [`net_force`] on `[MIN_GAP_FRACTION·D, D]`, ascending.
///
/// Roots are bracketed by a uniform sign scan and refined with Brent's
/// method. An equilibrium is stable when the closing force grows with the
/// gap there (`dF/dL > 0`, central difference with `h = 1e-6 D`), i.e. a
/// displacement is pushed back.
pub fn equilibrium_gaps(
    dev: &LumpedDevice,
    act: &Actuation,
    tol: &Tolerance,
    execution: Execution,
) -> Result<Vec<Equilibrium>> {
    let d = dev.rest_gap;
    let lo = MIN_GAP_FRACTION * d;
    let n = EQUILIBRIUM_SCAN_POINTS;
    let gaps: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                d
            } else {
                lo + (d - lo) * i as f64 / n as f64
            }
        })
        .collect();
    let force = |gap: f64| net_force(gap, dev, act, tol);
    let values = exec::try_map(execution, &gaps, |&g| force(g).map_err(|e| e.at_gap(g)))?;

    let mut roots = Vec::new();
    for i in 0..=n {
        if values[i] == 0.0 {
            roots.push(gaps[i]);
        } else if i < n && values[i + 1] != 0.0 && values[i].signum() != values[i + 1].signum() {
            let bracket = Interval::new(gaps[i], gaps[i + 1])?;
            roots.push(find_root_with(force, bracket, &tol.for_roots())?);
        }
    }
    if roots.is_empty() {
        return Err(Error::NoEquilibrium {
            voltage: act.voltage,
        });
    }

    let h = 1e-6 * d;
    roots
        .into_iter()
        .map(|gap| {
            let slope = (force(gap + h)? - force(gap - h)?) / (2.0 * h);
            Ok(Equilibrium {
                gap,
                l_tilde: gap / d,
                stable: slope > 0.0,
            })
        })
        .collect()
}
