//! Acoustic Casimir pressure between two parallel, rigid, partially reflecting
//! plates immersed in band-limited diffuse white noise.
//!
//! The pressure is the double integral over the perpendicular (`k_z`) and
//! parallel (`Q`) wavevector components of `k_z² Q / k⁴` times the real part
//! of the multiple-reflection factor. [`acp_pressure`] evaluates it by nested
//! adaptive quadrature; [`acp_pressure_series`] expands the reflection factor
//! in its geometric series and integrates every term in closed form, which
//! makes it an independent check on the quadrature path.

mod design;
mod pressure;
mod profile;
mod series;

pub use design::{design_bandwidth, repulsive_peak_locations};
pub use pressure::{
    acp_pressure, acp_pressure_eval, electrostatic_pressure, ideal_pressure, reflection_factor,
    PressureEval,
};
pub use profile::{
    lobes, pressure_profile, resonant_extrema, sign_changes, Extremum, Lobe, PressureProfile,
};
pub use series::{acp_pressure_series, series_terms_for, SeriesEval};

use serde::{Deserialize, Serialize};

use crate::error::{non_negative, positive, Error, Result};
use crate::numerics::Interval;

/// Speed of sound in air used throughout the reproduction runs, m/s.
pub const SPEED_OF_SOUND_AIR: f64 = 340.0;

/// Noise band `[ω₁, ω₂]` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bandwidth {
    omega1: f64,
    omega2: f64,
}

impl Bandwidth {
    pub fn new(omega1: f64, omega2: f64) -> Result<Self> {
        positive("omega1", omega1)?;
        positive("omega2", omega2)?;
        if omega2 <= omega1 {
            return Err(Error::InvalidParameter {
                name: "omega2",
                value: omega2,
                reason: "must exceed omega1",
            });
        }
        Ok(Self { omega1, omega2 })
    }

    pub fn omega1(&self) -> f64 {
        self.omega1
    }

    pub fn omega2(&self) -> f64 {
        self.omega2
    }

    /// Same band with both edges multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        Self::new(self.omega1 * s, self.omega2 * s)
    }

    /// Wavenumber limits `(ω₁/c, ω₂/c)`.
    pub fn wavenumbers(&self, c: f64) -> (f64, f64) {
        (self.omega1 / c, self.omega2 / c)
    }
}

/// Integration domain of the pressure integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DomainMode {
    /// `k_z ∈ [ω₁/c, ω₂/c]`, `Q` from `sqrt(max(0, ω₁²/c² − k_z²))` to
    /// `sqrt(ω₂²/c² − k_z²)`. With these limits the lower `Q` bound is always 0.
    #[default]
    Printed,
    /// `k_z ∈ [0, ω₂/c]` with the same `Q` limits, so that every mode with
    /// `ω₁ ≤ ck ≤ ω₂` is counted exactly once.
    Annulus,
}

/// Overall sign of the pressure integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    /// Leading `+I/π`: pressure is positive (repulsive) when the gap holds
    /// a whole number of half-wavelengths of the lower band edge.
    #[default]
    ResonanceRepulsive,
    /// Leading `−I/π` as the integral is usually written; resonances come
    /// out attractive.
    Printed,
}

impl SignConvention {
    pub fn prefactor(self) -> f64 {
        match self {
            SignConvention::ResonanceRepulsive => 1.0,
            SignConvention::Printed => -1.0,
        }
    }
}

/// Medium and plate properties entering the pressure integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticEnvironment {
    c: f64,
    intensity: f64,
    r1: f64,
    r2: f64,
    pub domain: DomainMode,
    pub sign: SignConvention,
}

impl AcousticEnvironment {
    /// `c` in m/s, spectral intensity in W·s/m², amplitude reflectivities in [0, 1).
    pub fn new(c: f64, intensity: f64, r1: f64, r2: f64) -> Result<Self> {
        positive("c", c)?;
        non_negative("intensity", intensity)?;
        for (name, r) in [("r1", r1), ("r2", r2)] {
            if !(0.0..1.0).contains(&r) {
                return Err(Error::InvalidParameter {
                    name,
                    value: r,
                    reason: "reflectivity must lie in [0, 1)",
                });
            }
        }
        Ok(Self {
            c,
            intensity,
            r1,
            r2,
            domain: DomainMode::default(),
            sign: SignConvention::default(),
        })
    }

    /// Equal plates with `r1·r2 = r_product`.
    pub fn with_product(c: f64, intensity: f64, r_product: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r_product) {
            return Err(Error::Reflectivity(r_product));
        }
        let r = r_product.sqrt();
        Self::new(c, intensity, r, r)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn r_product(&self) -> f64 {
        self.r1 * self.r2
    }

    pub fn with_intensity(mut self, intensity: f64) -> Result<Self> {
        self.intensity = non_negative("intensity", intensity)?;
        Ok(self)
    }

    pub fn with_domain(mut self, domain: DomainMode) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_sign(mut self, sign: SignConvention) -> Self {
        self.sign = sign;
        self
    }

    /// Outer `k_z` range for this environment's domain mode.
    pub fn kz_range(&self, band: &Bandwidth) -> Interval {
        let (k1, k2) = band.wavenumbers(self.c);
        let lo = match self.domain {
            DomainMode::Printed => k1,
            DomainMode::Annulus => 0.0,
        };
        Interval::new(lo, k2).expect("band edges are ordered")
    }
}

impl Default for AcousticEnvironment {
    /// Air, `I_ω = 1e-4 W·s/m²`, `r1 = r2 = √0.8`.
    fn default() -> Self {
        Self::with_product(SPEED_OF_SOUND_AIR, 1e-4, 0.8).expect("valid defaults")
    }
}

/// A plane-wave mode split into its perpendicular and parallel wavevector
/// components, 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoordinates {
    pub k_z: f64,
    pub q: f64,
}

impl ModeCoordinates {
    pub fn k_squared(&self) -> f64 {
        self.q * self.q + self.k_z * self.k_z
    }

    pub fn k(&self) -> f64 {
        self.k_squared().sqrt()
    }

    pub fn omega(&self, c: f64) -> f64 {
        c * self.k()
    }

    /// `k_z² Q / k⁴`, the angular weight of the mode.
    pub fn weight(&self) -> f64 {
        let k2 = self.k_squared();
        if k2 == 0.0 {
            0.0
        } else {
            self.k_z * self.k_z * self.q / (k2 * k2)
        }
    }

    /// `Q` limits at fixed `k_z` so that `ω₁/c ≤ k ≤ ω₂/c`; `None` when empty.
    pub fn q_range(k_z: f64, k1: f64, k2: f64) -> Option<Interval> {
        let lo = (k1 * k1 - k_z * k_z).max(0.0).sqrt();
        let hi = (k2 * k2 - k_z * k_z).max(0.0).sqrt();
        Interval::nonempty(lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bandwidth_invariants() {
        assert!(Bandwidth::new(0.0, 1.0).is_err());
        assert!(Bandwidth::new(2.0, 1.0).is_err());
        assert!(Bandwidth::new(1.0, f64::INFINITY).is_err());
        let b = Bandwidth::new(9e7, 1e8).unwrap();
        let (k1, k2) = b.wavenumbers(340.0);
        assert!((k1 - 9e7 / 340.0).abs() < 1e-9 && (k2 - 1e8 / 340.0).abs() < 1e-9);
    }

    #[test]
    fn environment_invariants() {
        assert!(AcousticEnvironment::new(0.0, 1.0, 0.5, 0.5).is_err());
        assert!(AcousticEnvironment::new(340.0, -1.0, 0.5, 0.5).is_err());
        assert!(AcousticEnvironment::new(340.0, 1.0, 1.0, 0.5).is_err());
        assert!(AcousticEnvironment::new(340.0, 1.0, 0.5, -0.1).is_err());
        assert!(AcousticEnvironment::with_product(340.0, 1.0, 1.0).is_err());
        let env = AcousticEnvironment::default();
        assert!((env.r_product() - 0.8).abs() < 1e-15);
        assert_eq!(env.domain, DomainMode::Printed);
    }

    #[test]
    fn mode_dispersion() {
        let m = ModeCoordinates { k_z: 3.0, q: 4.0 };
        assert_eq!(m.k(), 5.0);
        assert_eq!(m.omega(2.0), 10.0);
        assert!((m.weight() - 9.0 * 4.0 / 625.0).abs() < 1e-16);
        let iv = ModeCoordinates::q_range(3.0, 4.0, 5.0).unwrap();
        assert!((iv.lo() - 7f64.sqrt()).abs() < 1e-15 && iv.hi() == 4.0);
        assert!(ModeCoordinates::q_range(5.0, 4.0, 5.0).is_none());
    }
}
