use std::f64::consts::PI;

use super::Bandwidth;
use crate::error::{positive, Error, Result};

/// Gaps holding `n = 1..=n_max` half-wavelengths of the lower band edge,
/// `n π c / ω₁`, where the pressure peaks.
pub fn repulsive_peak_locations(band: &Bandwidth, c: f64, n_max: usize) -> Result<Vec<f64>> {
    positive("c", c)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let base = PI * c / band.omega1();
    Ok((1..=n_max).map(|n| n as f64 * base).collect())
}

/// Band whose `n`-th resonance sits at `target_gap`: `ω₁ = nπc/L`,
/// `ω₂ = ω₁ (1 + rel_width)`.
pub fn design_bandwidth(target_gap: f64, n: usize, c: f64, rel_width: f64) -> Result<Bandwidth> {
    positive("target_gap", target_gap)?;
    positive("c", c)?;
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            reason: "harmonic index must be at least 1",
        });
    }
    if !(rel_width > 0.0 && rel_width < 1.0) {
        return Err(Error::InvalidParameter {
            name: "rel_width",
            value: rel_width,
            reason: "must lie in (0, 1)",
        });
    }
    let omega1 = n as f64 * PI * c / target_gap;
    Bandwidth::new(omega1, omega1 * (1.0 + rel_width))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_peak_positions() {
        let band = Bandwidth::new(9e7, 1e8).unwrap();
        let p = repulsive_peak_locations(&band, 340.0, 12).unwrap();
        let listed = [
            11.8682, 23.7365, 35.6047, 47.473, 59.3412, 71.2094, 83.0777, 94.9459, 106.814,
            118.682, 130.551, 142.419,
        ];
        for (got, want) in p.iter().zip(listed) {
            // listed to 5-6 significant figures
            assert!((got * 1e6 - want).abs() <= 1.1e-5 * want, "{got} vs {want}");
        }
        assert_eq!(p[1], 2.0 * p[0]);
        let ghz = repulsive_peak_locations(&band.scaled(1e3).unwrap(), 340.0, 1).unwrap();
        assert!((ghz[0] * 1e9 - 11.8682).abs() < 1e-4);
        assert!(repulsive_peak_locations(&band, 340.0, 0).is_err());
    }

    #[test]
    fn design_examples() {
        let b = design_bandwidth(40e-6, 1, 340.0, 0.075).unwrap();
        assert!((b.omega1() - 2.670_35e7).abs() < 1e2);
        assert!((b.omega2() / b.omega1() - 1.075).abs() < 1e-15);
        let b = design_bandwidth(40e-9, 1, 340.0, 0.075).unwrap();
        assert!((b.omega1() - 2.670_35e10).abs() < 1e5);
        assert!(design_bandwidth(40e-6, 0, 340.0, 0.1).is_err());
        assert!(design_bandwidth(40e-6, 1, 340.0, 1.0).is_err());
        assert!(design_bandwidth(0.0, 1, 340.0, 0.1).is_err());
    }

    #[test]
    fn design_inverts_peak_locations() {
        for &(l, n) in &[(40e-6, 1usize), (40e-6, 3), (7.5e-9, 2), (1e-3, 5)] {
            let b = design_bandwidth(l, n, 340.0, 0.05).unwrap();
            let p = repulsive_peak_locations(&b, 340.0, n).unwrap();
            assert!((p[n - 1] - l).abs() <= 4.0 * f64::EPSILON * l);
        }
    }
}
