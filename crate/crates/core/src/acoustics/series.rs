use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::pressure::check_gap;
use super::{AcousticEnvironment, Bandwidth, DomainMode};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEval {
    /// Pa
    pub pressure: f64,
    /// Bound on the truncated tail, Pa.
    pub remainder_bound: f64,
    pub terms: usize,
}

/// Pressure from the reflection-factor series `Σ_{n=1}^{N} ρⁿ cos(2n k_z L)`,
/// `ρ = (r1 r2)²`, integrated term by term in closed form.
///
/// The `Q` integral of `k_z² Q / k⁴` is elementary, leaving a piecewise
/// quadratic weight `W(k_z)` on the `k_z` axis; each series term is then
/// `∫ W(k_z) cos(2nL k_z) dk_z`, done by parts. The tail beyond `N` terms is
/// bounded by `ρ^{N+1}/(1−ρ)` times `(I/π) ∫ W`.
pub fn acp_pressure_series(
    gap: f64,
    band: &Bandwidth,
    env: &AcousticEnvironment,
    n_terms: usize,
) -> Result<SeriesEval> {
    check_gap(gap)?;
    let r = env.r_product();
    if r >= 1.0 {
        return Err(Error::Reflectivity(r));
    }
    if n_terms == 0 {
        return Err(Error::InvalidParameter {
            name: "n_terms",
            value: 0.0,
            reason: "must be at least 1",
        });
    }
    let rho = r * r;
    let (k1, k2) = band.wavenumbers(env.c());
    let pieces = weight_pieces(env.domain, k1, k2);
    let scale = env.sign.prefactor() * env.intensity() / PI;

    let mut sum = 0.0;
    let mut rho_n = 1.0;
    for n in 1..=n_terms {
        rho_n *= rho;
        let freq = 2.0 * n as f64 * gap;
        let term: f64 = pieces.iter().map(|p| p.cos_moment(freq)).sum();
        sum += rho_n * term;
    }
    let magnitude: f64 = pieces.iter().map(|p| p.integral()).sum();
    let tail = if rho == 0.0 {
        0.0
    } else {
        rho.powi(n_terms as i32 + 1) / (1.0 - rho)
    };
    Ok(SeriesEval {
        pressure: scale * sum,
        remainder_bound: scale.abs() * tail * magnitude,
        terms: n_terms,
    })
}

/// Smallest term count whose tail factor `ρ^{N+1}/(1−ρ)` is below `bound`.
pub fn series_terms_for(r_product: f64, bound: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&r_product) {
        return Err(Error::Reflectivity(r_product));
    }
    let rho = r_product * r_product;
    if rho == 0.0 {
        return Ok(1);
    }
    let mut n = 1usize;
    while rho.powi(n as i32 + 1) / (1.0 - rho) >= bound {
        n += 1;
    }
    Ok(n)
}

/// `W(k) = c0 + c2 k²` on `[lo, hi]`.
struct Piece {
    lo: f64,
    hi: f64,
    c0: f64,
    c2: f64,
}

impl Piece {
    fn integral(&self) -> f64 {
        self.c0 * (self.hi - self.lo) + self.c2 * (self.hi.powi(3) - self.lo.powi(3)) / 3.0
    }

    /// `∫_lo^hi W(k) cos(a k) dk`.
    fn cos_moment(&self, a: f64) -> f64 {
        // ∫cos(ak) = [sin(ak)]/a, written as a product to avoid cancellation
        let m0 =
            2.0 * (0.5 * a * (self.hi + self.lo)).cos() * (0.5 * a * (self.hi - self.lo)).sin() / a;
        let m2 = (x2_cos_primitive(a * self.hi) - x2_cos_primitive(a * self.lo)) / (a * a * a);
        self.c0 * m0 + self.c2 * m2
    }
}

/// `∫_0^x t² cos t dt = x² sin x + 2x cos x − 2 sin x`.
fn x2_cos_primitive(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ_j (−1)^j x^{2j+3} / ((2j)! (2j+3)); the closed form cancels here
        let x2 = x * x;
        let mut power = x * x2;
        let mut fact = 1.0;
        let mut sum = 0.0;
        for j in 0..12 {
            if j > 0 {
                fact *= (2 * j - 1) as f64 * (2 * j) as f64;
                power *= -x2;
            }
            sum += power / (fact * (2 * j + 3) as f64);
        }
        sum
    } else {
        let (s, c) = x.sin_cos();
        x * x * s + 2.0 * x * c - 2.0 * s
    }
}

/// `W(k_z) = ∫ k_z² Q / k⁴ dQ = (k_z²/2)(1/max(k1², k_z²) − 1/k2²)` split into
/// quadratic pieces.
fn weight_pieces(domain: DomainMode, k1: f64, k2: f64) -> Vec<Piece> {
    let upper = Piece {
        lo: k1,
        hi: k2,
        c0: 0.5,
        c2: -0.5 / (k2 * k2),
    };
    match domain {
        DomainMode::Printed => vec![upper],
        DomainMode::Annulus => vec![
            Piece {
                lo: 0.0,
                hi: k1,
                c0: 0.0,
                c2: 0.5 * (1.0 / (k1 * k1) - 1.0 / (k2 * k2)),
            },
            upper,
        ],
    }
}
