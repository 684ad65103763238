#![allow(clippy::excessive_precision)]

//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! Panels are kept in a max-heap keyed by their error estimate; the worst panel
//! is bisected until the summed error meets the tolerance or the evaluation
//! budget runs out. Callers can seed the subdivision with breakpoints, which is
//! how oscillatory integrands get one panel per half-oscillation.

use std::cell::Cell;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{Interval, Level, NumericsError, Tolerance};

/// Kronrod abscissae on [-1, 1] (positive half, descending). Odd indices are
/// the 10-point Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_018_811,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const EVALS_PER_PANEL: usize = 21;

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    /// Estimated absolute error.
    pub error: f64,
    /// Integrand evaluations, summed over all levels.
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// rounding-error floor of the rule on this panel
    floor: f64,
}

struct HeapEntry {
    error: f64,
    index: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // ties broken by index so the refinement order is reproducible
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.index.cmp(&self.index))
    }
}

fn gk21<F>(f: &F, a: f64, b: f64, level: Level) -> Result<Panel, NumericsError>
where
    F: Fn(f64) -> Result<f64, NumericsError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64, NumericsError> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteIntegrand { level, x })
        }
    };

    let fc = eval(center)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = WGK[10] * fc.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    Ok(Panel {
        a,
        b,
        value,
        error,
        floor,
    })
}

fn adapt<F>(
    f: &F,
    breaks: &[f64],
    tol: &Tolerance,
    level: Level,
) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> Result<f64, NumericsError>,
{
    let mut panels: Vec<Panel> = Vec::with_capacity(breaks.len().max(2) * 4);
    let mut heap = BinaryHeap::new();
    let mut evals = 0usize;

    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let p = gk21(f, w[0], w[1], level)?;
        evals += EVALS_PER_PANEL;
        heap.push(HeapEntry {
            error: p.error,
            index: panels.len(),
        });
        panels.push(p);
    }

    let totals = |panels: &[Panel], heap: &BinaryHeap<HeapEntry>| {
        heap.iter().fold((0.0, 0.0), |(v, e), h| {
            (v + panels[h.index].value, e + panels[h.index].error)
        })
    };
    let (mut value, mut error) = totals(&panels, &heap);

    while error > tol.target(value) {
        if evals + 2 * EVALS_PER_PANEL > tol.max_evals {
            return Err(NumericsError::BudgetExhausted {
                level,
                estimate: value,
                error,
                evals,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let p = panels[worst.index];
        if p.error <= p.floor {
            // the worst panel is already at rounding level; so is every other one
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // cannot split any further in floating point
            return Err(NumericsError::BudgetExhausted {
                level,
                estimate: value,
                error,
                evals,
            });
        }
        let left = gk21(f, p.a, mid, level)?;
        let right = gk21(f, mid, p.b, level)?;
        evals += 2 * EVALS_PER_PANEL;
        value += left.value + right.value - p.value;
        error += left.error + right.error - p.error;
        for child in [left, right] {
            heap.push(HeapEntry {
                error: child.error,
                index: panels.len(),
            });
            panels.push(child);
        }
        // periodic resummation keeps drift in the running totals out of the stopping test
        if panels.len().is_multiple_of(64) {
            (value, error) = totals(&panels, &heap);
        }
    }

    // final sum in left-to-right order for a deterministic, drift-free value
    let mut active: Vec<&Panel> = heap.iter().map(|h| &panels[h.index]).collect();
    active.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = active.iter().map(|p| p.value).sum();
    let error = active.iter().map(|p| p.error).sum();
    Ok(Quadrature {
        value,
        error,
        evals,
    })
}

fn checked_breaks(iv: Interval, interior: &[f64]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(interior.len() + 2);
    pts.push(iv.lo());
    pts.extend(
        interior
            .iter()
            .copied()
            .filter(|x| x.is_finite() && *x > iv.lo() && *x < iv.hi()),
    );
    pts.push(iv.hi());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Integrates `f` over `iv` to `max(tol.abs, tol.rel·|Q|)`.
pub fn integrate_1d<F>(f: F, iv: Interval, tol: &Tolerance) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> f64,
{
    integrate_1d_with_breaks(f, iv, &[], tol)
}

/// As [`integrate_1d`], with the interval pre-split at the given interior
/// points. Points outside `iv` are ignored.
pub fn integrate_1d_with_breaks<F>(
    f: F,
    iv: Interval,
    breaks: &[f64],
    tol: &Tolerance,
) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64) -> f64,
{
    let g = |x: f64| Ok(f(x));
    adapt(&g, &checked_breaks(iv, breaks), tol, Level::Single)
}

/// Iterated integral `∫_outer dx ∫_{inner_of(x)} dy f(x, y)`.
///
/// `inner_of` returning `None` means an empty inner range, which contributes
/// zero. The outer level gets half of the error budget; each inner integral is
/// solved ten times tighter so the accumulated inner error stays well inside
/// the other half.
pub fn integrate_2d<F, G>(
    f: F,
    outer: Interval,
    inner_of: G,
    tol: &Tolerance,
) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64) -> Option<Interval>,
{
    integrate_2d_with_breaks(f, outer, &[], inner_of, tol)
}

/// As [`integrate_2d`] with interior breakpoints on the outer axis.
pub fn integrate_2d_with_breaks<F, G>(
    f: F,
    outer: Interval,
    outer_breaks: &[f64],
    inner_of: G,
    tol: &Tolerance,
) -> Result<Quadrature, NumericsError>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64) -> Option<Interval>,
{
    let inner_tol = tol.scaled(0.1, 0.5 / outer.width());
    let outer_tol = tol.scaled(0.5, 0.5);
    let inner_evals = Cell::new(0usize);
    let inner_err = Cell::new(0.0f64);

    let g = |x: f64| -> Result<f64, NumericsError> {
        let Some(iv) = inner_of(x) else {
            return Ok(0.0);
        };
        let h = |y: f64| Ok(f(x, y));
        let q = adapt(&h, &[iv.lo(), iv.hi()], &inner_tol, Level::Inner)?;
        inner_evals.set(inner_evals.get() + q.evals);
        inner_err.set(inner_err.get().max(q.error));
        Ok(q.value)
    };
    let q = adapt(
        &g,
        &checked_breaks(outer, outer_breaks),
        &outer_tol,
        Level::Outer,
    )?;
    Ok(Quadrature {
        value: q.value,
        error: q.error + outer.width() * inner_err.get(),
        evals: q.evals + inner_evals.get(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit() -> Interval {
        Interval::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn kronrod_rule_is_exact_to_degree_31() {
        for d in 0..=31 {
            let q = gk21(&|x: f64| Ok(x.powi(d)), -1.0, 1.0, Level::Single).unwrap();
            let exact = if d % 2 == 0 {
                2.0 / (d as f64 + 1.0)
            } else {
                0.0
            };
            assert!((q.value - exact).abs() < 1e-15, "degree {d}: {}", q.value);
        }
    }

    #[test]
    fn polynomial_exactness() {
        let tol = Tolerance::default();
        let q = integrate_1d(|x| x * x, unit(), &tol).unwrap();
        assert!((q.value - 1.0 / 3.0).abs() <= 1e-12 / 3.0);
        assert_eq!(q.evals, 21);
        let iv = Interval::new(-2.0, 3.0).unwrap();
        let q = integrate_1d(|x| 5.0 * x.powi(7) - x.powi(4) + 2.0, iv, &tol).unwrap();
        let prim = |x: f64| 5.0 / 8.0 * x.powi(8) - x.powi(5) / 5.0 + 2.0 * x;
        let exact = prim(3.0) - prim(-2.0);
        assert!((q.value - exact).abs() <= 1e-12 * exact.abs());
    }

    #[test]
    fn cosine_over_half_period_vanishes() {
        let tol = Tolerance::default();
        let q = integrate_1d(f64::cos, Interval::new(0.0, PI).unwrap(), &tol).unwrap();
        assert!(q.value.abs() <= tol.abs.max(1e-15), "{}", q.value);
    }

    #[test]
    fn peaked_periodic_integrand_matches_trapezoid_oracle() {
        // Periodic analytic integrand: the trapezoid rule converges geometrically,
        // so a 10^7-point sum is an independent reference to ~1e-15.
        let f = |x: f64| 1.0 / (1.64 - 1.28 * (2.0 * x).cos());
        let n = 10_000_000usize;
        let h = PI / n as f64;
        let mut acc = 0.5 * (f(0.0) + f(PI));
        for i in 1..n {
            acc += f(i as f64 * h);
        }
        let oracle = acc * h;
        // closed form: π/sqrt(1.64² − 1.28²)
        assert!((oracle - PI / (1.64f64 * 1.64 - 1.28 * 1.28).sqrt()).abs() < 1e-12);
        let q = integrate_1d(f, Interval::new(0.0, PI).unwrap(), &Tolerance::default()).unwrap();
        assert!(
            (q.value - oracle).abs() <= 1e-8 * oracle,
            "{} vs {oracle}",
            q.value
        );
    }

    #[test]
    fn breakpoints_outside_interval_are_ignored() {
        let tol = Tolerance::default();
        let q = integrate_1d_with_breaks(|x| x, unit(), &[-1.0, 0.5, 0.5, 2.0, f64::NAN], &tol)
            .unwrap();
        assert!((q.value - 0.5).abs() < 1e-15);
        assert_eq!(q.evals, 42);
    }

    #[test]
    fn non_finite_integrand_reports_abscissa() {
        let tol = Tolerance::default();
        let err = integrate_1d(|x| if x > 0.5 { f64::NAN } else { 1.0 }, unit(), &tol).unwrap_err();
        match err {
            NumericsError::NonFiniteIntegrand { level, x } => {
                assert_eq!(level, Level::Single);
                assert!(x > 0.5 && x <= 1.0);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn budget_exhaustion_carries_estimate() {
        let tol = Tolerance::new(1e-14, 0.0, 100).unwrap();
        let err = integrate_1d(|x: f64| x.sqrt().sin() / x.powf(0.9), unit(), &tol).unwrap_err();
        match err {
            NumericsError::BudgetExhausted {
                estimate,
                error,
                evals,
                ..
            } => {
                assert!(estimate > 0.0 && error > 0.0);
                assert!(evals <= 100);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn two_d_examples() {
        let tol = Tolerance::default();
        let sq = |_| Some(unit());
        let q = integrate_2d(|_, _| 1.0, unit(), sq, &tol).unwrap();
        assert!((q.value - 1.0).abs() < 1e-14);
        let q = integrate_2d(|x, y| x * y, unit(), sq, &tol).unwrap();
        assert!((q.value - 0.25).abs() < 1e-14);
        let q = integrate_2d(
            |_, _| 1.0,
            unit(),
            |x| Interval::nonempty(0.0, (1.0 - x * x).max(0.0).sqrt()),
            &tol,
        )
        .unwrap();
        assert!((q.value - PI / 4.0).abs() <= 1e-8 * PI / 4.0, "{}", q.value);
    }

    #[test]
    fn empty_inner_range_contributes_zero() {
        let tol = Tolerance::default();
        let q = integrate_2d(
            |_, _| 1.0,
            Interval::new(0.0, 2.0).unwrap(),
            |x| Interval::nonempty(0.0, 1.0 - x),
            &tol,
        )
        .unwrap();
        assert!((q.value - 0.5).abs() < 1e-12, "{}", q.value);
    }

    #[test]
    fn inner_failure_is_identified() {
        let tol = Tolerance::default();
        let err = integrate_2d(
            |x, y| {
                if y > 0.5 && x > 0.5 {
                    f64::INFINITY
                } else {
                    0.0
                }
            },
            unit(),
            |_| Some(unit()),
            &tol,
        )
        .unwrap_err();
        assert!(matches!(
            err,
            NumericsError::NonFiniteIntegrand {
                level: Level::Inner,
                ..
            }
        ));
    }

    #[test]
    fn deterministic() {
        let tol = Tolerance::default();
        let f = |x: f64| (40.0 * x).cos() * (-x).exp();
        let a = integrate_1d(f, Interval::new(0.0, 3.0).unwrap(), &tol).unwrap();
        let b = integrate_1d(f, Interval::new(0.0, 3.0).unwrap(), &tol).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evals, b.evals);
    }
}
