use serde::{Deserialize, Serialize};

use super::{Interval, NumericsError, Tolerance};
use crate::exec::{self, Execution};

/// Lower bound on the number of grid samples in the global scan.
pub const MIN_GRID_SAMPLES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Global maximum of `f` on `iv`: a uniform scan over [`MIN_GRID_SAMPLES`] + 1
/// points picks the best cell, golden-section search narrows it, and a final
/// bracketed solve on the central-difference slope polishes the abscissa past
/// the `sqrt(eps)` limit of value comparisons.
pub fn find_max<F>(f: F, iv: Interval, tol: &Tolerance) -> Result<Maximum, NumericsError>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    find_max_with(
        |x| {
            let y = f(x);
            if y.is_finite() {
                Ok(y)
            } else {
                Err(NumericsError::NonFiniteValue { x })
            }
        },
        iv,
        tol,
        Execution::Sequential,
    )
}

/// Fallible, optionally parallel form of [`find_max`]. Only the grid scan is
/// parallelized.
pub fn find_max_with<F, E>(
    f: F,
    iv: Interval,
    tol: &Tolerance,
    execution: Execution,
) -> Result<Maximum, E>
where
    F: Fn(f64) -> Result<f64, E> + Sync + Send,
    E: From<NumericsError> + Send,
{
    let checked = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteValue { x }.into())
        }
    };

    let n = MIN_GRID_SAMPLES;
    let step = iv.width() / n as f64;
    let xs: Vec<f64> = (0..=n)
        .map(|i| {
            if i == n {
                iv.hi()
            } else {
                iv.lo() + i as f64 * step
            }
        })
        .collect();
    let ys = exec::try_map(execution, &xs, |&x| checked(x))?;
    let best = ys
        .iter()
        .enumerate()
        .fold(0, |b, (i, y)| if *y > ys[b] { i } else { b });

    let cell = Interval::new(xs[best.saturating_sub(1)], xs[(best + 1).min(n)])?;
    let local = refine_max_with(&f, cell, tol)?;
    Ok(if local.value >= ys[best] {
        local
    } else {
        Maximum {
            x: xs[best],
            value: ys[best],
        }
    })
}

/// Local stage of [`find_max_with`]: golden-section search on `cell`, then a
/// bisection on the sign of the central-difference slope. Assumes a single
/// peak inside `cell`.
pub fn refine_max_with<F, E>(f: F, cell: Interval, tol: &Tolerance) -> Result<Maximum, E>
where
    F: Fn(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    let checked = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteValue { x }.into())
        }
    };
    let xtol = |x: f64| {
        tol.abs
            .max(tol.rel * x.abs())
            .max(4.0 * f64::EPSILON * x.abs())
    };
    let (lo0, hi0) = (cell.lo(), cell.hi());
    let (mut a, mut b) = (lo0, hi0);
    let (mut best_x, mut best_y) = {
        let (fa, fb) = (checked(a)?, checked(b)?);
        if fa >= fb {
            (a, fa)
        } else {
            (b, fb)
        }
    };

    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = checked(c)?;
    let mut fd = checked(d)?;
    let mut evals = 4;
    // value comparisons stop resolving a smooth peak long before 1e-4 of the cell
    let floor = 1e-4 * cell.width();
    while (b - a) > xtol(0.5 * (a + b)).max(floor) && evals < tol.max_evals {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = checked(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = checked(d)?;
        }
        evals += 1;
    }
    for (x, y) in [(c, fc), (d, fd)] {
        if y > best_y {
            best_x = x;
            best_y = y;
        }
    }

    let h = 0.25 * (b - a).max(xtol(best_x));
    let lo = (a - (b - a)).max(lo0 + h);
    let hi = (b + (b - a)).min(hi0 - h);
    if lo < hi {
        let slope =
            |x: f64| -> Result<f64, E> { Ok((checked(x + h)? - checked(x - h)?) / (2.0 * h)) };
        if slope(lo)? > 0.0 && slope(hi)? < 0.0 {
            let (mut l, mut r) = (lo, hi);
            // bisection is cheap relative to the value comparisons above, so
            // run it down to rounding level
            while r - l > 4.0 * f64::EPSILON * (0.5 * (l + r)).abs() && evals < tol.max_evals {
                let m = 0.5 * (l + r);
                if slope(m)? > 0.0 {
                    l = m;
                } else {
                    r = m;
                }
                evals += 2;
            }
            let x = 0.5 * (l + r);
            let y = checked(x)?;
            // the polished point sits on the plateau; keep it unless clearly worse
            if y >= best_y - 1e-12 * best_y.abs() {
                best_x = x;
                best_y = y;
            }
        }
    }

    Ok(Maximum {
        x: best_x,
        value: best_y,
    })
}
