use super::{Interval, NumericsError, Tolerance};

/// Brent's method on a sign-changing bracket.
///
/// Converges when the bracket is narrower than `max(tol.abs, tol.rel·|x|)`
/// (never tighter than a few ulps). Interpolation steps that would leave the
/// bracket or fail to shrink it fast enough fall back to bisection.
pub fn find_root<F>(f: F, bracket: Interval, tol: &Tolerance) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    find_root_with(|x| Ok(f(x)), bracket, tol)
}

/// Fallible form of [`find_root`]; errors from `f` abort the search.
pub fn find_root_with<F, E>(f: F, bracket: Interval, tol: &Tolerance) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
    E: From<NumericsError>,
{
    let eval = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(NumericsError::NonFiniteValue { x }.into())
        }
    };

    let (mut a, mut b) = (bracket.lo(), bracket.hi());
    let (mut fa, mut fb) = (eval(a)?, eval(b)?);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::NoSignChange {
            lo: a,
            hi: b,
            f_lo: fa,
            f_hi: fb,
        }
        .into());
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    let mut evals = 2usize;

    while evals < tol.max_evals {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }

        let xtol = 0.5 * tol.abs.max(tol.rel * b.abs()) + 2.0 * f64::EPSILON * b.abs();
        let m = 0.5 * (c - b);
        if m.abs() <= xtol || fb == 0.0 {
            return Ok(b);
        }

        if e.abs() >= xtol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                // inverse quadratic
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (xtol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }

        a = b;
        fa = fb;
        b += if d.abs() > xtol { d } else { xtol.copysign(m) };
        fb = eval(b)?;
        evals += 1;
    }

    let (lo, hi) = if b < c { (b, c) } else { (c, b) };
    Err(NumericsError::RootBudgetExhausted { lo, hi, evals }.into())
}
