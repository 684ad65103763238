use super::NumericsError;

/// Central difference `(f(x+h) − f(x−h)) / 2h`.
pub fn derivative<F>(f: F, x: f64, h: f64) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(NumericsError::InvalidStep(h));
    }
    let (xp, xm) = (x + h, x - h);
    let (fp, fm) = (f(xp), f(xm));
    if !fp.is_finite() {
        return Err(NumericsError::NonFiniteValue { x: xp });
    }
    if !fm.is_finite() {
        return Err(NumericsError::NonFiniteValue { x: xm });
    }
    Ok((fp - fm) / (xp - xm))
}
