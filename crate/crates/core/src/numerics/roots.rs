//! Bracketed root finding: bisection with a safeguarded Newton step.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("no sign change on [{a}, {b}] (f(a) = {fa:.3e}, f(b) = {fb:.3e})")]
    NotBracketed { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("function is not finite at x = {x}")]
    NonFinite { x: f64 },
}

/// Finds a root of `f` in `[a, b]` by bisection down to floating-point
/// resolution. Only the sign of `f` is used.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> Result<f64, RootError> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(RootError::NonFinite {
            x: if flo.is_finite() { hi } else { lo },
        });
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NotBracketed {
            a: lo,
            b: hi,
            fa: flo,
            fb: fhi,
        });
    }
    let lo_sign = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.is_nan() {
            return Err(RootError::NonFinite { x: mid });
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton iteration kept inside a shrinking bracket; falls back to bisection
/// whenever the Newton step leaves the bracket or stalls. `fdf` returns the
/// value and derivative.
pub fn safeguarded_newton<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    a: f64,
    b: f64,
    xtol: f64,
) -> Result<f64, RootError> {
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (flo, _) = fdf(lo);
    let (fhi, _) = fdf(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !(flo.is_finite() && fhi.is_finite()) {
        return Err(RootError::NotBracketed {
            a: lo,
            b: hi,
            fa: flo,
            fb: fhi,
        });
    }
    // orient so that f(lo) < 0
    if flo > 0.0 {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = fdf(x);
    if fx == 0.0 {
        return Ok(x);
    }
    for _ in 0..200 {
        let newton_leaves = ((x - hi) * dfx - fx) * ((x - lo) * dfx - fx) > 0.0;
        let newton_slow = (2.0 * fx).abs() > (dx_old * dfx).abs();
        dx_old = dx;
        if newton_leaves || newton_slow || dfx == 0.0 {
            dx = 0.5 * (hi - lo);
            x = lo + dx;
        } else {
            dx = fx / dfx;
            x -= dx;
        }
        if dx.abs() < xtol {
            return Ok(x);
        }
        let (f, df) = fdf(x);
        if !f.is_finite() {
            return Err(RootError::NonFinite { x });
        }
        fx = f;
        dfx = df;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
    }
    Ok(x)
}
