//! Bracketed root finding for strictly monotone scalar functions.

use crate::error::{Error, Result};

const REL_TOL: f64 = 1e-14;
const MAX_ITER: usize = 60;

/// Solve g(x) = target on [lo, hi], where g is continuous and strictly
/// monotone so the bracket is total. Bisection-safeguarded secant steps,
/// relative abscissa tolerance 1e-14.
pub fn solve_monotone(
    g: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    what: &'static str,
) -> Result<f64> {
    let mut flo = g(lo) - target;
    let mut fhi = g(hi) - target;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::Convergence { what, target, lo, hi });
    }
    let mut x = 0.5 * (lo + hi);
    // Illinois false position: the weight on a stuck endpoint is halved, which
    // guarantees the bracket shrinks and keeps superlinear local convergence.
    let mut stuck = 0i8;
    for _ in 0..MAX_ITER {
        let xs = (lo * fhi - hi * flo) / (fhi - flo);
        let mid = 0.5 * (lo + hi);
        x = if xs.is_finite() && xs > lo && xs < hi { xs } else { mid };
        let fx = g(x) - target;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if stuck == 1 {
                fhi *= 0.5;
            }
            stuck = 1;
        } else {
            hi = x;
            fhi = fx;
            if stuck == -1 {
                flo *= 0.5;
            }
            stuck = -1;
        }
        if hi - lo <= REL_TOL * lo.abs().max(hi.abs()).max(1e-300) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(x)
}
