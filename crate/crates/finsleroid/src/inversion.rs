//! Bidirectional map between tangent vectors and the angle triple, and
//! evaluation of the metric function F = b Vcheck(eta).

use serde::Serialize;

use crate::charfun;
use crate::core::{decompose, Frame, Params, Vec4};
use crate::error::{Error, Result};
use crate::rootfind::solve_monotone;

/// The angle chart: eta in (0, inf), theta in (0, theta_c), phi real
/// (principal branch: sqrt(Chat)(phi - C*) in (-pi/2, pi/2)).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AngleTriple {
    pub eta: f64,
    pub theta: f64,
    pub phi: f64,
}

const MARGIN: f64 = 1e-9;

/// Unique theta in (0, theta_c) with fcheck(theta) = f. fcheck is strictly
/// increasing from 0 to +inf, so bracketing is total; the bracket is grown by
/// halving toward each endpoint of the open interval.
pub fn theta_from_f(f: f64, p: &Params) -> Result<f64> {
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::Domain(format!("f > 0 violated (f = {f})")));
    }
    let tc = p.theta_c;
    let mut lo = 0.5 * tc;
    let mut k = 0;
    while charfun::fcheck(lo, p) > f {
        lo *= 0.5;
        k += 1;
        if k > 4000 || lo < 1e-300 {
            return Err(Error::Convergence { what: "theta_from_f", target: f, lo, hi: tc });
        }
    }
    let mut gap = 0.5 * tc;
    let mut hi = tc - gap;
    k = 0;
    while charfun::fcheck(hi.max(lo + f64::EPSILON), p) < f {
        gap *= 0.5;
        hi = tc - gap;
        k += 1;
        if k > 600 {
            return Err(Error::Convergence { what: "theta_from_f", target: f, lo, hi });
        }
    }
    solve_monotone(|t| charfun::fcheck(t, p), f, lo, hi.max(lo + f64::EPSILON), "theta_from_f")
}

/// Unique eta in (0, inf) with rcheck(eta) = r. rcheck is strictly increasing
/// and bounded by r_sup, so values at or above the supremum are outside the
/// chart and rejected.
pub fn eta_from_r(r: f64, p: &Params) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("r > 0 violated (r = {r})")));
    }
    let sup = charfun::r_sup(p);
    if r >= sup {
        return Err(Error::Domain(format!(
            "r outside the bounded range of rcheck (r = {r}, sup = {sup})"
        )));
    }
    let mut lo = 1.0f64;
    let mut k = 0;
    while charfun::rcheck(lo, p) > r {
        lo *= 0.5;
        k += 1;
        if k > 4000 || lo < 1e-300 {
            return Err(Error::Convergence { what: "eta_from_r", target: r, lo, hi: 40.0 });
        }
    }
    let mut hi = lo.max(1.0);
    while charfun::rcheck(hi, p) < r {
        hi *= 2.0;
        if hi > 45.0 {
            hi = 45.0;
            break;
        }
    }
    solve_monotone(|e| charfun::rcheck(e, p), r, lo, hi, "eta_from_r")
}

/// Decompose a tangent vector into its angle triple and F.
pub fn angles_from_tangent(y: &Vec4, frame: &Frame, p: &Params) -> Result<(AngleTriple, f64)> {
    let sv = decompose(y, frame)?;
    if sv.w3 <= 0.0 || sv.wperp == 0.0 {
        return Err(Error::OnAxisSection { wperp: sv.wperp, w3: sv.w3 });
    }
    let f = p.c11 * sv.wperp / sv.w3;
    let theta = theta_from_f(f, p)?;
    let r = sv.w3 * charfun::ucheck(theta, p);
    let eta = eta_from_r(r, p)?;
    let phi = sv.w1.atan2(sv.w2) / p.chat.sqrt() + p.cstar;
    let fval = sv.b * charfun::vcheck(eta, p);
    Ok((AngleTriple { eta, theta, phi }, fval))
}

/// F at a tangent vector.
pub fn f_value(y: &Vec4, frame: &Frame, p: &Params) -> Result<f64> {
    Ok(angles_from_tangent(y, frame, p)?.1)
}

/// Reconstruct the tangent vector with the given angles and b-component.
/// Requires the principal branch sqrt(Chat)(phi - C*) in (-pi/2, pi/2), where
/// this is a true inverse of angles_from_tangent.
pub fn tangent_from_angles(a: &AngleTriple, bval: f64, frame: &Frame, p: &Params) -> Result<Vec4> {
    if !(bval > 0.0) {
        return Err(Error::OutsideBLikeRegion { b: bval });
    }
    if !(a.eta > 0.0) {
        return Err(Error::Domain(format!("eta > 0 violated (eta = {})", a.eta)));
    }
    if !(a.theta > 0.0 && a.theta < p.theta_c) {
        return Err(Error::Domain(format!(
            "0 < theta < theta_c violated (theta = {}, theta_c = {})",
            a.theta, p.theta_c
        )));
    }
    let alpha = p.chat.sqrt() * (a.phi - p.cstar);
    if !(alpha > -std::f64::consts::FRAC_PI_2 + MARGIN
        && alpha < std::f64::consts::FRAC_PI_2 - MARGIN)
    {
        return Err(Error::Domain(format!(
            "phi outside the principal branch: sqrt(Chat)(phi - C*) = {alpha}"
        )));
    }
    let r = charfun::rcheck(a.eta, p);
    let u = charfun::ucheck(a.theta, p);
    let w3 = r / u;
    let f = charfun::fcheck(a.theta, p);
    let wperp = w3 * f / p.c11;
    let (w1, w2) = (wperp * alpha.sin(), wperp * alpha.cos());
    let mut y = [0.0; 4];
    for i in 0..4 {
        y[i] = bval * (frame.b[i] + w1 * frame.i[i] + w2 * frame.j[i] + w3 * frame.i3[i]);
    }
    Ok(y)
}

/// The unit vector l = y/F with the given angles: the indicatrix point.
pub fn indicatrix_point(a: &AngleTriple, frame: &Frame, p: &Params) -> Result<Vec4> {
    let bval = 1.0 / charfun::vcheck(a.eta, p);
    tangent_from_angles(a, bval, frame, p)
}
