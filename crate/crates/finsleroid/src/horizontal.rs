//! Three-dimensional Finsler geometry of horizontal sections: the positive
//! degree-1 function r_hat(v), its metric R_ab, curvature, determinant, and
//! the radius and induced metric of the level sections.

use crate::charfun;
use crate::core::Params;
use crate::deriv::Jet2;
use crate::error::{Error, Result};
use crate::inversion::theta_from_f;
use crate::linalg;
use crate::rootfind::solve_monotone;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

fn vperp(v: &Vec3) -> f64 {
    v[0].hypot(v[1])
}

fn check_v(v: &Vec3) -> Result<()> {
    if v[2] <= 0.0 || vperp(v) == 0.0 {
        return Err(Error::OnAxisSection { wperp: vperp(v), w3: v[2] });
    }
    Ok(())
}

/// r_hat(v) = v3 Ucheck(theta(f)) with f = C11 vperp/v3. Degree-1 positive
/// homogeneous and rotation invariant in (v1, v2).
pub fn r_hat(v: &Vec3, p: &Params) -> Result<f64> {
    check_v(v)?;
    let f = p.c11 * vperp(v) / v[2];
    let theta = theta_from_f(f, p)?;
    Ok(v[2] * charfun::ucheck(theta, p))
}

/// Jets of theta and r_hat in the three components of v.
fn r_jets(v: &Vec3, p: &Params) -> Result<(Jet2<3>, Jet2<3>)> {
    check_v(v)?;
    let v1 = Jet2::<3>::var(v[0], 0);
    let v2 = Jet2::<3>::var(v[1], 1);
    let v3 = Jet2::<3>::var(v[2], 2);
    let f = v1.hypot(&v2) / v3 * p.c11;
    let theta_v = theta_from_f(f.v, p)?;
    let (_, fd1, fd2) = charfun::fcheck_d2(theta_v, p);
    let theta = Jet2::from_inverse(&f, theta_v, fd1, fd2);
    let r = v3 * charfun::ucheck_jet(&theta, p);
    Ok((theta, r))
}

/// All derivative data of r_hat at one v. The Cartan-like tensor C_abc (half
/// the v-derivative of R_ab) uses one finite-difference layer on top of the
/// exact second derivatives.
#[derive(Debug, Clone)]
pub struct HorizontalBundle {
    pub v: Vec3,
    pub theta: f64,
    pub r: f64,
    pub r_a: Vec3,
    pub r_ab: Mat3,
    /// Finsler metric R_ab = r r_ab + r_a r_b
    pub rab: Mat3,
    /// h_ab = R_ab - r_a r_b = r r_ab
    pub h_ab: Mat3,
    pub c: [[[f64; 3]; 3]; 3],
    pub rstar: [[[[f64; 3]; 3]; 3]; 3],
}

fn metric_at(v: &Vec3, p: &Params) -> Result<Mat3> {
    let (_, r) = r_jets(v, p)?;
    let mut rab = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            rab[a][b] = r.v * r.h[a][b] + r.g[a] * r.g[b];
        }
    }
    Ok(rab)
}

pub fn horizontal_bundle(v: &Vec3, p: &Params) -> Result<HorizontalBundle> {
    let (theta, r) = r_jets(v, p)?;
    let mut rab = [[0.0; 3]; 3];
    let mut h_ab = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            h_ab[a][b] = r.v * r.h[a][b];
            rab[a][b] = h_ab[a][b] + r.g[a] * r.g[b];
        }
    }
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let step = f64::EPSILON.powf(0.2) * scale;
    let mut c = [[[0.0; 3]; 3]; 3];
    for n in 0..3 {
        let central = |h: f64| -> Result<Mat3> {
            let mut vp = *v;
            let mut vm = *v;
            vp[n] += h;
            vm[n] -= h;
            let gp = metric_at(&vp, p)?;
            let gm = metric_at(&vm, p)?;
            let mut d = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    d[a][b] = (gp[a][b] - gm[a][b]) / (2.0 * h);
                }
            }
            Ok(d)
        };
        let d1 = central(step)?;
        let d2 = central(2.0 * step)?;
        for a in 0..3 {
            for b in 0..3 {
                c[a][b][n] = 0.5 * (4.0 * d1[a][b] - d2[a][b]) / 3.0;
            }
        }
    }
    let mut sym = [[[0.0; 3]; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            for n in 0..3 {
                sym[a][b][n] =
                    (c[a][b][n] + c[a][n][b] + c[b][a][n] + c[b][n][a] + c[n][a][b] + c[n][b][a])
                        / 6.0;
            }
        }
    }
    let ri = linalg::inverse(&rab)
        .ok_or_else(|| Error::Domain("horizontal metric numerically singular".into()))?;
    let mut cup = [[[0.0; 3]; 3]; 3];
    for f in 0..3 {
        for b in 0..3 {
            for e in 0..3 {
                let mut s = 0.0;
                for d in 0..3 {
                    s += ri[f][d] * sym[d][b][e];
                }
                cup[f][b][e] = s;
            }
        }
    }
    let mut rstar = [[[[0.0; 3]; 3]; 3]; 3];
    for b in 0..3 {
        for a in 0..3 {
            for cc in 0..3 {
                for e in 0..3 {
                    let mut s = 0.0;
                    for f in 0..3 {
                        s += sym[a][f][cc] * cup[f][b][e] - sym[a][f][e] * cup[f][b][cc];
                    }
                    rstar[b][a][cc][e] = s;
                }
            }
        }
    }
    Ok(HorizontalBundle {
        v: *v,
        theta: theta.v,
        r: r.v,
        r_a: r.g,
        r_ab: r.h,
        rab,
        h_ab,
        c: sym,
        rstar,
    })
}

/// Relative residual of r^2 R*_bace = (P-1)(h_bc h_ae - h_be h_ac).
pub fn horizontal_curvature_check(bundle: &HorizontalBundle, p: &Params) -> f64 {
    let r2 = bundle.r * bundle.r;
    let k = p.p - 1.0;
    let h = &bundle.h_ab;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for b in 0..3 {
        for a in 0..3 {
            for c in 0..3 {
                for e in 0..3 {
                    let rhs = k * (h[b][c] * h[a][e] - h[b][e] * h[a][c]);
                    scale = scale.max(rhs.abs());
                    worst = worst.max((r2 * bundle.rstar[b][a][c][e] - rhs).abs());
                }
            }
        }
    }
    worst / scale.max(f64::MIN_POSITIVE)
}

/// Relative residual of the angle form h_ab = (r^2/P)(theta_a theta_b +
/// sin^2(theta) phi_a phi_b), with the angle gradients evaluated analytically.
pub fn angle_form_check(bundle: &HorizontalBundle, p: &Params) -> Result<f64> {
    let v = &bundle.v;
    let (theta, _) = r_jets(v, p)?;
    let v1 = Jet2::<3>::var(v[0], 0);
    let v2 = Jet2::<3>::var(v[1], 1);
    let phi = v1.atan2(&v2) / p.chat.sqrt();
    let st2 = theta.v.sin().powi(2);
    let k = bundle.r * bundle.r / p.p;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            let rhs = k * (theta.g[a] * theta.g[b] + st2 * phi.g[a] * phi.g[b]);
            scale = scale.max(bundle.h_ab[a][b].abs().max(rhs.abs()));
            worst = worst.max((bundle.h_ab[a][b] - rhs).abs());
        }
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

/// Relative residual of det(R_ab) against its closed form
/// I^6 (C11/C17)^4 C39^6 / (P^2 Chat^3 Y2^4).
pub fn determinant_check(bundle: &HorizontalBundle, p: &Params) -> f64 {
    let det = linalg::det3(&bundle.rab);
    let i = charfun::ifun(bundle.theta, p);
    let y2 = charfun::y2(bundle.theta, p);
    let closed = i.powi(6) * (p.c11 / p.c17).powi(4) * p.c39.powi(6)
        / (p.p * p.p * p.chat.powi(3) * y2.powi(4));
    (det - closed).abs() / closed.abs()
}

/// Residuals of the closed forms for the axial derivatives: (5.35) for
/// dr/dv3 and (5.37) for the radial-perpendicular derivative.
pub fn axial_derivative_checks(bundle: &HorizontalBundle, p: &Params) -> (f64, f64) {
    let v = &bundle.v;
    let vp = vperp(v);
    let u = charfun::ucheck(bundle.theta, p);
    let i = charfun::ifun(bundle.theta, p);
    let y2 = charfun::y2(bundle.theta, p);
    let common = (1.0 / u) * (1.0 / (y2 * y2)) * i * i * p.c11 * p.c11 * p.t
        * (p.c39 * p.c39 / (p.c17 * p.c17));
    let r3_closed = u - common * vp * vp / (v[2] * v[2]);
    let rp_closed = common * vp / v[2];
    let rp = (bundle.r_a[0] * v[0] + bundle.r_a[1] * v[1]) / vp;
    let s = |x: f64, y: f64| (x - y).abs() / y.abs().max(1.0);
    (s(bundle.r_a[2], r3_closed), s(rp, rp_closed))
}

/// Residual of the algebraic derivative identities of f = C11 vperp/v3:
/// f1 f1 + f f11 = C11^2/v3^2, f1 f2 + f f12 = 0,
/// f3 f3 + f f33 = 3 vperp^2 C11^2 / v3^4.
pub fn f_identity_check(v: &Vec3, p: &Params) -> Result<f64> {
    check_v(v)?;
    let v1 = Jet2::<3>::var(v[0], 0);
    let v2 = Jet2::<3>::var(v[1], 1);
    let v3 = Jet2::<3>::var(v[2], 2);
    let f = v1.hypot(&v2) / v3 * p.c11;
    let c2 = p.c11 * p.c11;
    let vp2 = vperp(v) * vperp(v);
    let checks = [
        (f.g[0] * f.g[0] + f.v * f.h[0][0], c2 / (v[2] * v[2])),
        (f.g[0] * f.g[1] + f.v * f.h[0][1], 0.0),
        (f.g[2] * f.g[2] + f.v * f.h[2][2], 3.0 * vp2 * c2 / v[2].powi(4)),
    ];
    let mut worst = 0.0f64;
    for (lhs, rhs) in checks {
        worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
    }
    // Euler degree-0 relation f_a v^a = 0
    let e: f64 = (0..3).map(|k| f.g[k] * v[k]).sum();
    Ok(worst.max(e.abs() / f.v))
}

/// Solve lambda Vcheck(eta*) = 1 and return (eta*, R_lambda = lambda rcheck(eta*)).
/// Valid iff 1/lambda lies below the supremum Vcheck(0+).
pub fn section_radius(lambda: f64, p: &Params) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda > 0 violated (lambda = {lambda})")));
    }
    let target = 1.0 / lambda;
    let sup = charfun::vcheck_limit0(p);
    if target >= sup {
        return Err(Error::Domain(format!(
            "1/lambda outside the range of Vcheck (1/lambda = {target}, sup = {sup})"
        )));
    }
    let mut hi = 1.0f64;
    while charfun::vcheck(hi, p) > target {
        hi *= 2.0;
        if hi > 700.0 {
            return Err(Error::Convergence { what: "section_radius", target, lo: 1e-9, hi });
        }
    }
    // Vcheck is strictly decreasing: negate to feed the monotone solver
    let eta_star = solve_monotone(|e| -charfun::vcheck(e, p), -target, 1e-9, hi, "section_radius")?;
    Ok((eta_star, lambda * charfun::rcheck(eta_star, p)))
}

/// Point of the section {r_hat = R} at the given angles: v3 = R/Ucheck(theta),
/// vperp = v3 fcheck(theta)/C11, azimuth alpha = sqrt(Chat)(phi - C*).
pub fn section_point(radius: f64, theta: f64, phi: f64, p: &Params) -> Result<Vec3> {
    if !(theta > 0.0 && theta < p.theta_c) {
        return Err(Error::Domain(format!("theta outside (0, theta_c): {theta}")));
    }
    let v3 = radius / charfun::ucheck(theta, p);
    let vp = v3 * charfun::fcheck(theta, p) / p.c11;
    let alpha = p.chat.sqrt() * (phi - p.cstar);
    Ok([vp * alpha.sin(), vp * alpha.cos(), v3])
}

/// Induced metric of the section {r_hat = R} in the (theta, phi) chart,
/// i_ab = t_a R_ab t_b with tangents by central differences of the embedding.
/// For the exact geometry this equals (R^2/P) diag(1, sin^2 theta): a round
/// sphere of radius R/sqrt(P), hence sectional curvature P/R^2.
pub fn section_metric(radius: f64, theta: f64, phi: f64, p: &Params) -> Result<[[f64; 2]; 2]> {
    let step = 1e-6;
    let mut t = [[0.0; 2]; 3];
    for k in 0..2 {
        let (tp, pp) = if k == 0 { (theta + step, phi) } else { (theta, phi + step) };
        let (tm, pm) = if k == 0 { (theta - step, phi) } else { (theta, phi - step) };
        let vp = section_point(radius, tp, pp, p)?;
        let vm = section_point(radius, tm, pm, p)?;
        for i in 0..3 {
            t[i][k] = (vp[i] - vm[i]) / (2.0 * step);
        }
    }
    let v = section_point(radius, theta, phi, p)?;
    let rab = metric_at(&v, p)?;
    let mut out = [[0.0; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += t[i][x] * rab[i][j] * t[j][y];
                }
            }
            out[x][y] = s;
        }
    }
    Ok(out)
}

/// Relative residual of the section metric against (R^2/P) diag(1, sin^2 theta).
pub fn section_metric_check(radius: f64, theta: f64, phi: f64, p: &Params) -> Result<f64> {
    let i = section_metric(radius, theta, phi, p)?;
    let k = radius * radius / p.p;
    let st2 = theta.sin().powi(2);
    let scale = k.max(k * st2);
    let worst = (i[0][0] - k)
        .abs()
        .max((i[1][1] - k * st2).abs())
        .max(i[0][1].abs())
        .max(i[1][0].abs());
    Ok(worst / scale)
}

/// Sectional curvature measured from the induced metric (1/i_thetatheta for a
/// round sphere in these coordinates); equals P/R^2 for the exact geometry.
pub fn section_curvature_measured(radius: f64, theta: f64, phi: f64, p: &Params) -> Result<f64> {
    let i = section_metric(radius, theta, phi, p)?;
    Ok(1.0 / i[0][0])
}
