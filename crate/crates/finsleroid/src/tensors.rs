//! Pointwise tensor assembly: metric, orthonormal frame, Cartan tensor and its
//! frame expansion, curvature, expansion coefficients, and the induced metric
//! on the indicatrix.

use crate::charfun;
use crate::core::{Frame, Mat4, Params, Vec4};
use crate::deriv::{pipeline_jets, third_derivative, third_derivative_step, PipelineJets};
use crate::error::{Error, Result};
use crate::inversion::{indicatrix_point, AngleTriple};
use crate::linalg;

pub type Tensor3 = [[[f64; 4]; 4]; 4];
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// Everything tensorial at one tangent vector.
#[derive(Debug, Clone)]
pub struct TensorBundle {
    pub y: Vec4,
    pub f: f64,
    /// l_i = dF/dy^i
    pub l: Vec4,
    pub g: Mat4,
    pub ginv: Mat4,
    /// h_ij = g_ij - l_i l_j
    pub h: Mat4,
    /// covariant frame legs (g-norm -1 each): u_i = F eta_i/H,
    /// m_i = F sinh(eta) theta_i/H, p_i = F sinh(eta) sin(theta) phi_i/H
    pub u: Vec4,
    pub m: Vec4,
    pub p: Vec4,
    /// Cartan tensor C_ijn = (1/2) dg_ij/dy^n (one finite-difference layer)
    pub c: Tensor3,
    pub angles: AngleTriple,
    pub jets: PipelineJets,
}

pub fn bundle_at(y: &Vec4, frame: &Frame, p: &Params) -> Result<TensorBundle> {
    let jets = pipeline_jets(y, frame, p)?;
    let f = jets.f.v;
    let l = jets.f.g;
    let f2 = jets.f * jets.f;
    let mut g = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            g[a][b] = 0.5 * f2.h[a][b];
        }
    }
    let ginv = linalg::inverse(&g)
        .ok_or_else(|| Error::Domain("metric tensor numerically singular".into()))?;
    let mut h = g;
    for a in 0..4 {
        for b in 0..4 {
            h[a][b] -= l[a] * l[b];
        }
    }
    let (sh, st) = (jets.eta.v.sinh(), jets.theta.v.sin());
    let mut u = [0.0; 4];
    let mut m = [0.0; 4];
    let mut pv = [0.0; 4];
    for i in 0..4 {
        u[i] = f * jets.eta.g[i] / p.h;
        m[i] = f * sh * jets.theta.g[i] / p.h;
        pv[i] = f * sh * st * jets.phi.g[i] / p.h;
    }
    let c = third_derivative(y, frame, p, third_derivative_step(y, frame, p))?;
    Ok(TensorBundle {
        y: *y,
        f,
        l,
        g,
        ginv,
        h,
        u,
        m,
        p: pv,
        c,
        angles: AngleTriple { eta: jets.eta.v, theta: jets.theta.v, phi: jets.phi.v },
        jets,
    })
}

impl TensorBundle {
    /// Raise one covariant index with ginv.
    pub fn raise(&self, w: &Vec4) -> Vec4 {
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.ginv[i][j] * w[j];
            }
        }
        out
    }
}

/// The nonzero expansion coefficients of the angle hessians and the derived
/// combinations used by the Cartan expansion and the curvature relations.
#[derive(Debug, Clone, Copy)]
pub struct CoeffSet {
    pub u2: f64,
    pub u3: f64,
    pub u6: f64,
    pub z2: f64,
    pub z3: f64,
    pub z4: f64,
    pub r1: f64,
    pub r2: f64,
    pub r5: f64,
    pub l2: f64,
    pub l3: f64,
    pub lcap: f64,
    pub z2check: f64,
    pub z3check: f64,
    pub l2check: f64,
}

pub fn coefficients_at(a: &AngleTriple, p: &Params) -> Result<CoeffSet> {
    if !(a.eta > 0.0) {
        return Err(Error::Domain(format!("eta > 0 violated (eta = {})", a.eta)));
    }
    if !(a.theta > 0.0 && a.theta < p.theta_c) {
        return Err(Error::Domain(format!(
            "0 < theta < theta_c violated (theta = {})",
            a.theta
        )));
    }
    let h2 = p.h * p.h;
    let (sh, ch) = (a.eta.sinh(), a.eta.cosh());
    let (st, ct) = (a.theta.sin(), a.theta.cos());
    let u2 = h2 * charfun::r1(a.eta, p) / sh;
    let l2 = h2 * charfun::lhat(a.eta, p).sqrt() / sh;
    let u6 = l2 - h2 * (1.0 - h2) / l2;
    let z2check = h2 * charfun::r2(a.theta, p) / st;
    let l2check = z2check - h2 * ct / st;
    let z3check = l2check - h2 * h2 * (1.0 - 1.0 / p.p) / l2check;
    let z4 = (u2 * sh - 2.0 * h2 * ch) / (sh * sh);
    Ok(CoeffSet {
        u2,
        u3: u2,
        u6,
        z2: z2check / (sh * sh),
        z3: z3check / (sh * sh),
        z4,
        r1: (z2check * st - 2.0 * h2 * ct) / (sh * sh * st * st),
        r2: 0.0,
        r5: z4 / st,
        l2,
        l3: l2,
        lcap: l2check / sh,
        z2check,
        z3check,
        l2check,
    })
}

// Analytic angle-derivatives of the coefficients, used by the identity checks.

pub fn u2_eta(eta: f64, p: &Params) -> f64 {
    let h2 = p.h * p.h;
    let (sh, ch) = (eta.sinh(), eta.cosh());
    h2 * (charfun::r1_prime(eta, p) * sh - charfun::r1(eta, p) * ch) / (sh * sh)
}

pub fn l2_eta(eta: f64, p: &Params) -> f64 {
    let h2 = p.h * p.h;
    let (sh, ch) = (eta.sinh(), eta.cosh());
    let sl = charfun::lhat(eta, p).sqrt();
    h2 * (p.h1 * p.h1 * sh * ch / sl * sh - sl * ch) / (sh * sh)
}

pub fn z4_eta(eta: f64, p: &Params) -> f64 {
    let h2 = p.h * p.h;
    let (sh, ch) = (eta.sinh(), eta.cosh());
    let r1 = charfun::r1(eta, p);
    h2 * ((charfun::r1_prime(eta, p) - 2.0 * sh) * sh - 2.0 * ch * (r1 - 2.0 * ch)) / (sh * sh * sh)
}

pub fn r5_eta(eta: f64, theta: f64, p: &Params) -> f64 {
    z4_eta(eta, p) / theta.sin()
}

pub fn z2check_theta(theta: f64, p: &Params) -> f64 {
    let h2 = p.h * p.h;
    let (st, ct) = (theta.sin(), theta.cos());
    h2 * (charfun::r2_prime(theta, p) * st - charfun::r2(theta, p) * ct) / (st * st)
}

pub fn z2_theta(eta: f64, theta: f64, p: &Params) -> f64 {
    z2check_theta(theta, p) / eta.sinh().powi(2)
}

pub fn r1_theta(eta: f64, theta: f64, p: &Params) -> f64 {
    let h2 = p.h * p.h;
    let (st, ct) = (theta.sin(), theta.cos());
    let r2 = charfun::r2(theta, p);
    let sh = eta.sinh();
    h2 * ((charfun::r2_prime(theta, p) + 2.0 * st) * st - 2.0 * ct * (r2 - 2.0 * ct))
        / (sh * sh * st * st * st)
}

fn trip(a: &Vec4, b: &Vec4) -> Tensor3 {
    // a_i b_j b_n + a_n b_j b_i + a_j b_i b_n
    let mut t = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for n in 0..4 {
                t[i][j][n] = a[i] * b[j] * b[n] + a[n] * b[j] * b[i] + a[j] * b[i] * b[n];
            }
        }
    }
    t
}

/// The frame expansion of the Cartan tensor:
/// FH C_ijn = -u6 uuu - L3 (u,mm)sym - L2 (u,pp)sym - sinh(eta) z3 mmm
///            - L (m,pp)sym - r2 sinh(eta) sin(theta) ppp.
pub fn cartan_expansion(
    a: &AngleTriple,
    bundle: &TensorBundle,
    c: &CoeffSet,
    p: &Params,
) -> Tensor3 {
    let (sh, st) = (a.eta.sinh(), a.theta.sin());
    let tum = trip(&bundle.u, &bundle.m);
    let tup = trip(&bundle.u, &bundle.p);
    let tmp = trip(&bundle.m, &bundle.p);
    let scale = 1.0 / (bundle.f * p.h);
    let mut out = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for n in 0..4 {
                out[i][j][n] = -scale
                    * (c.u6 * bundle.u[i] * bundle.u[j] * bundle.u[n]
                        + c.l3 * tum[i][j][n]
                        + c.l2 * tup[i][j][n]
                        + sh * c.z3 * bundle.m[i] * bundle.m[j] * bundle.m[n]
                        + c.lcap * tmp[i][j][n]
                        + c.r2 * sh * st * bundle.p[i] * bundle.p[j] * bundle.p[n]);
            }
        }
    }
    out
}

/// R^hat_jpqn = C^h_pq C_hjn - C^h_pn C_hjq with the first index of C raised.
pub fn curvature_hat(bundle: &TensorBundle) -> Tensor4 {
    let mut cup = [[[0.0; 4]; 4]; 4];
    for h in 0..4 {
        for a in 0..4 {
            for b in 0..4 {
                let mut s = 0.0;
                for k in 0..4 {
                    s += bundle.ginv[h][k] * bundle.c[k][a][b];
                }
                cup[h][a][b] = s;
            }
        }
    }
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for j in 0..4 {
        for pi in 0..4 {
            for q in 0..4 {
                for n in 0..4 {
                    let mut s = 0.0;
                    for h in 0..4 {
                        s += cup[h][pi][q] * bundle.c[h][j][n] - cup[h][pi][n] * bundle.c[h][j][q];
                    }
                    r[j][pi][q][n] = s;
                }
            }
        }
    }
    r
}

/// Induced metric on the indicatrix, i_ab = -t^i_a h_ij t^j_b, with tangents
/// t^i_a = dl^i/d(angle_a) by central differences of the indicatrix embedding.
pub fn indicatrix_induced_metric(a: &AngleTriple, frame: &Frame, p: &Params) -> Result<[[f64; 3]; 3]> {
    let step = 1e-5;
    let mut t = [[0.0; 3]; 4];
    let vary = |k: usize, d: f64| -> AngleTriple {
        let mut v = *a;
        match k {
            0 => v.eta += d,
            1 => v.theta += d,
            _ => v.phi += d,
        }
        v
    };
    for k in 0..3 {
        let lp = indicatrix_point(&vary(k, step), frame, p)?;
        let lm = indicatrix_point(&vary(k, -step), frame, p)?;
        for i in 0..4 {
            t[i][k] = (lp[i] - lm[i]) / (2.0 * step);
        }
    }
    let l = indicatrix_point(a, frame, p)?;
    let bundle = bundle_lite(&l, frame, p)?;
    let mut out = [[0.0; 3]; 3];
    for x in 0..3 {
        for y in 0..3 {
            let mut s = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    s += t[i][x] * bundle.1[i][j] * t[j][y];
                }
            }
            out[x][y] = -s;
        }
    }
    Ok(out)
}

// (F, h_ij) without the Cartan tensor, for callers that only need the metric.
fn bundle_lite(y: &Vec4, frame: &Frame, p: &Params) -> Result<(f64, Mat4)> {
    let jets = pipeline_jets(y, frame, p)?;
    let f2 = jets.f * jets.f;
    let mut h = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            h[a][b] = 0.5 * f2.h[a][b] - jets.f.g[a] * jets.f.g[b];
        }
    }
    Ok((jets.f.v, h))
}

/// Expansion coefficients of the three angle hessians extracted by frame
/// projection: entry [x][y] is F^2 A^i X_ij B^j with (A, B) running over the
/// contravariant legs (u, m, p). Row/column order: u, m, p.
#[derive(Debug, Clone, Copy)]
pub struct ExtractedSlots {
    pub eta: [[f64; 3]; 3],
    pub theta: [[f64; 3]; 3],
    pub phi: [[f64; 3]; 3],
}

pub fn extract_slots(bundle: &TensorBundle) -> ExtractedSlots {
    let legs = [bundle.raise(&bundle.u), bundle.raise(&bundle.m), bundle.raise(&bundle.p)];
    let f2 = bundle.f * bundle.f;
    let project = |hess: &Mat4| -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (x, a) in legs.iter().enumerate() {
            for (y, b) in legs.iter().enumerate() {
                let mut s = 0.0;
                for i in 0..4 {
                    for j in 0..4 {
                        s += a[i] * hess[i][j] * b[j];
                    }
                }
                out[x][y] = f2 * s;
            }
        }
        out
    };
    ExtractedSlots {
        eta: project(&bundle.jets.eta.h),
        theta: project(&bundle.jets.theta.h),
        phi: project(&bundle.jets.phi.h),
    }
}
