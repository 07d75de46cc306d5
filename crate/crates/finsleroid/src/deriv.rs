//! Forward-mode differentiation carrying exact first and second derivatives
//! through every scalar pipeline, including the root-finding inversions (handled
//! by the inverse-function rule, never by differentiating the iteration).

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::charfun;
use crate::core::{dot4, Frame, Mat4, Params, Vec4};
use crate::error::{Error, Result};
use crate::inversion;

/// Truncated second-order Taylor data of a scalar quantity with respect to N
/// independent variables: value, gradient, and symmetric Hessian. All chain,
/// product, and quotient rules are exact (no truncation error at orders <= 2).
#[derive(Debug, Clone, Copy)]
pub struct Jet2<const N: usize> {
    pub v: f64,
    pub g: [f64; N],
    pub h: [[f64; N]; N],
}

impl<const N: usize> Jet2<N> {
    pub fn constant(v: f64) -> Self {
        Jet2 { v, g: [0.0; N], h: [[0.0; N]; N] }
    }

    /// The k-th independent variable with the given value.
    pub fn var(v: f64, k: usize) -> Self {
        let mut g = [0.0; N];
        g[k] = 1.0;
        Jet2 { v, g, h: [[0.0; N]; N] }
    }

    /// Composition with a univariate function given by (f, f', f'') at self.v.
    pub fn chain(&self, f: f64, df: f64, ddf: f64) -> Self {
        let mut out = Jet2 { v: f, g: [0.0; N], h: [[0.0; N]; N] };
        for a in 0..N {
            out.g[a] = df * self.g[a];
            for b in 0..N {
                out.h[a][b] = df * self.h[a][b] + ddf * self.g[a] * self.g[b];
            }
        }
        out
    }

    /// Composition with a bivariate function of (self, other) given by its value
    /// and partial derivatives at the point.
    #[allow(clippy::too_many_arguments)]
    pub fn binary(&self, o: &Self, f: f64, fx: f64, fy: f64, fxx: f64, fxy: f64, fyy: f64) -> Self {
        let mut out = Jet2 { v: f, g: [0.0; N], h: [[0.0; N]; N] };
        for a in 0..N {
            out.g[a] = fx * self.g[a] + fy * o.g[a];
            for b in 0..N {
                out.h[a][b] = fx * self.h[a][b]
                    + fy * o.h[a][b]
                    + fxx * self.g[a] * self.g[b]
                    + fxy * (self.g[a] * o.g[b] + o.g[a] * self.g[b])
                    + fyy * o.g[a] * o.g[b];
            }
        }
        out
    }

    /// Jet of x where forward(x) = target and the forward map has derivatives
    /// (d1, d2) at x: the inverse-function rule at a root-finding node.
    pub fn from_inverse(target: &Self, x: f64, d1: f64, d2: f64) -> Self {
        let mut out = Jet2 { v: x, g: [0.0; N], h: [[0.0; N]; N] };
        for a in 0..N {
            out.g[a] = target.g[a] / d1;
        }
        for a in 0..N {
            for b in 0..N {
                out.h[a][b] = (target.h[a][b] - d2 * out.g[a] * out.g[b]) / d1;
            }
        }
        out
    }

    pub fn recip(&self) -> Self {
        let iv = 1.0 / self.v;
        self.chain(iv, -iv * iv, 2.0 * iv * iv * iv)
    }
    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }
    pub fn ln(&self) -> Self {
        self.chain(self.v.ln(), 1.0 / self.v, -1.0 / (self.v * self.v))
    }
    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    pub fn sinh(&self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh(), self.v.sinh())
    }
    pub fn cosh(&self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh(), self.v.cosh())
    }
    pub fn sin(&self) -> Self {
        self.chain(self.v.sin(), self.v.cos(), -self.v.sin())
    }
    pub fn cos(&self) -> Self {
        self.chain(self.v.cos(), -self.v.sin(), -self.v.cos())
    }
    pub fn atan(&self) -> Self {
        let d = 1.0 + self.v * self.v;
        self.chain(self.v.atan(), 1.0 / d, -2.0 * self.v / (d * d))
    }
    pub fn powf(&self, e: f64) -> Self {
        let v = self.v;
        self.chain(v.powf(e), e * v.powf(e - 1.0), e * (e - 1.0) * v.powf(e - 2.0))
    }
    pub fn hypot(&self, o: &Self) -> Self {
        (*self * *self + *o * *o).sqrt()
    }
    /// Full-quadrant planar angle of (self, other) = (y, x).
    pub fn atan2(&self, o: &Self) -> Self {
        let (y, x) = (self.v, o.v);
        let q = x * x + y * y;
        let q2 = q * q;
        self.binary(
            o,
            y.atan2(x),
            x / q,
            -y / q,
            -2.0 * x * y / q2,
            (y * y - x * x) / q2,
            2.0 * x * y / q2,
        )
    }
}

impl<const N: usize> Add for Jet2<N> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        self.v += o.v;
        for a in 0..N {
            self.g[a] += o.g[a];
            for b in 0..N {
                self.h[a][b] += o.h[a][b];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Jet2<N> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<const N: usize> Neg for Jet2<N> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.v = -self.v;
        for a in 0..N {
            self.g[a] = -self.g[a];
            for b in 0..N {
                self.h[a][b] = -self.h[a][b];
            }
        }
        self
    }
}

impl<const N: usize> Mul for Jet2<N> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut out = Jet2 { v: self.v * o.v, g: [0.0; N], h: [[0.0; N]; N] };
        for a in 0..N {
            out.g[a] = self.g[a] * o.v + self.v * o.g[a];
            for b in 0..N {
                out.h[a][b] = self.h[a][b] * o.v
                    + self.v * o.h[a][b]
                    + self.g[a] * o.g[b]
                    + o.g[a] * self.g[b];
            }
        }
        out
    }
}

impl<const N: usize> Div for Jet2<N> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<const N: usize> Add<f64> for Jet2<N> {
    type Output = Self;
    fn add(mut self, c: f64) -> Self {
        self.v += c;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet2<N> {
    type Output = Self;
    fn sub(self, c: f64) -> Self {
        self + (-c)
    }
}

impl<const N: usize> Mul<f64> for Jet2<N> {
    type Output = Self;
    fn mul(mut self, c: f64) -> Self {
        self.v *= c;
        for a in 0..N {
            self.g[a] *= c;
            for b in 0..N {
                self.h[a][b] *= c;
            }
        }
        self
    }
}

impl<const N: usize> Div<f64> for Jet2<N> {
    type Output = Self;
    fn div(self, c: f64) -> Self {
        self * (1.0 / c)
    }
}

impl<const N: usize> Mul<Jet2<N>> for f64 {
    type Output = Jet2<N>;
    fn mul(self, j: Jet2<N>) -> Jet2<N> {
        j * self
    }
}

impl<const N: usize> Add<Jet2<N>> for f64 {
    type Output = Jet2<N>;
    fn add(self, j: Jet2<N>) -> Jet2<N> {
        j + self
    }
}

impl<const N: usize> Sub<Jet2<N>> for f64 {
    type Output = Jet2<N>;
    fn sub(self, j: Jet2<N>) -> Jet2<N> {
        -j + self
    }
}

impl<const N: usize> Div<Jet2<N>> for f64 {
    type Output = Jet2<N>;
    fn div(self, j: Jet2<N>) -> Jet2<N> {
        j.recip() * self
    }
}

/// All first/second derivative data of the metric pipeline at one tangent vector:
/// the 1-form values, the three angles, and F, each as a jet in y.
#[derive(Debug, Clone)]
pub struct PipelineJets {
    pub b: Jet2<4>,
    pub eta: Jet2<4>,
    pub theta: Jet2<4>,
    pub phi: Jet2<4>,
    pub f: Jet2<4>,
}

fn form_jet(coeffs: &Vec4, y: &Vec4) -> Jet2<4> {
    let mut out = Jet2::constant(dot4(coeffs, y));
    out.g = *coeffs;
    out
}

/// Evaluate the full pipeline (angles and F) with exact derivatives at y.
pub fn pipeline_jets(y: &Vec4, frame: &Frame, p: &Params) -> Result<PipelineJets> {
    let b = form_jet(&frame.b, y);
    let iv = form_jet(&frame.i, y);
    let jv = form_jet(&frame.j, y);
    let i3 = form_jet(&frame.i3, y);
    if b.v <= 0.0 {
        return Err(Error::OutsideBLikeRegion { b: b.v });
    }
    let wperp_b = iv.hypot(&jv); // b * wperp
    if i3.v <= 0.0 || wperp_b.v == 0.0 {
        return Err(Error::OnAxisSection { wperp: wperp_b.v / b.v, w3: i3.v / b.v });
    }

    let fq = wperp_b / i3 * p.c11; // degree-0 in y
    let theta_v = inversion::theta_from_f(fq.v, p)?;
    let (_, fd1, fd2) = charfun::fcheck_d2(theta_v, p);
    let theta = Jet2::from_inverse(&fq, theta_v, fd1, fd2);

    let u = charfun::ucheck_jet(&theta, p);
    let r = i3 / b * u; // r = w3 * U(theta)
    let eta_v = inversion::eta_from_r(r.v, p)?;
    let (_, rd1, rd2) = charfun::rcheck_d2(eta_v, p);
    let eta = Jet2::from_inverse(&r, eta_v, rd1, rd2);

    let f = b * charfun::vcheck_jet(&eta, p);
    let phi = iv.atan2(&jv) / p.chat.sqrt() + p.cstar;
    Ok(PipelineJets { b, eta, theta, phi, f })
}

/// Jet of F at y.
pub fn f_jet(y: &Vec4, frame: &Frame, p: &Params) -> Result<Jet2<4>> {
    Ok(pipeline_jets(y, frame, p)?.f)
}

/// Metric tensor g_ij = (1/2) d^2(F^2)/dy dy from the exact Hessian.
pub fn metric_at(y: &Vec4, frame: &Frame, p: &Params) -> Result<[[f64; 4]; 4]> {
    let f = f_jet(y, frame, p)?;
    let f2 = f * f;
    let mut g = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            g[a][b] = 0.5 * f2.h[a][b];
        }
    }
    Ok(g)
}

/// Default step for the single finite-difference layer used for third
/// derivatives: cube root of machine epsilon times the scale of y.
/// Step for the finite-difference layer. Two effects shrink the usable step
/// below the naive eps^(1/5) |y|: tiny transverse or axial components (the
/// stencil must stay inside the admissible cone), and the conditioning of the
/// eta inversion, which degrades like sinh(eta) R1(eta) as rcheck flattens
/// toward its supremum.
pub fn third_derivative_step(y: &Vec4, frame: &Frame, p: &Params) -> f64 {
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let s = match crate::core::decompose(y, frame) {
        Ok(sv) => (sv.b * sv.wperp.min(sv.w3).min(1.0)).min(scale).max(1e-9 * scale),
        Err(_) => scale,
    };
    let cond = match inversion::angles_from_tangent(y, frame, p) {
        Ok((a, _)) => (a.eta.sinh() * charfun::r1(a.eta, p)).max(1.0),
        Err(_) => 1.0,
    };
    f64::EPSILON.powf(0.2) * s / cond
}

/// C_ijn = (1/2) dg_ij/dy^n by Richardson-extrapolated central differences of
/// the exact metric, symmetrized over all index permutations.
pub fn third_derivative(y: &Vec4, frame: &Frame, p: &Params, step: f64) -> Result<[[[f64; 4]; 4]; 4]> {
    let mut c = [[[0.0; 4]; 4]; 4];
    for n in 0..4 {
        let central = |h: f64| -> Result<Mat4> {
            let mut yp = *y;
            let mut ym = *y;
            yp[n] += h;
            ym[n] -= h;
            let gp = metric_at(&yp, frame, p)?;
            let gm = metric_at(&ym, frame, p)?;
            let mut d = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    d[i][j] = (gp[i][j] - gm[i][j]) / (2.0 * h);
                }
            }
            Ok(d)
        };
        let d1 = central(step)?;
        let d2 = central(2.0 * step)?;
        for i in 0..4 {
            for j in 0..4 {
                c[i][j][n] = 0.5 * (4.0 * d1[i][j] - d2[i][j]) / 3.0;
            }
        }
    }
    let mut sym = [[[0.0; 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for n in 0..4 {
                sym[i][j][n] =
                    (c[i][j][n] + c[i][n][j] + c[j][i][n] + c[j][n][i] + c[n][i][j] + c[n][j][i])
                        / 6.0;
            }
        }
    }
    Ok(sym)
}
