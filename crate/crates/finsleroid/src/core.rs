//! Parameter validation, the orthonormal background frame, and decomposition of
//! tangent vectors into the scalar variables used by the separation scheme.

use serde::{Deserialize, Serialize};

use crate::charfun::Perturbation;
use crate::error::{Error, Result};

/// The scalar constants defining one pseudo-Finsleroid space, with all derived
/// quantities precomputed. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Params {
    pub h: f64,
    pub t: f64,
    pub chat: f64,
    // normalization scalars
    pub c1: f64,
    pub c2check: f64,
    pub c17: f64,
    pub c39: f64,
    pub c11: f64,
    pub cstar: f64,
    // derived
    pub p: f64,
    pub c: f64,
    pub c7: f64,
    pub h1: f64,
    pub s1: f64,
    pub lhat1: f64,
    pub n: f64,
    pub a: f64,
    /// Upper boundary of the polar-angle domain: cos(theta_c) = -sqrt((T-1)/T).
    pub theta_c: f64,
    /// Optional multiplicative defect injected into one characteristic function,
    /// used by the verifier's negative controls. `Perturbation::None` normally.
    pub pert: Perturbation,
}

/// JSON document shape for parameter input. Missing normalization keys default
/// to 1 (C* to 0).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawParams {
    #[serde(rename = "H")]
    pub h: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Chat")]
    pub chat: f64,
    #[serde(rename = "C1", default = "one")]
    pub c1: f64,
    #[serde(rename = "C2check", default = "one")]
    pub c2check: f64,
    #[serde(rename = "C17", default = "one")]
    pub c17: f64,
    #[serde(rename = "C39", default = "one")]
    pub c39: f64,
    #[serde(rename = "C11", default = "one")]
    pub c11: f64,
    #[serde(rename = "Cstar", default)]
    pub cstar: f64,
}

fn one() -> f64 {
    1.0
}

pub fn validate_params(raw: &RawParams) -> Result<Params> {
    let RawParams { h, t, chat, c1, c2check, c17, c39, c11, cstar } = *raw;
    if !(h > 1.0) {
        return Err(Error::Domain(format!("H > 1 violated (H = {h})")));
    }
    if !(t > 1.0) {
        return Err(Error::Domain(format!("T > 1 violated (T = {t})")));
    }
    if !(chat > 0.0 && chat < 1.0) {
        return Err(Error::Domain(format!("0 < Chat < 1 violated (Chat = {chat})")));
    }
    if !(t * chat < 1.0) {
        return Err(Error::Domain(format!("TChat < 1 violated (TChat = {})", t * chat)));
    }
    for (name, v) in [
        ("C1", c1),
        ("C2check", c2check),
        ("C17", c17),
        ("C39", c39),
        ("C11", c11),
    ] {
        if !(v > 0.0) {
            return Err(Error::Domain(format!("{name} > 0 violated ({name} = {v})")));
        }
    }
    let p = 1.0 / (t * chat);
    let h1 = (1.0 - 1.0 / (h * h)).sqrt();
    let s1 = (1.0 - 1.0 / p).sqrt();
    Ok(Params {
        h,
        t,
        chat,
        c1,
        c2check,
        c17,
        c39,
        c11,
        cstar,
        p,
        c: 1.0 / chat,
        c7: 1.0 / p,
        h1,
        s1,
        lhat1: h1 / s1,
        // Sign-indefinite in general: negative whenever 1/H^2 < 1/P. Exposed, not constrained.
        n: (1.0 - 1.0 / (h * h)) / (1.0 / (h * h) - 1.0 / p),
        a: (1.0 - chat) / (chat * (t - 1.0)),
        theta_c: (-((t - 1.0) / t).sqrt()).acos(),
        pert: Perturbation::None,
    })
}

impl Params {
    pub fn new(h: f64, t: f64, chat: f64) -> Result<Params> {
        validate_params(&RawParams {
            h,
            t,
            chat,
            c1: 1.0,
            c2check: 1.0,
            c17: 1.0,
            c39: 1.0,
            c11: 1.0,
            cstar: 0.0,
        })
    }

    /// H = 2, T = 2, Chat = 1/4 (so P = 2), unit normalizations.
    pub fn defaults() -> Params {
        Params::new(2.0, 2.0, 0.25).expect("default params are valid")
    }

    /// H = 3/2, T = 3, Chat = 1/5 (so P = 5/3), unit normalizations.
    pub fn second_set() -> Params {
        Params::new(1.5, 3.0, 0.2).expect("second params are valid")
    }

    pub fn from_json(text: &str) -> Result<Params> {
        let raw: RawParams =
            serde_json::from_str(text).map_err(|e| Error::Domain(format!("params JSON: {e}")))?;
        validate_params(&raw)
    }

    pub fn with_c1(mut self, c1: f64) -> Params {
        assert!(c1 > 0.0);
        self.c1 = c1;
        self
    }

    pub fn with_perturbation(mut self, pert: Perturbation) -> Params {
        self.pert = pert;
        self
    }
}

pub type Vec4 = [f64; 4];
pub type Mat4 = [[f64; 4]; 4];

/// Orthonormal tetrad b, i, j, i3 together with the background tensor
/// a_ij = b b - i i - j j - i3 i3 and its inverse.
#[derive(Debug, Clone)]
pub struct Frame {
    pub b: Vec4,
    pub i: Vec4,
    pub j: Vec4,
    pub i3: Vec4,
    pub a: Mat4,
    pub ainv: Mat4,
}

/// Canonical basis: b = e0, i = e1, j = e2, i3 = e3, a = diag(1,-1,-1,-1).
pub fn default_frame() -> Frame {
    let b = [1.0, 0.0, 0.0, 0.0];
    let i = [0.0, 1.0, 0.0, 0.0];
    let j = [0.0, 0.0, 1.0, 0.0];
    let i3 = [0.0, 0.0, 0.0, 1.0];
    let mut a = [[0.0; 4]; 4];
    for r in 0..4 {
        for s in 0..4 {
            a[r][s] = b[r] * b[s] - i[r] * i[s] - j[r] * j[s] - i3[r] * i3[s];
        }
    }
    Frame { b, i, j, i3, a, ainv: a }
}

/// The 1-form values of a tangent vector and the derived scalar variables.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ScalarVars {
    pub b: f64,
    pub i: f64,
    pub j: f64,
    pub i3: f64,
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub t: f64,
    pub wperp: f64,
}

pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn decompose(y: &Vec4, frame: &Frame) -> Result<ScalarVars> {
    let b = dot4(&frame.b, y);
    if b <= 0.0 {
        return Err(Error::OutsideBLikeRegion { b });
    }
    let i = dot4(&frame.i, y);
    let j = dot4(&frame.j, y);
    let i3 = dot4(&frame.i3, y);
    let (w1, w2, w3) = (i / b, j / b, i3 / b);
    Ok(ScalarVars {
        b,
        i,
        j,
        i3,
        w1,
        w2,
        w3,
        t: w1 / w2,
        wperp: w1.hypot(w2),
    })
}
