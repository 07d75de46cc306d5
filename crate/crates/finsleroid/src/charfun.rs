//! Closed-form characteristic functions of the two-axes solution and their
//! analytic derivatives. Every function is implemented generically over jets,
//! so exact first and second derivatives flow through all pipelines.
//!
//! Notation: the eta-level functions are Lhat, R1, J, Y1 and the pair
//! Vcheck = C1 J/R1, rcheck = C2check sinh(eta) Y1/R1; the theta-level
//! functions are L9, R2, I, Y2 and Ucheck = C39 I/R2,
//! fcheck = C17 sin(theta) Y2/R2; the planar-angle pair is
//! phi = arctan(t)/sqrt(Chat) + C*, Z = C11 sqrt(1+t^2).

use serde::Serialize;

use crate::core::Params;
use crate::deriv::Jet2;
use crate::error::{Error, Result};

/// Multiplicative defect injected into exactly one characteristic function,
/// used by the verifier's negative controls. The perturbed function is
/// differentiated exactly (the defect flows through the jets), so the perturbed
/// geometry is self-consistent but no longer satisfies the identity laws.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Perturbation {
    #[default]
    None,
    /// J -> J (1 + eps sinh eta), hence Vcheck inherits the defect.
    J(f64),
    /// Y1 -> Y1 (1 + eps sinh eta), hence rcheck inherits the defect.
    Y1(f64),
    /// I -> I (1 + eps sin theta), hence Ucheck inherits the defect.
    I(f64),
    /// Y2 -> Y2 (1 + eps sin theta), hence fcheck inherits the defect.
    Y2(f64),
    /// Z -> Z (1 + eps t^2/(1+t^2)).
    Z(f64),
}

// --- eta level ---

pub fn lhat_jet<const N: usize>(eta: &Jet2<N>, p: &Params) -> Jet2<N> {
    let sh = eta.sinh();
    sh * sh * (p.h1 * p.h1) + p.s1 * p.s1
}

pub fn r1_jet<const N: usize>(eta: &Jet2<N>, p: &Params) -> Jet2<N> {
    eta.cosh() + lhat_jet(eta, p).sqrt()
}

pub fn jfun_jet<const N: usize>(eta: &Jet2<N>, p: &Params) -> Jet2<N> {
    let base = eta.cosh() * p.h1 + lhat_jet(eta, p).sqrt();
    let j = base.powf(p.h1);
    match p.pert {
        Perturbation::J(eps) => j * (eta.sinh() * eps + 1.0),
        _ => j,
    }
}

pub fn y1_jet<const N: usize>(eta: &Jet2<N>, p: &Params) -> Jet2<N> {
    // Real-stable form, valid for either sign of N = (1-1/H^2)/(1/H^2-1/P):
    // Y1 = ((cosh eta + sqrt(Lhat)/S1)^2 / (|1-Lhat1^2| sinh^2 eta))^(S1/2).
    // sinh^2 eta is used directly (never cosh^2-1) to avoid cancellation.
    let c = (1.0 - p.lhat1 * p.lhat1).abs();
    let num = eta.cosh() + lhat_jet(eta, p).sqrt() / p.s1;
    let sh = eta.sinh();
    let y1 = (num * num / (sh * sh * c)).powf(p.s1 / 2.0);
    match p.pert {
        Perturbation::Y1(eps) => y1 * (sh * eps + 1.0),
        _ => y1,
    }
}

pub fn vcheck_jet<const N: usize>(eta: &Jet2<N>, p: &Params) -> Jet2<N> {
    jfun_jet(eta, p) / r1_jet(eta, p) * p.c1
}

pub fn rcheck_jet<const N: usize>(eta: &Jet2<N>, p: &Params) -> Jet2<N> {
    eta.sinh() * y1_jet(eta, p) / r1_jet(eta, p) * p.c2check
}

// --- theta level ---

pub fn l9_jet<const N: usize>(theta: &Jet2<N>, p: &Params) -> Jet2<N> {
    let ct = theta.cos();
    ct * ct * (1.0 - p.t * p.chat) + (p.t * p.chat - p.chat)
}

pub fn r2_jet<const N: usize>(theta: &Jet2<N>, p: &Params) -> Jet2<N> {
    theta.cos() + l9_jet(theta, p).sqrt()
}

pub fn ifun_jet<const N: usize>(theta: &Jet2<N>, p: &Params) -> Jet2<N> {
    let e = (1.0 - p.t * p.chat).sqrt();
    let i = (theta.cos() * e + l9_jet(theta, p).sqrt()).powf(e);
    match p.pert {
        Perturbation::I(eps) => i * (theta.sin() * eps + 1.0),
        _ => i,
    }
}

pub fn y2_jet<const N: usize>(theta: &Jet2<N>, p: &Params) -> Jet2<N> {
    let (st, ct) = (theta.sin(), theta.cos());
    let s = (st * st + ct * ct * p.a).sqrt();
    let y2 = ((s + ct * p.a.sqrt()) / st).powf((1.0 - p.chat).sqrt());
    match p.pert {
        Perturbation::Y2(eps) => y2 * (st * eps + 1.0),
        _ => y2,
    }
}

pub fn ucheck_jet<const N: usize>(theta: &Jet2<N>, p: &Params) -> Jet2<N> {
    ifun_jet(theta, p) / r2_jet(theta, p) * p.c39
}

pub fn fcheck_jet<const N: usize>(theta: &Jet2<N>, p: &Params) -> Jet2<N> {
    theta.sin() * y2_jet(theta, p) / r2_jet(theta, p) * p.c17
}

// --- planar angle ---

pub fn zfun_jet<const N: usize>(t: &Jet2<N>, p: &Params) -> Jet2<N> {
    let q = *t * *t + 1.0;
    let z = q.sqrt() * p.c11;
    match p.pert {
        Perturbation::Z(eps) => z * (*t * *t / q * eps + 1.0),
        _ => z,
    }
}

pub fn phifun(t: f64, p: &Params) -> f64 {
    t.atan() / p.chat.sqrt() + p.cstar
}

// --- scalar wrappers: value and first/second derivative ---

fn d2_of(f: impl Fn(&Jet2<1>) -> Jet2<1>, x: f64) -> (f64, f64, f64) {
    let j = f(&Jet2::<1>::var(x, 0));
    (j.v, j.g[0], j.h[0][0])
}

macro_rules! scalar_pair {
    ($name:ident, $named2:ident, $jet:ident) => {
        pub fn $name(x: f64, p: &Params) -> f64 {
            $jet(&Jet2::<1>::var(x, 0), p).v
        }
        pub fn $named2(x: f64, p: &Params) -> (f64, f64, f64) {
            d2_of(|j| $jet(j, p), x)
        }
    };
}

scalar_pair!(lhat, lhat_d2, lhat_jet);
scalar_pair!(r1, r1_d2, r1_jet);
scalar_pair!(jfun, jfun_d2, jfun_jet);
scalar_pair!(y1, y1_d2, y1_jet);
scalar_pair!(vcheck, vcheck_d2, vcheck_jet);
scalar_pair!(rcheck, rcheck_d2, rcheck_jet);
scalar_pair!(l9, l9_d2, l9_jet);
scalar_pair!(r2, r2_d2, r2_jet);
scalar_pair!(ifun, ifun_d2, ifun_jet);
scalar_pair!(y2, y2_d2, y2_jet);
scalar_pair!(ucheck, ucheck_d2, ucheck_jet);
scalar_pair!(fcheck, fcheck_d2, fcheck_jet);
scalar_pair!(zfun, zfun_d2, zfun_jet);

/// Analytic dR1/deta.
pub fn r1_prime(eta: f64, p: &Params) -> f64 {
    let (sh, ch) = (eta.sinh(), eta.cosh());
    let sl = lhat(eta, p).sqrt();
    sh * (sl + p.h1 * p.h1 * ch) / sl
}

/// Analytic dR2/dtheta.
pub fn r2_prime(theta: f64, p: &Params) -> f64 {
    let (st, ct) = (theta.sin(), theta.cos());
    let sl = l9(theta, p).sqrt();
    -st * (sl + (1.0 - p.t * p.chat) * ct) / sl
}

// --- profiles ---

/// Cached eta-level values at one eta.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EtaProfile {
    pub eta: f64,
    pub lhat: f64,
    pub r1: f64,
    pub j: f64,
    pub y1: f64,
    pub vcheck: f64,
    pub rcheck: f64,
}

pub fn eta_profile(eta: f64, p: &Params) -> Result<EtaProfile> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta > 0 violated (eta = {eta})")));
    }
    Ok(EtaProfile {
        eta,
        lhat: lhat(eta, p),
        r1: r1(eta, p),
        j: jfun(eta, p),
        y1: y1(eta, p),
        vcheck: vcheck(eta, p),
        rcheck: rcheck(eta, p),
    })
}

/// Logarithmic-derivative laws at eta: (Veta/V, reta/r, (lnJ)eta, (lnY1)eta).
/// These are the analytic right-hand sides, independent of any perturbation.
pub fn eta_derivatives(eta: f64, p: &Params) -> Result<(f64, f64, f64, f64)> {
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta > 0 violated (eta = {eta})")));
    }
    let sh = eta.sinh();
    let r1v = r1(eta, p);
    let sl = lhat(eta, p).sqrt();
    Ok((
        -sh / (p.h * p.h * r1v),
        1.0 / (p.p * sh * r1v),
        p.h1 * p.h1 * sh / sl,
        -p.s1 * p.s1 / (sh * sl),
    ))
}

/// Cached theta-level values at one theta.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThetaProfile {
    pub theta: f64,
    pub l9: f64,
    pub r2: f64,
    pub i: f64,
    pub y2: f64,
    pub ucheck: f64,
    pub fcheck: f64,
}

pub fn theta_profile(theta: f64, p: &Params) -> Result<ThetaProfile> {
    if !(theta > 0.0 && theta < p.theta_c) {
        return Err(Error::Domain(format!(
            "0 < theta < theta_c violated (theta = {theta}, theta_c = {})",
            p.theta_c
        )));
    }
    Ok(ThetaProfile {
        theta,
        l9: l9(theta, p),
        r2: r2(theta, p),
        i: ifun(theta, p),
        y2: y2(theta, p),
        ucheck: ucheck(theta, p),
        fcheck: fcheck(theta, p),
    })
}

/// Logarithmic-derivative laws at theta: (Utheta/U, ftheta/f, (lnI)theta, (lnY2)theta).
pub fn theta_derivatives(theta: f64, p: &Params) -> Result<(f64, f64, f64, f64)> {
    if !(theta > 0.0 && theta < p.theta_c) {
        return Err(Error::Domain(format!(
            "0 < theta < theta_c violated (theta = {theta}, theta_c = {})",
            p.theta_c
        )));
    }
    let st = theta.sin();
    let r2v = r2(theta, p);
    let sl = l9(theta, p).sqrt();
    Ok((
        st / (p.p * r2v),
        p.chat / (st * r2v),
        -(1.0 - p.t * p.chat) * st / sl,
        -(1.0 - p.chat) / (sl * st),
    ))
}

/// The planar-angle pair at one t.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhiProfile {
    pub t: f64,
    pub phi: f64,
    pub z: f64,
}

pub fn phi_and_z(t: f64, p: &Params) -> PhiProfile {
    PhiProfile { t, phi: phifun(t, p), z: zfun(t, p) }
}

/// Right-limit of Vcheck at eta = 0: C1 (H1+S1)^H1 / (1+S1). Vcheck is strictly
/// decreasing, so this is its supremum.
pub fn vcheck_limit0(p: &Params) -> f64 {
    p.c1 * (p.h1 + p.s1).powf(p.h1) / (1.0 + p.s1)
}

/// Supremum of rcheck. rcheck is bounded: its logarithmic derivative
/// 1/(P sinh eta R1) decays like exp(-2 eta), so the limit at infinity is
/// finite; by eta = 40 it is converged far below machine precision.
pub fn r_sup(p: &Params) -> f64 {
    rcheck(40.0, p)
}

/// Zero of Lhat for a parameter pair with P < 1 (outside the eta-regular class,
/// where Lhat = 1 - 1/P + (1 - 1/H^2) sinh^2 eta starts negative). Returns None
/// when P >= 1 (Lhat has no zero) and the geometry is eta-regular.
pub fn lhat_zero_eta(h: f64, p_val: f64) -> Option<f64> {
    if !(h > 1.0) || p_val >= 1.0 || p_val <= 0.0 {
        return None;
    }
    let s = ((1.0 / p_val - 1.0) / (1.0 - 1.0 / (h * h))).sqrt();
    Some(s.asinh())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-13;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < TOL * b.abs().max(1.0)
    }

    #[test]
    fn eta_level_oracle_values() {
        let p = Params::defaults();
        assert!(close(lhat(0.3, &p), 0.56954945684085034));
        assert!(close(r1(0.3, &p), 1.8000235191745753));
        assert!(close(jfun(0.3, &p), 1.5510059598801738));
        assert!(close(y1(0.3, &p), 5.0263492565271015));
        assert!(close(vcheck(0.3, &p), 0.86165871909907499));
        assert!(close(rcheck(0.3, &p), 0.85033630630968005));
        assert!(close(lhat(1.0, &p), 1.5358233841563615));
        assert!(close(r1(1.0, &p), 2.7823640504052216));
        assert!(close(jfun(1.0, &p), 2.2690057285564538));
        assert!(close(y1(1.0, &p), 2.6490912426000652));
        assert!(close(vcheck(1.0, &p), 0.81549563157488225));
        assert!(close(rcheck(1.0, &p), 1.1189100829280523));
    }

    #[test]
    fn theta_level_oracle_values() {
        let p = Params::defaults();
        assert!(close(l9(0.6, &p), 0.59058943861916835));
        assert!(close(r2(0.6, &p), 1.5938337857722824));
        assert!(close(ifun(0.6, &p), 1.2377612935893794));
        assert!(close(y2(0.6, &p), 4.2067674357091454));
        assert!(close(ucheck(0.6, &p), 0.7765937104850803));
        assert!(close(fcheck(0.6, &p), 1.4903182446628558));
        assert!(close(l9(1.6, &p), 0.25042630605131172));
        assert!(close(r2(1.6, &p), 0.47122660216795959));
        assert!(close(ucheck(1.6, &p), 1.2625025352062114));
        assert!(close(fcheck(1.6, &p), 2.0303138989675729));
        let p2 = Params::second_set();
        assert!(close(vcheck(1.0, &p2), 0.69312593798259903));
        assert!(close(fcheck(1.0, &p2), 1.3850846864359043));
        assert!(close(rcheck(1.0, &p2), 1.1493619441499356));
        assert!(close(ucheck(1.0, &p2), 0.82427473464453149));
    }

    #[test]
    fn phi_and_z_values() {
        let p = Params::defaults();
        let pr = phi_and_z(1.0, &p);
        assert!(close(pr.phi, std::f64::consts::FRAC_PI_2));
        assert!(close(pr.z, std::f64::consts::SQRT_2));
        let pr0 = phi_and_z(0.0, &p);
        assert_eq!(pr0.phi, p.cstar);
        assert_eq!(pr0.z, p.c11);
    }

    #[test]
    fn derivative_laws_match_jets() {
        // the jet derivatives of the closed forms satisfy the analytic laws
        for p in [Params::defaults(), Params::second_set()] {
            for eta in [0.05, 0.3, 1.0, 2.5, 5.0] {
                let (lv, lr, lj, ly) = eta_derivatives(eta, &p).unwrap();
                let (v, dv, _) = vcheck_d2(eta, &p);
                let (r, dr, _) = rcheck_d2(eta, &p);
                let (j, dj, _) = jfun_d2(eta, &p);
                let (y, dy, _) = y1_d2(eta, &p);
                assert!((dv / v - lv).abs() < 1e-12 * lv.abs().max(1.0));
                assert!((dr / r - lr).abs() < 1e-12 * lr.abs().max(1.0));
                assert!((dj / j - lj).abs() < 1e-12 * lj.abs().max(1.0));
                assert!((dy / y - ly).abs() < 1e-12 * ly.abs().max(1.0));
            }
            for k in 1..6 {
                let theta = k as f64 * p.theta_c / 6.0;
                let (lu, lf, li, ly2) = theta_derivatives(theta, &p).unwrap();
                let (u, du, _) = ucheck_d2(theta, &p);
                let (f, df, _) = fcheck_d2(theta, &p);
                let (i, di, _) = ifun_d2(theta, &p);
                let (y, dy, _) = y2_d2(theta, &p);
                assert!((du / u - lu).abs() < 1e-12 * lu.abs().max(1.0));
                assert!((df / f - lf).abs() < 1e-12 * lf.abs().max(1.0));
                assert!((di / i - li).abs() < 1e-12 * li.abs().max(1.0));
                assert!((dy / y - ly2).abs() < 1e-12 * ly2.abs().max(1.0));
            }
        }
    }

    #[test]
    fn r1_r2_primes_match_jets() {
        let p = Params::defaults();
        let (_, d, _) = r1_d2(0.7, &p);
        assert!((r1_prime(0.7, &p) - d).abs() < 1e-13);
        let (_, d, _) = r2_d2(1.3, &p);
        assert!((r2_prime(1.3, &p) - d).abs() < 1e-13);
    }

    #[test]
    fn monotonicity_and_bounds() {
        let p = Params::defaults();
        let mut prev_r = 0.0;
        let mut prev_v = f64::INFINITY;
        for k in 1..200 {
            let eta = k as f64 * 0.05;
            let r = rcheck(eta, &p);
            let v = vcheck(eta, &p);
            assert!(r > prev_r, "rcheck not increasing at eta = {eta}");
            assert!(v < prev_v, "vcheck not decreasing at eta = {eta}");
            prev_r = r;
            prev_v = v;
        }
        assert!(close(r_sup(&p), 1.2052491066790201));
        let mut prev_f = 0.0;
        for k in 1..40 {
            let theta = k as f64 * p.theta_c / 40.0;
            let f = fcheck(theta, &p);
            assert!(f > prev_f);
            prev_f = f;
        }
    }

    #[test]
    fn limit_values() {
        let p = Params::defaults();
        assert!(close(vcheck(1e-9, &p), 0.86724736408974379));
        assert!((vcheck_limit0(&p) - vcheck(1e-9, &p)).abs() < 1e-8);
        // theta -> 0+: R2 -> 1 + sqrt(1-Chat)
        assert!((r2(1e-9, &p) - (1.0 + 0.75f64.sqrt())).abs() < 1e-12);
        // theta = pi/2, T=2, Chat=1/4: L9 = 1/4, R2 = 1/2
        assert!(close(l9(std::f64::consts::FRAC_PI_2, &p), 0.25));
        assert!(close(r2(std::f64::consts::FRAC_PI_2, &p), 0.5));
        // Lhat at sinh eta = 1 equals 1.25 for H=2, P=2
        assert!(close(lhat(1f64.asinh(), &p), 1.25));
        // eta -> 0+: Lhat = 1/2, R1 = 1 + sqrt(1/2), J = (H1+S1)^H1
        assert!((lhat(1e-9, &p) - 0.5).abs() < 1e-12);
        assert!((r1(1e-9, &p) - (1.0 + 0.5f64.sqrt())).abs() < 1e-12);
        assert!((jfun(1e-9, &p) - (p.h1 + p.s1).powf(p.h1)).abs() < 1e-9);
    }

    #[test]
    fn fourth_derivative_bounded() {
        // eta-regularity smoothness probe on [1e-3, 10]
        let p = Params::defaults();
        for g in [vcheck as fn(f64, &Params) -> f64, rcheck] {
            for k in 0..40 {
                let eta = 1e-3 * (10f64 / 1e-3).powf(k as f64 / 39.0);
                let h = 1e-2 * eta.max(0.05);
                let d4 = (g(eta + 2.0 * h, &p) - 4.0 * g(eta + h, &p) + 6.0 * g(eta, &p)
                    - 4.0 * g(eta - h, &p).max(f64::MIN_POSITIVE)
                    + g((eta - 2.0 * h).max(eta * 1e-3), &p))
                    / h.powi(4);
                assert!(d4.is_finite());
            }
        }
    }

    #[test]
    fn domain_errors() {
        let p = Params::defaults();
        assert!(eta_profile(-0.1, &p).is_err());
        assert!(eta_profile(0.0, &p).is_err());
        assert!(theta_profile(p.theta_c + 0.01, &p).is_err());
        assert!(theta_profile(0.0, &p).is_err());
        assert!(eta_profile(0.5, &p).is_ok());
        assert!(theta_profile(0.5, &p).is_ok());
    }

    #[test]
    fn class_one_lhat_zero() {
        let eta0 = lhat_zero_eta(2.0, 0.8).unwrap();
        assert!(close(eta0, 0.54930614433405478));
        // Lhat vanishes there (computed with the raw pair, outside Params)
        let lhat_raw = 1.0 - 1.0 / 0.8 + (1.0 - 0.25) * eta0.sinh().powi(2);
        assert!(lhat_raw.abs() < 1e-15);
        assert!(lhat_zero_eta(2.0, 2.0).is_none());
        assert!(lhat_zero_eta(2.0, 1.0).is_none());
    }

    #[test]
    fn perturbations_shift_values() {
        let p = Params::defaults();
        let pj = Params::defaults().with_perturbation(Perturbation::J(0.01));
        let v0 = vcheck(1.0, &p);
        let v1 = vcheck(1.0, &pj);
        assert!((v1 / v0 - (1.0 + 0.01 * 1f64.sinh())).abs() < 1e-14);
        // rcheck untouched by a J defect
        assert_eq!(rcheck(1.0, &p), rcheck(1.0, &pj));
        let pz = Params::defaults().with_perturbation(Perturbation::Z(0.01));
        assert!(zfun(1.0, &pz) > zfun(1.0, &p));
    }
}
