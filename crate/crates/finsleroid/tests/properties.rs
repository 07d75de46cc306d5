//! Property tests over randomly drawn admissible inputs.

use proptest::prelude::*;

use finsleroid::charfun;
use finsleroid::core::{default_frame, Params};
use finsleroid::inversion::{
    angles_from_tangent, eta_from_r, tangent_from_angles, theta_from_f, AngleTriple,
};

proptest! {
    #[test]
    fn angle_round_trip(
        eta in 0.02f64..4.0,
        theta_frac in 0.02f64..0.98,
        alpha in -1.45f64..1.45,
        b in 0.3f64..4.0,
    ) {
        let p = Params::defaults();
        let frame = default_frame();
        let a = AngleTriple {
            eta,
            theta: theta_frac * p.theta_c,
            phi: p.cstar + alpha / p.chat.sqrt(),
        };
        let y = tangent_from_angles(&a, b, &frame, &p).unwrap();
        let (back, f) = angles_from_tangent(&y, &frame, &p).unwrap();
        prop_assert!((back.eta - a.eta).abs() < 1e-9 * a.eta.max(1.0));
        prop_assert!((back.theta - a.theta).abs() < 1e-10);
        prop_assert!((back.phi - a.phi).abs() < 1e-10);
        prop_assert!((f - b * charfun::vcheck(eta, &p)).abs() < 1e-10 * f);
    }

    #[test]
    fn f_is_positive_degree_one(
        eta in 0.02f64..3.0,
        theta_frac in 0.05f64..0.95,
        b in 0.3f64..4.0,
        s in 0.1f64..10.0,
    ) {
        let p = Params::second_set();
        let frame = default_frame();
        let a = AngleTriple { eta, theta: theta_frac * p.theta_c, phi: p.cstar };
        let y = tangent_from_angles(&a, b, &frame, &p).unwrap();
        let (_, f) = angles_from_tangent(&y, &frame, &p).unwrap();
        prop_assert!(f > 0.0);
        let ys = [s * y[0], s * y[1], s * y[2], s * y[3]];
        let (_, fs) = angles_from_tangent(&ys, &frame, &p).unwrap();
        // 1e-11: the eta inversion is solved to 1e-14 in r, and the flat tail
        // of rcheck amplifies that into F by up to ~2 sinh(eta) R1(eta) V'/V
        prop_assert!((fs - s * f).abs() < 1e-11 * s * f);
    }

    #[test]
    // eta capped at 6: beyond that the flat tail of rcheck amplifies the
    // solver's 1e-14 relative residual in r past the asserted eta accuracy
    fn inversions_invert_the_closed_forms(
        eta in 1e-3f64..6.0,
        theta_frac in 1e-3f64..0.999,
    ) {
        let p = Params::defaults();
        let theta = theta_frac * p.theta_c;
        let r = charfun::rcheck(eta, &p);
        prop_assert!((eta_from_r(r, &p).unwrap() - eta).abs() < 1e-8 * eta.max(1.0));
        let f = charfun::fcheck(theta, &p);
        prop_assert!((theta_from_f(f, &p).unwrap() - theta).abs() < 1e-9);
    }
}
