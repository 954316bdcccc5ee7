//! Property tests over randomly drawn arguments.

use std::f64::consts::{FRAC_1_PI, PI};

use proptest::prelude::*;
use resolab::action::ActionData;
use resolab::asymptotics::{k_window, lambda_k};
use resolab::crossing::{airy_product_closed_form, SlopePair};
use resolab::harness::fit_slope;
use resolab::specfun::airy_eval;

fn actions(a0: f64, a1: f64) -> ActionData {
    ActionData {
        a0,
        a1,
        a2: 0.0,
        a3: 0.0,
        e_max: 1.0,
        a1_crosscheck: 0.0,
    }
}

proptest! {
    #[test]
    fn airy_wronskian_is_constant(x in -20.0f64..8.0) {
        let v = airy_eval(x).unwrap();
        prop_assert!((v.wronskian() - FRAC_1_PI).abs() < 1e-12);
    }

    #[test]
    fn ai_decreases_on_the_positive_axis(x in 0.0f64..8.0, dx in 1e-3f64..1.0) {
        let a = airy_eval(x).unwrap();
        let b = airy_eval(x + dx).unwrap();
        prop_assert!(a.ai > 0.0 && a.bi > 0.0);
        prop_assert!(b.ai < a.ai);
    }

    #[test]
    fn oscillation_envelope(x in 2.0f64..20.0) {
        let v = airy_eval(-x).unwrap();
        let amp = (v.ai * v.ai + v.bi * v.bi).sqrt();
        let env = 1.0 / (PI.sqrt() * x.powf(0.25));
        prop_assert!(amp < 1.1 * env && amp > env / 1.1);
    }

    #[test]
    fn tau3_is_stored_harmonically(t1 in 0.1f64..10.0, t2 in 0.1f64..10.0) {
        let s = SlopePair::new(t1, t2).unwrap();
        prop_assert!((1.0 / s.tau3() - (1.0 / t1 + 1.0 / t2)).abs() < 1e-13 * (1.0 / s.tau3()));
    }

    #[test]
    fn closed_form_is_symmetric_in_the_slopes(t1 in 0.2f64..5.0, t2 in 0.2f64..5.0, t in -3.0f64..3.0) {
        let a = airy_product_closed_form(t, &SlopePair::new(t1, t2).unwrap()).unwrap();
        let b = airy_product_closed_form(t, &SlopePair::new(t2, t1).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn lambda_spacing(a0 in 0.1f64..2.0, a1 in 0.5f64..3.0, h in 1e-3f64..0.1, k in 0i64..200) {
        let d = lambda_k(&actions(a0, a1), h, k + 1) - lambda_k(&actions(a0, a1), h, k);
        prop_assert!((d - PI * h.cbrt() / a1).abs() < 1e-9 * d.abs());
    }

    #[test]
    fn window_is_exact(a0 in 0.1f64..2.0, a1 in 0.5f64..3.0, h in 2e-3f64..0.1, c0 in 0.5f64..2.0) {
        let ac = actions(a0, a1);
        let w = k_window(&ac, h, c0);
        for k in w.clone() {
            prop_assert!(lambda_k(&ac, h, k).abs() <= c0);
        }
        prop_assert!(lambda_k(&ac, h, *w.start() - 1).abs() > c0);
        prop_assert!(lambda_k(&ac, h, *w.end() + 1).abs() > c0);
    }

    #[test]
    fn slope_of_a_power_law(p in 0.5f64..4.0, c in 1e-3f64..1e3) {
        let pairs: Vec<_> = [0.08, 0.05, 0.03, 0.02, 0.01].iter().map(|&h: &f64| (h, c * h.powf(p))).collect();
        let (s, r2) = fit_slope(&pairs).unwrap();
        prop_assert!((s - p).abs() < 1e-10 && r2 > 1.0 - 1e-12);
    }
}

#[test]
fn noisy_power_law() {
    let hs: [f64; 8] = [0.08, 0.06, 0.045, 0.034, 0.025, 0.019, 0.014, 0.01];
    let noise = [0.1, -0.1, 0.07, -0.05, 0.1, -0.08, 0.02, -0.1];
    let pairs: Vec<_> = hs
        .iter()
        .zip(noise)
        .map(|(&h, n)| (h, 0.3 * h.powf(7.0 / 3.0) * (1.0 + n)))
        .collect();
    let (s, _) = fit_slope(&pairs).unwrap();
    assert!((s - 7.0 / 3.0).abs() < 0.15, "{s}");
}
