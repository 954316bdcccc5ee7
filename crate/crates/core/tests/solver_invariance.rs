//! Zeros of the Wronskian do not depend on the numerical choices of the
//! coupled solver, and the counting pass agrees with the seeded search.

use std::f64::consts::PI;

use num_complex::Complex64;
use resolab::action::{action_derivatives, ActionData};
use resolab::asymptotics::{central_k, k_window, rho_estimate};
use resolab::coupled::{wronskian_with, SolverOptions};
use resolab::finder::{count_in_box, find_resonances_with, find_seedless, muller, FinderOptions, SearchBox, Target};
use resolab::model::{default_model, CrossingModel, DistortionContour};

type C64 = Complex64;

const H: f64 = 0.08;

struct Fixture {
    model: CrossingModel,
    actions: ActionData,
}

fn fixture() -> Fixture {
    let model = default_model();
    let actions = action_derivatives(&model).unwrap();
    Fixture { model, actions }
}

fn contour(m: &CrossingModel, theta: f64, l_left: f64) -> DistortionContour {
    DistortionContour::for_h(m, H, theta, 1.0, l_left).unwrap()
}

/// Central zero in ρ for the given contour and solver settings.
fn central_zero(fx: &Fixture, c: &DistortionContour, solver: SolverOptions) -> C64 {
    let opts = FinderOptions {
        solver,
        ..FinderOptions::default()
    };
    let slopes = fx.model.slopes().unwrap();
    let out = find_resonances_with(&fx.model, c, &fx.actions, &slopes, H, 1.5, &opts).unwrap();
    let k = central_k(&fx.actions, H);
    out.resonances.iter().find(|r| r.k == k).unwrap().rho
}

#[test]
fn zero_is_independent_of_contour_and_cadence() {
    let fx = fixture();
    let base = central_zero(&fx, &contour(&fx.model, 0.3, 6.0), SolverOptions::default());
    let variants = [
        central_zero(&fx, &contour(&fx.model, 0.2, 6.0), SolverOptions::default()),
        central_zero(&fx, &contour(&fx.model, 0.45, 6.0), SolverOptions::default()),
        central_zero(&fx, &contour(&fx.model, 0.3, 12.0), SolverOptions::default()),
        central_zero(
            &fx,
            &contour(&fx.model, 0.3, 6.0),
            SolverOptions {
                reortho: 0.5,
                ..SolverOptions::default()
            },
        ),
    ];
    for v in variants {
        assert!((v - base).norm() < 1e-9 * base.norm(), "{v} vs {base}");
    }
}

#[test]
fn tighter_tolerance_leaves_log_w_unchanged() {
    let fx = fixture();
    let c = contour(&fx.model, 0.3, 6.0);
    let zero = central_zero(&fx, &c, SolverOptions::default());
    let spacing = PI * H.cbrt() / fx.actions.a1;
    let e = (zero + C64::new(0.05 * spacing, 0.0)) * H.powf(2.0 / 3.0);
    let base = SolverOptions::default();
    let tight = SolverOptions {
        rtol: 0.5 * base.rtol,
        ..base
    };
    let a = wronskian_with(&fx.model, &c, e, H, &base).unwrap().ln_abs();
    let b = wronskian_with(&fx.model, &c, e, H, &tight).unwrap().ln_abs();
    assert!((a - b).abs() < 1e-8, "{a} vs {b}");
}

#[test]
fn log_derivative_is_smooth_near_a_zero() {
    let fx = fixture();
    let c = contour(&fx.model, 0.3, 6.0);
    let zero = central_zero(&fx, &c, SolverOptions::default());
    let spacing = PI * H.cbrt() / fx.actions.a1;
    let t = Target {
        model: &fx.model,
        contour: &c,
        h: H,
        solver: SolverOptions::default(),
    };
    let rho = zero + C64::new(0.2 * spacing, 0.0);
    let d = 1e-5 * spacing;
    let wide = 1e-3 * spacing;
    let reference = t.eval(rho).unwrap().log_scale;
    let ln = |r: C64| t.eval(r).unwrap().rescaled(reference).ln();
    let central = (ln(rho + d) - ln(rho - d)) / (2.0 * d);
    let secant = (ln(rho + wide) - ln(rho - wide)) / (2.0 * wide);
    assert!((central - secant).norm() < 1e-4 * central.norm(), "{central} vs {secant}");
}

#[test]
fn refinement_is_idempotent() {
    let fx = fixture();
    let c = contour(&fx.model, 0.3, 6.0);
    let zero = central_zero(&fx, &c, SolverOptions::default());
    let t = Target {
        model: &fx.model,
        contour: &c,
        h: H,
        solver: SolverOptions::default(),
    };
    let spacing = PI * H.cbrt() / fx.actions.a1;
    let again = muller(&t, zero, 1e-6 * spacing, &FinderOptions::default()).unwrap();
    assert!((again.rho - zero).norm() < 1e-11, "moved {}", (again.rho - zero).norm());
}

#[test]
fn counts_split_and_vanish() {
    let fx = fixture();
    let c = contour(&fx.model, 0.3, 6.0);
    let t = Target {
        model: &fx.model,
        contour: &c,
        h: H,
        solver: SolverOptions::default(),
    };
    let opts = FinderOptions::default();
    let b = SearchBox::for_counting(&fx.actions, H, 1.5);
    let total = count_in_box(&t, &b, &opts).unwrap().count;
    let window = k_window(&fx.actions, H, 1.5);
    assert_eq!(total, window.clone().count());
    let k = *window.start();
    let mid = 0.5 * (rho_estimate(&fx.actions, H, k) + rho_estimate(&fx.actions, H, k + 1));
    let (l, r) = b.split_re(mid);
    let cl = count_in_box(&t, &l, &opts).unwrap().count;
    let cr = count_in_box(&t, &r, &opts).unwrap().count;
    assert_eq!(cl + cr, total);
    assert_eq!(cl, 1);
    // a sliver between two neighbouring zeros holds none
    let spacing = PI * H.cbrt() / fx.actions.a1;
    let (_, rest) = b.split_re(mid - 0.1 * spacing);
    let (sliver, _) = rest.split_re(mid + 0.1 * spacing);
    assert_eq!(count_in_box(&t, &sliver, &opts).unwrap().count, 0);
}

#[test]
fn seedless_search_finds_the_seeded_zeros() {
    let fx = fixture();
    let c = contour(&fx.model, 0.3, 6.0);
    let t = Target {
        model: &fx.model,
        contour: &c,
        h: H,
        solver: SolverOptions::default(),
    };
    let opts = FinderOptions::default();
    let b = SearchBox::for_counting(&fx.actions, H, 1.5);
    let free = find_seedless(&t, &b, &opts).unwrap();
    let slopes = fx.model.slopes().unwrap();
    let seeded = find_resonances_with(&fx.model, &c, &fx.actions, &slopes, H, 1.5, &opts).unwrap();
    assert_eq!(free.len(), seeded.resonances.len());
    for r in &seeded.resonances {
        assert!(r.e.im <= 0.0);
        let nearest = free.iter().map(|z| (z - r.rho).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-9, "k = {}: {nearest}", r.k);
    }
}
