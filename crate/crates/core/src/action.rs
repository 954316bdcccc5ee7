//! Turning points of the well, the action `𝒜(E) = ∫ √(E − V₁)` between
//! them, and its derivatives at the crossing energy `E = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CrossingModel;
use crate::quad::{gauss_kronrod, tanh_sinh_levels};

/// Derivative step used for the Richardson tables.
pub const DERIVATIVE_STEP: f64 = 5e-3;
/// Number of Richardson levels.
pub const RICHARDSON_LEVELS: usize = 4;

const ACTION_TOL: f64 = 1e-14;
const BARRIER_SCAN: f64 = 50.0;

/// Shape of the potential well of `V₁`: minimum and monotone brackets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Well {
    pub x_min: f64,
    pub v_min: f64,
    /// Left end of the bracket on which `V₁` decreases to the minimum.
    pub x_left: f64,
    /// Right end of the bracket on which `V₁` increases from the minimum.
    pub x_right: f64,
    /// Largest energy for which both turning points exist in the brackets.
    pub e_max: f64,
}

impl Well {
    pub fn locate(model: &CrossingModel) -> Result<Self> {
        let v = |x: f64| model.v1_re(x);
        let xs = model.xstar();
        if xs >= 0.0 {
            return Err(Error::Misuse(format!("x* = {xs} must be negative")));
        }
        // golden section on (x*, 0)
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (xs, 0.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        while (b - a).abs() > 1e-12 {
            if v(c) < v(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        let x_min = 0.5 * (a + b);
        let v_min = v(x_min);
        let scan = |dir: f64| -> (f64, f64) {
            let step = 1e-2;
            let mut x = x_min;
            let mut last = v_min;
            loop {
                let next = x + dir * step;
                let vn = v(next);
                if vn <= last || (next - x_min).abs() > BARRIER_SCAN {
                    return (x, last);
                }
                x = next;
                last = vn;
            }
        };
        let (x_left, v_left) = scan(-1.0);
        let (x_right, v_right) = scan(1.0);
        let e_max = v_left.min(v_right);
        if !(v_min < 0.0 && e_max > 0.0) {
            return Err(Error::Misuse("V₁ has no well around the crossing energy".into()));
        }
        Ok(Well {
            x_min,
            v_min,
            x_left,
            x_right,
            e_max,
        })
    }

    fn check_energy(&self, e: f64) -> Result<()> {
        if e <= self.v_min || e >= self.e_max || !e.is_finite() {
            return Err(Error::Range {
                what: "turning points",
                value: e,
                min: self.v_min,
                max: self.e_max,
            });
        }
        Ok(())
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    // keep whichever end has the smaller residual
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Turning points `x₁* < x₁` with `V₁ = E`.
pub fn turning_points(model: &CrossingModel, e: f64) -> Result<(f64, f64)> {
    turning_points_in(model, &Well::locate(model)?, e)
}

/// [`turning_points`] with a precomputed [`Well`].
pub fn turning_points_in(model: &CrossingModel, well: &Well, e: f64) -> Result<(f64, f64)> {
    if e == 0.0 {
        return Ok((model.xstar(), 0.0));
    }
    well.check_energy(e)?;
    let f = |x: f64| model.v1_re(x) - e;
    let left = bisect(f, well.x_left, well.x_min);
    let right = bisect(f, well.x_min, well.x_right);
    Ok((left, right))
}

/// The action `𝒜(E)`.
pub fn action(model: &CrossingModel, e: f64) -> Result<f64> {
    action_in(model, &Well::locate(model)?, e)
}

/// [`action`] with a precomputed [`Well`].
pub fn action_in(model: &CrossingModel, well: &Well, e: f64) -> Result<f64> {
    let (a, b) = turning_points_in(model, well, e)?;
    let q = tanh_sinh_levels(
        |x, _, _| (e - model.v1_re(x)).max(0.0).sqrt(),
        a,
        b,
        ACTION_TOL,
        4,
        12,
    );
    Ok(q.value)
}

/// `𝒜'(E) = ∫ dt / (2√(E − V₁))`, evaluated after the substitution
/// `t = a + (b − a)(1 − cos φ)/2` which removes both endpoint singularities.
pub fn action_prime_direct(model: &CrossingModel, well: &Well, e: f64) -> Result<f64> {
    let (a, b) = turning_points_in(model, well, e)?;
    let len = b - a;
    let f = |phi: f64| {
        let half = 0.5 * phi;
        let offset = len * half.sin().powi(2);
        let t = if phi <= std::f64::consts::FRAC_PI_2 {
            a + offset
        } else {
            b - len * half.cos().powi(2)
        };
        let g = e - model.v1_re(t);
        if g <= 0.0 {
            return 0.0;
        }
        0.5 * len * phi.sin() / (2.0 * g.sqrt())
    };
    Ok(gauss_kronrod(f, 0.0, std::f64::consts::PI, 1e-14).value)
}

/// `𝒜` and its first three derivatives at `E = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionData {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// Upper end of the admissible energy range.
    pub e_max: f64,
    /// Relative gap between the difference and quadrature values of `𝒜'(0)`.
    pub a1_crosscheck: f64,
}

fn richardson(mut table: Vec<f64>) -> f64 {
    // entries at steps h, h/2, h/4, ...; error series in even powers
    let n = table.len();
    for level in 1..n {
        let factor = 4f64.powi(level as i32);
        for i in (level..n).rev() {
            table[i] = (factor * table[i] - table[i - 1]) / (factor - 1.0);
        }
    }
    table[n - 1]
}

/// Derivatives of the action at `E = 0` by Richardson-extrapolated central
/// differences, with `𝒜'(0)` checked against [`action_prime_direct`].
pub fn action_derivatives(model: &CrossingModel) -> Result<ActionData> {
    let well = Well::locate(model)?;
    let base = DERIVATIVE_STEP.min(0.2 * well.e_max).min(-0.2 * well.v_min);
    let act = |e: f64| action_in(model, &well, e);
    let a0 = act(0.0)?;
    let mut d1 = Vec::with_capacity(RICHARDSON_LEVELS);
    let mut d2 = Vec::with_capacity(RICHARDSON_LEVELS);
    let mut d3 = Vec::with_capacity(RICHARDSON_LEVELS);
    for level in 0..RICHARDSON_LEVELS {
        let s = base / 2f64.powi(level as i32);
        let (p1, m1) = (act(s)?, act(-s)?);
        let (p2, m2) = (act(2.0 * s)?, act(-2.0 * s)?);
        d1.push((p1 - m1) / (2.0 * s));
        d2.push((p1 - 2.0 * a0 + m1) / (s * s));
        d3.push((p2 - 2.0 * p1 + 2.0 * m1 - m2) / (2.0 * s * s * s));
    }
    let a1 = richardson(d1);
    let a2 = richardson(d2);
    let a3 = richardson(d3);
    let direct = action_prime_direct(model, &well, 0.0)?;
    let gap = ((a1 - direct) / direct).abs();
    if gap > 1e-6 || !(a0 > 0.0 && a1 > 0.0) {
        return Err(Error::Consistency {
            what: "action derivative",
            detail: format!("difference value {a1:e} vs quadrature {direct:e}"),
        });
    }
    Ok(ActionData {
        a0,
        a1,
        a2,
        a3,
        e_max: well.e_max,
        a1_crosscheck: gap,
    })
}

/// Real solution of `𝒜(E) = target` by safeguarded Newton.
pub fn solve_action(model: &CrossingModel, well: &Well, target: f64, guess: f64) -> Result<f64> {
    let mut lo = well.v_min;
    let mut hi = well.e_max;
    let mut e = guess.clamp(lo + 1e-9, hi - 1e-9);
    for _ in 0..60 {
        let f = action_in(model, well, e)? - target;
        if f > 0.0 {
            hi = e;
        } else {
            lo = e;
        }
        let d = action_prime_direct(model, well, e)?;
        let mut next = e - f / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - e).abs() <= 1e-15 * (1.0 + e.abs()) {
            return Ok(next);
        }
        e = next;
    }
    Err(Error::NoConvergence {
        what: "Bohr-Sommerfeld root",
        iterations: 60,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_model, ModelParams, WellFamily};

    fn harmonic() -> CrossingModel {
        CrossingModel::new(ModelParams {
            family: WellFamily::Polynomial,
            ..ModelParams::default()
        })
    }

    #[test]
    fn zero_energy_turning_points_are_exact() {
        let m = default_model();
        assert_eq!(turning_points(&m, 0.0).unwrap(), (-1.0, 0.0));
    }

    #[test]
    fn turning_points_solve_the_level_equation() {
        let m = default_model();
        for e in [-0.05, 0.02] {
            let (a, b) = turning_points(&m, e).unwrap();
            assert!(a < b);
            assert!((m.v1_re(a) - e).abs() < 1e-13);
            assert!((m.v1_re(b) - e).abs() < 1e-13);
        }
        let (a, b) = turning_points(&m, -0.05).unwrap();
        assert!(a > -1.0 && b < 0.0);
        assert!(turning_points(&m, 0.02).unwrap().1 > 0.0);
        assert!(turning_points(&m, 5.0).is_err());
    }

    #[test]
    fn harmonic_action_is_exact() {
        let m = harmonic();
        for e in [-0.1, 0.0, 0.03] {
            let exact = std::f64::consts::PI * (e + 0.25) / 2.0;
            assert!((action(&m, e).unwrap() - exact).abs() < 1e-12);
        }
        let d = action_derivatives(&m).unwrap();
        assert!((d.a1 - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!(d.a2.abs() < 1e-6 && d.a3.abs() < 1e-3);
    }

    #[test]
    fn action_increases() {
        let m = default_model();
        assert!(action(&m, 0.01).unwrap() > action(&m, 0.0).unwrap());
    }

    #[test]
    fn bohr_sommerfeld_root() {
        let m = default_model();
        let w = Well::locate(&m).unwrap();
        let a = action(&m, 0.0).unwrap();
        let e = solve_action(&m, &w, a + 0.001, 0.0).unwrap();
        assert!((action_in(&m, &w, e).unwrap() - a - 0.001).abs() < 1e-14);
    }
}
