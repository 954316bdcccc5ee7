//! Real shooting for the bound states of the single-channel operator
//! `P₁ = −h² d²/dx² + V₁` on the real line. Independent of the contour
//! machinery; used to check the coupled solver with the interaction off.

use crate::action::Well;
use crate::error::{Error, Result};
use crate::model::CrossingModel;

/// Grid points per `h` in the finer Numerov pass.
pub const POINTS_PER_H: f64 = 80.0;

const RESCALE: f64 = 1e100;

/// Shooting interval and resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingSetup {
    pub left: f64,
    pub right: f64,
    /// Matching point, normally the bottom of the well.
    pub matching: f64,
}

impl ShootingSetup {
    pub fn for_model(model: &CrossingModel) -> Result<Self> {
        let well = Well::locate(model)?;
        Ok(ShootingSetup {
            left: model.xstar() - 7.0,
            right: 6.0,
            matching: well.x_min,
        })
    }
}

/// Numerov solution vanishing at node `from`, marched towards node `to`;
/// returns its values at nodes `to` and `to + 1` of the grid `x_i = x0 + i dx`
/// when marching right, or at `to − 1` and `to` when marching left.
fn numerov(model: &CrossingModel, e: f64, h: f64, x0: f64, dx: f64, from: usize, to: usize) -> (f64, f64) {
    let g = |i: isize| (model.v1_re(x0 + dx * i as f64) - e) / (h * h);
    let c = dx * dx / 12.0;
    let dir: isize = if to >= from { 1 } else { -1 };
    let mut i = from as isize + dir;
    let mut u_prev = 0.0;
    let mut u = 1e-30;
    let mut g_prev = g(from as isize);
    let mut g_cur = g(i);
    let stop = to as isize + dir;
    while i != stop {
        let g_next = g(i + dir);
        let u_next = (2.0 * u * (1.0 + 5.0 * c * g_cur) - u_prev * (1.0 - c * g_prev)) / (1.0 - c * g_next);
        u_prev = u;
        u = u_next;
        g_prev = g_cur;
        g_cur = g_next;
        i += dir;
        if u.abs() > RESCALE {
            u /= RESCALE;
            u_prev /= RESCALE;
        }
    }
    let norm = u_prev.abs() + u.abs();
    // u_prev is at `to`, u one node past it
    if dir > 0 {
        (u_prev / norm, u / norm)
    } else {
        (u / norm, u_prev / norm)
    }
}

/// Discrete Wronskian of the left and right solutions across the matching
/// node, normalised; changes sign at the eigenvalues.
pub fn mismatch(model: &CrossingModel, setup: &ShootingSetup, e: f64, h: f64, per_h: f64) -> f64 {
    let n = ((setup.right - setup.left) * per_h / h).ceil() as usize;
    let dx = (setup.right - setup.left) / n as f64;
    let m = (((setup.matching - setup.left) / dx).round() as usize).clamp(2, n - 3);
    // left solution at nodes m, m+1; right solution at nodes m, m+1
    let (l0, l1) = numerov(model, e, h, setup.left, dx, 0, m);
    let (r0, r1) = numerov(model, e, h, setup.left, dx, n, m + 1);
    l0 * r1 - l1 * r0
}

fn bisect_energy<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Eigenvalue of `P₁` inside `[lo, hi]` at one grid resolution.
fn refine(model: &CrossingModel, setup: &ShootingSetup, h: f64, per_h: f64, lo: f64, hi: f64) -> f64 {
    bisect_energy(|e| mismatch(model, setup, e, h, per_h), lo, hi)
}

/// All eigenvalues of `P₁` in `(e_lo, e_hi)`, Richardson-extrapolated over
/// two Numerov resolutions.
pub fn eigenvalues(model: &CrossingModel, h: f64, e_lo: f64, e_hi: f64) -> Result<Vec<f64>> {
    let setup = ShootingSetup::for_model(model)?;
    let coarse = POINTS_PER_H / 2.0;
    // level spacing ≈ πh/𝒜'; scan well below it
    let step = 0.02 * h;
    let n = ((e_hi - e_lo) / step).ceil() as usize;
    if n == 0 || n > 10_000_000 {
        return Err(Error::Domain {
            what: "shooting scan",
            value: e_hi - e_lo,
            reason: "empty or excessive energy window",
        });
    }
    let f = |e: f64| mismatch(model, &setup, e, h, coarse);
    let mut out = Vec::new();
    let mut a = e_lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = e_lo + (e_hi - e_lo) * i as f64 / n as f64;
        let fb = f(b);
        if fa != 0.0 && fb != 0.0 && (fa < 0.0) != (fb < 0.0) {
            let e1 = refine(model, &setup, h, coarse, a, b);
            let width = 0.5 * step;
            let e2 = refine(model, &setup, h, POINTS_PER_H, e1 - width, e1 + width);
            // Numerov error is O(dx⁴)
            out.push(e2 + (e2 - e1) / 15.0);
        }
        a = b;
        fa = fb;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, WellFamily};

    #[test]
    fn harmonic_levels() {
        // V₁ = x(x+1) = (x+½)² − ¼: levels −¼ + h(2n+1)
        let m = CrossingModel::new(ModelParams {
            family: WellFamily::Polynomial,
            ..ModelParams::default()
        });
        let h = 0.05;
        let e = eigenvalues(&m, h, -0.25, 0.1).unwrap();
        assert!(!e.is_empty());
        for (n, v) in e.iter().enumerate() {
            let exact = -0.25 + h * (2 * n + 1) as f64;
            assert!((v - exact).abs() < 1e-10, "{n}: {v} vs {exact}");
        }
    }
}
