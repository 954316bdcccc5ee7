//! Direct solver for the coupled system `(P − E)u = 0` along the distortion
//! contour, and the 4×4 Wronskian whose zeros are the resonances.
//!
//! The state of one solution is `(u₁, u₂, h u₁', h u₂')`. With
//! `W = r₀ + i r₁ h D_x` the system reads
//!
//! ```text
//! h² u₁'' = (V₁ − E) u₁ + h r₀ u₂ + h² r₁ u₂'
//! h² u₂'' = (V₂ − E) u₂ + h r₀ u₁ − h² (r₁' u₁ + r₁ u₁')
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::crossing::Side;
use crate::error::{Error, Result};
use crate::model::{CrossingModel, DistortionContour};
use crate::ode::{Dopri5, OdeOptions, OdeStats};
use crate::quad::gauss_legendre;

type C64 = Complex64;
type State = [C64; 8];

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Relative tolerance of the Runge–Kutta pair.
    pub rtol: f64,
    /// Re-orthonormalization interval in units of `h`.
    pub reortho: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { rtol: 1e-11, reortho: 1.0 }
    }
}

/// Smallest accepted ratio between a column after and before projection.
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Two solutions at `x = 0` spanning the decaying subspace of one side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionBasis {
    pub side: Side,
    /// Columns `(u₁, u₂, h u₁', h u₂')`.
    pub columns: [[C64; 4]; 2],
    /// Accumulated log of the normalisation factors per column.
    pub log_scale: [f64; 2],
    pub stats: OdeStats,
}

/// `w·e^{log_scale}` is the Wronskian at energy `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WronskianValue {
    pub w: C64,
    pub log_scale: f64,
    pub e: C64,
    pub h: f64,
    /// Right-hand-side evaluations spent on both sides.
    pub evaluations: usize,
}

impl WronskianValue {
    /// `w·e^{log_scale − reference}`.
    pub fn rescaled(&self, reference: f64) -> C64 {
        self.w * (self.log_scale - reference).exp()
    }

    /// `log|w| + log_scale`.
    pub fn ln_abs(&self) -> f64 {
        self.w.norm().ln() + self.log_scale
    }
}

struct System<'a> {
    model: &'a CrossingModel,
    contour: &'a DistortionContour,
    e: C64,
    h: f64,
}

impl System<'_> {
    fn rhs(&self, s: f64, y: &State) -> State {
        let p = self.contour.at(s);
        let z = p.z;
        let h = self.h;
        let d1 = self.model.v1(z) - self.e;
        let d2 = self.model.v2(z) - self.e;
        let r0 = self.model.r0(z);
        let r1 = self.model.r1(z);
        let r1p = self.model.r1_prime(z);
        let scale = p.dz / h;
        let c21 = r0 * h - r1p * (h * h);
        let mut out = [C64::new(0.0, 0.0); 8];
        for col in 0..2 {
            let o = 4 * col;
            let (u1, u2, p1, p2) = (y[o], y[o + 1], y[o + 2], y[o + 3]);
            out[o] = p1 * scale;
            out[o + 1] = p2 * scale;
            out[o + 2] = (d1 * u1 + r0 * h * u2 + r1 * h * p2) * scale;
            out[o + 3] = (d2 * u2 + c21 * u1 - r1 * h * p1) * scale;
        }
        out
    }
}

fn initial_left(model: &CrossingModel, contour: &DistortionContour, e: C64, h: f64) -> State {
    let z = contour.at(0.0).z;
    let mut y = [C64::new(0.0, 0.0); 8];
    let d1 = model.v1(z) - e;
    let d2 = model.v2(z) - e;
    // growing to the right, i.e. decaying towards −∞
    y[0] = C64::new(1.0, 0.0);
    y[2] = d1.sqrt() - model.v1_prime(z) * h / (d1 * 4.0);
    y[5] = C64::new(1.0, 0.0);
    y[7] = d2.sqrt() - model.v2_prime(z) * h / (d2 * 4.0);
    y
}

fn initial_right(model: &CrossingModel, contour: &DistortionContour, e: C64, h: f64) -> State {
    let z = contour.end();
    let mut y = [C64::new(0.0, 0.0); 8];
    let d1 = model.v1(z) - e;
    let k2 = e - model.v2(z);
    // channel 1 decaying, channel 2 outgoing (decaying along the rotated ray)
    y[0] = C64::new(1.0, 0.0);
    y[2] = -d1.sqrt() - model.v1_prime(z) * h / (d1 * 4.0);
    y[5] = C64::new(1.0, 0.0);
    y[7] = C64::i() * k2.sqrt() + model.v2_prime(z) * h / (k2 * 4.0);
    y
}

/// Complex logs of the WKB factors `(V₁−E)^{−1/4} e^{−∫√(V₁−E)/h}` and
/// `(E−V₂)^{−1/4} e^{i∫√(E−V₂)/h}` between `x_inf` and the end of the ray.
///
/// Scaling the right-hand initial data by these factors removes the fast,
/// purely artificial phase rotation that the far-end normalisation would
/// otherwise give `E ↦ 𝒲₀(E)`.
pub fn ray_wkb_logs(model: &CrossingModel, contour: &DistortionContour, e: C64, h: f64) -> [C64; 2] {
    let (nodes, weights) = gauss_legendre(8);
    let dir = contour.ray_direction();
    let panels = (contour.l_right / 0.25).ceil().max(1.0) as usize;
    let ds = contour.l_right / panels as f64;
    let mut i1 = C64::new(0.0, 0.0);
    let mut i2 = C64::new(0.0, 0.0);
    for k in 0..panels {
        for (x, w) in nodes.iter().zip(&weights) {
            let s = ds * (k as f64 + 0.5 * (x + 1.0));
            let z = C64::new(contour.x_inf, 0.0) + dir * s;
            let wt = dir * (0.5 * ds * w);
            i1 += (model.v1(z) - e).sqrt() * wt;
            i2 += (e - model.v2(z)).sqrt() * wt;
        }
    }
    let end = contour.end();
    [
        -(model.v1(end) - e).ln() * 0.25 - i1 / h,
        -(e - model.v2(end)).ln() * 0.25 + C64::i() * i2 / h,
    ]
}

/// Complex logs of `(V_j−E)^{−1/4} e^{−∫_{−l_left}^{x_j}√(V_j−E)/h}` with
/// reference points `x₁ = x* − 1` and `x₂ = −1` in the forbidden region.
pub fn left_wkb_logs(model: &CrossingModel, contour: &DistortionContour, e: C64, h: f64) -> [C64; 2] {
    let start = -contour.l_left;
    let refs = [(model.xstar() - 1.0).max(start), (-1.0f64).max(start)];
    let z0 = C64::new(start, 0.0);
    let amp = [(model.v1(z0) - e).ln() * -0.25, (model.v2(z0) - e).ln() * -0.25];
    let mut out = [C64::new(0.0, 0.0); 2];
    for j in 0..2 {
        let g = |x: f64| {
            let z = C64::new(x, 0.0);
            let v = if j == 0 { model.v1(z) } else { model.v2(z) };
            (v - e).sqrt()
        };
        let integral = integrate_segment(&g, start, refs[j]);
        out[j] = amp[j] - integral / h;
    }
    out
}

fn integrate_segment<F: Fn(f64) -> C64>(g: &F, a: f64, b: f64) -> C64 {
    let (nodes, weights) = gauss_legendre(8);
    let panels = ((b - a).abs() / 0.25).ceil().max(1.0) as usize;
    let ds = (b - a) / panels as f64;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..panels {
        for (x, w) in nodes.iter().zip(&weights) {
            acc += g(a + ds * (k as f64 + 0.5 * (x + 1.0))) * (0.5 * ds * w);
        }
    }
    acc
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Gram–Schmidt on the two columns; returns the residual ratio of column 2.
fn orthonormalize(y: &mut State, log_scale: &mut [f64; 2]) -> f64 {
    let (c1, c2) = y.split_at_mut(4);
    let n1 = norm(c1);
    for v in c1.iter_mut() {
        *v /= n1;
    }
    let before = norm(c2);
    let proj = dot(c1, c2);
    for (v, u) in c2.iter_mut().zip(c1.iter()) {
        *v -= proj * u;
    }
    let n2 = norm(c2);
    for v in c2.iter_mut() {
        *v /= n2;
    }
    log_scale[0] += n1.ln();
    log_scale[1] += n2.ln();
    n2 / before
}

/// Builds the basis of decaying solutions for one side at `x = 0`.
pub fn propagate_basis(
    model: &CrossingModel,
    contour: &DistortionContour,
    e: C64,
    h: f64,
    side: Side,
) -> Result<SolutionBasis> {
    propagate_basis_with(model, contour, e, h, side, &SolverOptions::default())
}

/// [`propagate_basis`] with explicit solver settings.
pub fn propagate_basis_with(
    model: &CrossingModel,
    contour: &DistortionContour,
    e: C64,
    h: f64,
    side: Side,
    options: &SolverOptions,
) -> Result<SolutionBasis> {
    if !(h > 0.0) || !e.re.is_finite() || !e.im.is_finite() {
        return Err(Error::Domain {
            what: "propagate_basis",
            value: h,
            reason: "h must be positive and E finite",
        });
    }
    let sys = System { model, contour, e, h };
    let f = |s: f64, y: &State| sys.rhs(s, y);
    let mut ode = Dopri5::new(
        OdeOptions {
            rtol: options.rtol,
            ..OdeOptions::default()
        },
        0.05 * h,
    );
    let origin = contour.l_left;
    let corner = contour.l_left + contour.x_inf;
    let (mut y, pieces) = match side {
        Side::L => (initial_left(model, contour, e, h), vec![(0.0, origin)]),
        Side::R => (
            initial_right(model, contour, e, h),
            vec![(contour.length(), corner), (corner, origin)],
        ),
    };
    let mut log_scale = [0.0; 2];
    let interval = options.reortho * h;
    orthonormalize(&mut y, &mut log_scale);
    for (from, to) in pieces {
        let n = ((to - from).abs() / interval).ceil().max(1.0) as usize;
        for i in 0..n {
            let a = from + (to - from) * i as f64 / n as f64;
            let b = if i + 1 == n { to } else { from + (to - from) * (i + 1) as f64 / n as f64 };
            ode.integrate(&f, a, b, &mut y)?;
            let ratio = orthonormalize(&mut y, &mut log_scale);
            if !(ratio > RANK_THRESHOLD) {
                return Err(Error::DegenerateBasis { s: b, ratio });
            }
        }
    }
    let mut columns = [[C64::new(0.0, 0.0); 4]; 2];
    columns[0].copy_from_slice(&y[..4]);
    columns[1].copy_from_slice(&y[4..]);
    let logs = match side {
        Side::L => left_wkb_logs(model, contour, e, h),
        Side::R => ray_wkb_logs(model, contour, e, h),
    };
    // the WKB factors scale the initial columns; only their product with the
    // Gram–Schmidt factors enters the determinant
    for (j, l) in logs.iter().enumerate() {
        log_scale[j] += l.re;
        let phase = C64::from_polar(1.0, l.im);
        for v in columns[j].iter_mut() {
            *v *= phase;
        }
    }
    Ok(SolutionBasis {
        side,
        columns,
        log_scale,
        stats: ode.stats,
    })
}

/// Determinant of a 4×4 complex matrix by LU with partial pivoting.
pub fn det4(mut m: [[C64; 4]; 4]) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap_or(col);
        if m[pivot][col].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..4 {
            let factor = m[row][col] / p;
            for k in col..4 {
                let v = m[col][k];
                m[row][k] -= factor * v;
            }
        }
    }
    det
}

/// The Wronskian of the left and right bases at `x = 0`.
pub fn wronskian(model: &CrossingModel, contour: &DistortionContour, e: C64, h: f64) -> Result<WronskianValue> {
    wronskian_with(model, contour, e, h, &SolverOptions::default())
}

/// [`wronskian`] with explicit solver settings.
pub fn wronskian_with(
    model: &CrossingModel,
    contour: &DistortionContour,
    e: C64,
    h: f64,
    options: &SolverOptions,
) -> Result<WronskianValue> {
    let left = propagate_basis_with(model, contour, e, h, Side::L, options)?;
    let right = propagate_basis_with(model, contour, e, h, Side::R, options)?;
    Ok(wronskian_from(&left, &right, e, h))
}

/// Assembles the Wronskian from two precomputed bases.
pub fn wronskian_from(left: &SolutionBasis, right: &SolutionBasis, e: C64, h: f64) -> WronskianValue {
    let cols = [left.columns[0], left.columns[1], right.columns[0], right.columns[1]];
    let mut m = [[C64::new(0.0, 0.0); 4]; 4];
    for (j, c) in cols.iter().enumerate() {
        for i in 0..4 {
            m[i][j] = c[i];
        }
    }
    WronskianValue {
        w: det4(m),
        log_scale: left.log_scale.iter().chain(&right.log_scale).sum(),
        e,
        h,
        evaluations: left.stats.evaluations + right.stats.evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{default_model, R1Profile};

    fn decoupled() -> CrossingModel {
        default_model().with_interaction(0.0, R1Profile::Constant { value: 0.0 })
    }

    #[test]
    fn determinant_of_known_matrix() {
        let mut m = [[C64::new(0.0, 0.0); 4]; 4];
        for i in 0..4 {
            m[i][i] = C64::new(i as f64 + 1.0, 0.0);
        }
        m[0][3] = C64::new(0.0, 5.0);
        assert!((det4(m) - C64::new(24.0, 0.0)).norm() < 1e-14);
        m.swap(0, 1);
        assert!((det4(m) + C64::new(24.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn decoupled_columns_stay_channel_pure() {
        let m = decoupled();
        let h = 0.04;
        let c = DistortionContour::for_h(&m, h, 0.3, 1.0, 6.0).unwrap();
        for side in [Side::L, Side::R] {
            let b = propagate_basis(&m, &c, C64::new(0.01, -0.001), h, side).unwrap();
            let [c1, c2] = b.columns;
            assert!(c1[1].norm() < 1e-12 && c1[3].norm() < 1e-12);
            assert!(c2[0].norm() < 1e-12 && c2[2].norm() < 1e-12);
        }
    }

    #[test]
    fn upper_half_plane_is_zero_free() {
        let m = default_model();
        let h = 0.04;
        let c = DistortionContour::for_h(&m, h, 0.3, 1.0, 6.0).unwrap();
        let w = wronskian(&m, &c, C64::new(0.0, 0.02), h).unwrap();
        assert!(w.w.norm() > 1e-3);
    }
}
