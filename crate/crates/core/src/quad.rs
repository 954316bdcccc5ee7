//! Quadrature rules shared by the integral modules: adaptive Gauss–Kronrod
//! (7/15 points), tanh-sinh for endpoint-singular integrands, and
//! Gauss–Legendre nodes.

use std::f64::consts::FRAC_PI_2;

/// Result of an adaptive quadrature: value plus an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights attach to the odd-indexed Kronrod nodes (and the centre).
const G_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WEIGHTS[7] * fc;
    let mut gauss = G_WEIGHTS[3] * fc;
    for i in 0..7 {
        let dx = r * GK_NODES[i];
        let pair = f(c - dx) + f(c + dx);
        kronrod += GK_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += G_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * r, ((kronrod - gauss) * r).abs())
}

/// Adaptive Gauss–Kronrod on `[a, b]` to absolute tolerance `tol`.
///
/// Global subdivision: the interval with the largest error estimate is
/// bisected until the summed estimate meets `tol`, the estimate stalls at
/// roundoff level, or [`MAX_INTERVALS`] is reached.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
    }
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        let error: f64 = pieces.iter().map(|p| p.3).sum();
        let floor = 50.0 * f64::EPSILON * pieces.iter().map(|p| p.2.abs()).sum::<f64>();
        if error <= tol || error <= floor || pieces.len() >= MAX_INTERVALS {
            return Quadrature {
                value,
                error,
                evaluations,
            };
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // cannot split further; keep the piece and stop refining
            let (v, e) = gk15(&f, lo, hi);
            pieces.push((lo, hi, v, e));
            let value: f64 = pieces.iter().map(|p| p.2).sum();
            let error: f64 = pieces.iter().map(|p| p.3).sum();
            return Quadrature {
                value,
                error,
                evaluations,
            };
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// Cap on the number of subintervals of one adaptive integration.
pub const MAX_INTERVALS: usize = 2000;

/// Sums adaptive Gauss–Kronrod panels over consecutive breakpoints.
pub fn gauss_kronrod_panels<F: Fn(f64) -> f64>(f: F, breaks: &[f64], tol: f64) -> Quadrature {
    let n = breaks.len().saturating_sub(1).max(1) as f64;
    let mut total = Quadrature {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let q = gauss_kronrod(&f, w[0], w[1], tol / n);
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
    }
    total
}

/// Tanh-sinh quadrature on a finite interval.
///
/// The integrand receives `(x, x - a, b - x)`; the two offsets are computed
/// without cancellation so integrands with algebraic endpoint behaviour can
/// be evaluated accurately right up to the endpoints.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quadrature {
    tanh_sinh_levels(f, a, b, tol, 3, 12)
}

/// Tanh-sinh with explicit minimum and maximum refinement levels.
pub fn tanh_sinh_levels<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    min_level: u32,
    max_level: u32,
) -> Quadrature {
    const T_MAX: f64 = 4.0;
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        // 1/(1 + e^{2u}) and 1/(1 + e^{-2u}) without cancellation
        let left_frac = 1.0 / (1.0 + (2.0 * u).exp());
        let right_frac = 1.0 / (1.0 + (-2.0 * u).exp());
        let da = 2.0 * half * right_frac;
        let db = 2.0 * half * left_frac;
        let x = if da <= db { a + da } else { b - db };
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        if w == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let v = f(x, da, db);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };

    let mut step = 1.0;
    let mut sum = eval(0.0);
    let mut evaluations = 1;
    let mut k = 1;
    while k as f64 * step <= T_MAX {
        let t = k as f64 * step;
        sum += eval(t) + eval(-t);
        evaluations += 2;
        k += 1;
    }
    let mut estimate = half * step * sum;
    let mut error = f64::INFINITY;
    for level in 1..=max_level {
        step *= 0.5;
        let mut k = 1;
        while k as f64 * step <= T_MAX {
            let t = k as f64 * step;
            sum += eval(t) + eval(-t);
            evaluations += 2;
            k += 2;
        }
        let next = half * step * sum;
        error = (next - estimate).abs();
        estimate = next;
        if level >= min_level && error <= tol {
            break;
        }
    }
    Quadrature {
        value: estimate,
        error,
        evaluations,
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn kronrod_integrates_smooth_functions() {
        let q = gauss_kronrod(|x| x.sin(), 0.0, PI, 1e-13);
        assert!((q.value - 2.0).abs() < 1e-13);
        let q = gauss_kronrod(|x| (-x * x).exp(), -8.0, 8.0, 1e-13);
        assert!((q.value - PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tanh_sinh_handles_inverse_sqrt_endpoints() {
        // ∫_0^1 dx / sqrt(x(1-x)) = π
        let q = tanh_sinh(|_, da, db| 1.0 / (da * db).sqrt(), 0.0, 1.0, 1e-14);
        assert!((q.value - PI).abs() < 1e-12, "{}", q.value);
        // ∫_{-1}^{1} sqrt(1-x^2) = π/2
        let q = tanh_sinh(|_, da, db| (da * db).sqrt(), -1.0, 1.0, 1e-14);
        assert!((q.value - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert!((s - 2.0 / 19.0).abs() < 1e-14);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
