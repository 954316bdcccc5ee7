//! Real-argument Airy functions Ai, Bi and their derivatives.
//!
//! Inside `[-10, 10]` values are obtained by Taylor re-expansion of the Airy
//! equation `y'' = x y` from a table of anchor points spaced `0.25` apart.
//! The table is built once: the oscillatory side and `Bi` on the positive
//! side are stepped outward from the closed-form values at the origin, while
//! `Ai` on the positive side is stepped inward from `x = 14`, where the
//! exponential asymptotic expansion is accurate to far below double
//! precision. Each stepping direction follows the dominant solution, so the
//! recurrences stay stable. Outside `[-10, 10]` the asymptotic expansions are
//! summed up to their smallest term.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Ai(0) = 3^{-2/3} / Γ(2/3).
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// Ai'(0) = -3^{-1/3} / Γ(1/3).
pub const AIP0: f64 = -0.258_819_403_792_806_8;
/// Bi(0) = 3^{-1/6} / Γ(2/3).
pub const BI0: f64 = 0.614_926_627_446_000_7;
/// Bi'(0) = 3^{1/6} / Γ(1/3).
pub const BIP0: f64 = 0.448_288_357_353_826_4;

/// Smallest and largest argument accepted by [`airy_eval`].
pub const AIRY_MIN_ARG: f64 = -100.0;
pub const AIRY_MAX_ARG: f64 = 100.0;

const ANCHOR_STEP: f64 = 0.25;
const ANCHOR_LIMIT: f64 = 10.0;
const ANCHOR_COUNT: usize = 81;
const AI_START: f64 = 14.0;

/// Values of Ai, Ai', Bi, Bi' at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValue {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

impl AiryValue {
    /// `Ai·Bi' − Ai'·Bi`, identically `1/π`.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bip - self.aip * self.bi
    }
}

/// Evaluates Ai, Ai', Bi, Bi' at `x`.
pub fn airy_eval(x: f64) -> Result<AiryValue> {
    if !x.is_finite() || !(AIRY_MIN_ARG..=AIRY_MAX_ARG).contains(&x) {
        return Err(Error::Range {
            what: "airy_eval",
            value: x,
            min: AIRY_MIN_ARG,
            max: AIRY_MAX_ARG,
        });
    }
    Ok(if x > ANCHOR_LIMIT {
        asymptotic_positive(x)
    } else if x < -ANCHOR_LIMIT {
        asymptotic_negative(-x)
    } else {
        from_anchor(x)
    })
}

/// Shorthand for `airy_eval(x)?.ai`.
pub fn ai(x: f64) -> Result<f64> {
    airy_eval(x).map(|v| v.ai)
}

/// Shorthand for `airy_eval(x)?.aip`.
pub fn aip(x: f64) -> Result<f64> {
    airy_eval(x).map(|v| v.aip)
}

/// `(ln Ai(x), ln Bi(x))` for `x ≥ 4`, without overflow for any large `x`.
pub fn airy_scaled_tail(x: f64) -> Result<(f64, f64)> {
    if x.is_nan() || x < 4.0 {
        return Err(Error::Domain {
            what: "airy_scaled_tail",
            value: x,
            reason: "requires x >= 4",
        });
    }
    if x <= ANCHOR_LIMIT {
        let v = from_anchor(x);
        return Ok((v.ai.ln(), v.bi.ln()));
    }
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (alt, plain) = exp_series_u(zeta);
    let base = -0.25 * x.ln();
    let log_ai = -zeta - (2.0 * PI.sqrt()).ln() + base + alt.ln();
    let log_bi = zeta - PI.sqrt().ln() + base + plain.ln();
    Ok((log_ai, log_bi))
}

/// First `n` positive zeros of Ai', i.e. the points `-a'_k` with `Ai'(-a'_k) = 0`,
/// returned as the positive numbers `a'_k` in increasing order.
pub fn aip_zeros(n: usize) -> Vec<f64> {
    let mut zeros = Vec::with_capacity(n);
    let mut x = 0.0_f64;
    let mut prev = from_anchor(0.0).aip;
    let step = 0.05;
    while zeros.len() < n && x < -AIRY_MIN_ARG - step {
        let next_x = x + step;
        let next = airy_eval(-next_x).map(|v| v.aip).unwrap_or(f64::NAN);
        if prev == 0.0 {
            zeros.push(x);
        } else if prev.signum() != next.signum() {
            // Newton on Ai'(-t): d/dt Ai'(-t) = t·Ai(-t)
            let mut t = x + step * prev.abs() / (prev.abs() + next.abs());
            for _ in 0..40 {
                let v = airy_eval(-t).expect("bracketed zero in range");
                let dt = v.aip / (t * v.ai);
                t -= dt;
                if dt.abs() < 1e-15 * t.abs() {
                    break;
                }
            }
            zeros.push(t);
        }
        x = next_x;
        prev = next;
    }
    zeros
}

struct AnchorTable {
    ai: [(f64, f64); ANCHOR_COUNT],
    bi: [(f64, f64); ANCHOR_COUNT],
}

fn anchors() -> &'static AnchorTable {
    static TABLE: OnceLock<AnchorTable> = OnceLock::new();
    TABLE.get_or_init(build_anchors)
}

fn anchor_x(j: usize) -> f64 {
    -ANCHOR_LIMIT + ANCHOR_STEP * j as f64
}

fn build_anchors() -> AnchorTable {
    let mut ai = [(0.0, 0.0); ANCHOR_COUNT];
    let mut bi = [(0.0, 0.0); ANCHOR_COUNT];
    let origin = (ANCHOR_LIMIT / ANCHOR_STEP) as usize;
    ai[origin] = (AI0, AIP0);
    bi[origin] = (BI0, BIP0);

    // oscillatory side: both solutions are bounded, step outward
    let mut a = (AI0, AIP0);
    let mut b = (BI0, BIP0);
    for j in (0..origin).rev() {
        let x0 = anchor_x(j + 1);
        a = taylor_step(x0, a, -ANCHOR_STEP);
        b = taylor_step(x0, b, -ANCHOR_STEP);
        ai[j] = a;
        bi[j] = b;
    }

    // Bi dominates for x > 0: step outward
    let mut b = (BI0, BIP0);
    for j in origin + 1..ANCHOR_COUNT {
        b = taylor_step(anchor_x(j - 1), b, ANCHOR_STEP);
        bi[j] = b;
    }

    // Ai is recessive for x > 0: step inward from the asymptotic region
    let start = asymptotic_positive(AI_START);
    let mut a = (start.ai, start.aip);
    let mut x = AI_START;
    while x > ANCHOR_LIMIT + 0.5 * ANCHOR_STEP {
        a = taylor_step(x, a, -ANCHOR_STEP);
        x -= ANCHOR_STEP;
    }
    ai[ANCHOR_COUNT - 1] = a;
    for j in (origin + 1..ANCHOR_COUNT - 1).rev() {
        a = taylor_step(anchor_x(j + 1), a, -ANCHOR_STEP);
        ai[j] = a;
    }

    AnchorTable { ai, bi }
}

fn from_anchor(x: f64) -> AiryValue {
    let table = anchors();
    let j = ((x + ANCHOR_LIMIT) / ANCHOR_STEP).round() as usize;
    let j = j.min(ANCHOR_COUNT - 1);
    let x0 = anchor_x(j);
    let d = x - x0;
    let (ai, aip) = taylor_step(x0, table.ai[j], d);
    let (bi, bip) = taylor_step(x0, table.bi[j], d);
    AiryValue { ai, aip, bi, bip }
}

/// Advances `(y, y')` of a solution of `y'' = x y` from `x0` to `x0 + d`.
fn taylor_step(x0: f64, (y0, yp0): (f64, f64), d: f64) -> (f64, f64) {
    if d == 0.0 {
        return (y0, yp0);
    }
    // a_{n+2} = (x0 a_n + a_{n-1}) / ((n+2)(n+1)), stored as c_n = a_n d^n
    let d2 = d * d;
    let d3 = d2 * d;
    let mut c = [y0, yp0 * d, 0.5 * x0 * y0 * d2];
    let mut y = c[0] + c[1] + c[2];
    let mut yp = c[1] + 2.0 * c[2];
    let mut small = 0;
    for n in 1..120 {
        let m = (n + 2) as f64;
        let next = (x0 * c[1] * d2 + c[0] * d3) / (m * (m - 1.0));
        c = [c[1], c[2], next];
        y += next;
        yp += m * next;
        let scale = y.abs().max(yp.abs() * d.abs()).max(1e-300);
        if next.abs() * m < 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (y, yp / d)
}

/// Coefficients u_k, v_k of the Airy asymptotic expansions.
fn uv_coefficients(max: usize) -> (Vec<f64>, Vec<f64>) {
    let mut u = Vec::with_capacity(max + 1);
    let mut v = Vec::with_capacity(max + 1);
    u.push(1.0);
    v.push(1.0);
    for k in 1..=max {
        let kf = k as f64;
        let uk = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        u.push(uk);
        v.push(-(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * uk);
    }
    (u, v)
}

fn coefficients() -> &'static (Vec<f64>, Vec<f64>) {
    static UV: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    UV.get_or_init(|| uv_coefficients(60))
}

/// Sums `Σ s_k c_k ζ^{-k}` up to the smallest term, where `sign(k)` gives `s_k`.
fn truncated_sum(coef: &[f64], zeta: f64, step: usize, offset: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    let mut j = 0usize;
    loop {
        let k = offset + step * j;
        if k >= coef.len() {
            break;
        }
        let sign = if alternate && j % 2 == 1 { -1.0 } else { 1.0 };
        let term = sign * coef[k] * zeta.powi(-(k as i32));
        if term.abs() > last {
            break;
        }
        sum += term;
        last = term.abs();
        if last < 1e-18 * sum.abs() {
            break;
        }
        j += 1;
    }
    sum
}

/// `(Σ(−1)^k u_k ζ^{−k}, Σ u_k ζ^{−k})`.
fn exp_series_u(zeta: f64) -> (f64, f64) {
    let (u, _) = coefficients();
    (
        truncated_sum(u, zeta, 1, 0, true),
        truncated_sum(u, zeta, 1, 0, false),
    )
}

fn asymptotic_positive(x: f64) -> AiryValue {
    let (u, v) = coefficients();
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let q = x.powf(0.25);
    let sp = PI.sqrt();
    let decay = (-zeta).exp();
    let growth = zeta.exp();
    AiryValue {
        ai: decay / (2.0 * sp * q) * truncated_sum(u, zeta, 1, 0, true),
        aip: -q * decay / (2.0 * sp) * truncated_sum(v, zeta, 1, 0, true),
        bi: growth / (sp * q) * truncated_sum(u, zeta, 1, 0, false),
        bip: q * growth / sp * truncated_sum(v, zeta, 1, 0, false),
    }
}

/// Values at `-z` for `z > 0` from the modulus/phase form of the oscillatory expansion.
fn asymptotic_negative(z: f64) -> AiryValue {
    let (u, v) = coefficients();
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let q = z.powf(0.25);
    let sp = PI.sqrt();
    let pu = truncated_sum(u, zeta, 2, 0, true);
    let qu = truncated_sum(u, zeta, 2, 1, true);
    let pv = truncated_sum(v, zeta, 2, 0, true);
    let qv = truncated_sum(v, zeta, 2, 1, true);
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    AiryValue {
        ai: (c * pu + s * qu) / (sp * q),
        bi: (-s * pu + c * qu) / (sp * q),
        aip: q / sp * (s * pv - c * qv),
        bip: q / sp * (c * pv + s * qv),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_matches_closed_form() {
        let v = airy_eval(0.0).unwrap();
        assert_eq!(v.ai, AI0);
        assert_eq!(v.aip, AIP0);
        assert_eq!(v.bi, BI0);
        assert_eq!(v.bip, BIP0);
    }

    #[test]
    fn inward_stepped_ai_lands_on_closed_form() {
        // anchor just right of the origin, stepped back to 0
        let t = anchors();
        let j = (ANCHOR_LIMIT / ANCHOR_STEP) as usize + 1;
        let (a, ap) = taylor_step(anchor_x(j), t.ai[j], -ANCHOR_STEP);
        assert!((a - AI0).abs() < 2e-15, "{a}");
        assert!((ap - AIP0).abs() < 2e-15, "{ap}");
    }

    #[test]
    fn branches_agree_at_the_switch_points() {
        for &x in &[ANCHOR_LIMIT, -ANCHOR_LIMIT] {
            let a = from_anchor(x);
            let b = if x > 0.0 {
                asymptotic_positive(x)
            } else {
                asymptotic_negative(-x)
            };
            for (p, q) in [(a.ai, b.ai), (a.aip, b.aip), (a.bi, b.bi), (a.bip, b.bip)] {
                assert!((p - q).abs() <= 1e-12 * q.abs().max(1e-300), "x={x}: {p} vs {q}");
            }
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(airy_eval(150.0), Err(Error::Range { .. })));
        assert!(matches!(airy_eval(f64::NAN), Err(Error::Range { .. })));
        assert!(airy_scaled_tail(3.9).is_err());
    }

    #[test]
    fn tail_logs_match_direct_values() {
        for &x in &[4.0, 6.5, 10.0, 12.0, 30.0] {
            let (la, lb) = airy_scaled_tail(x).unwrap();
            let v = airy_eval(x).unwrap();
            assert!((la - v.ai.ln()).abs() < 1e-10 * la.abs(), "x={x}");
            assert!((lb - v.bi.ln()).abs() < 1e-10 * lb.abs(), "x={x}");
        }
        // far beyond the overflow point of Bi
        let (la, lb) = airy_scaled_tail(400.0).unwrap();
        let zeta = 2.0 / 3.0 * 400f64.powf(1.5);
        let lead = -zeta - 0.25 * 400f64.ln() - (2.0 * PI.sqrt()).ln();
        assert!((la - lead).abs() < 1e-4);
        assert!(lb > 5000.0);
    }

    #[test]
    fn first_derivative_zeros() {
        let z = aip_zeros(3);
        assert!((z[0] - 1.018_792_971_647_471).abs() < 1e-12, "{}", z[0]);
        assert!((z[1] - 3.248_197_582_179_837).abs() < 1e-12, "{}", z[1]);
        assert!((z[2] - 4.820_099_211_178_736).abs() < 1e-12, "{}", z[2]);
    }
}
