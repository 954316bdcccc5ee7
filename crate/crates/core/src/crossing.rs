//! Airy cross-product integrals at the crossing point.
//!
//! All integrals share the two rescaled arguments
//!
//! ```text
//! a(y) = τ₁^{1/3} (y − t/τ₁),   b(y) = −τ₂^{1/3} (y + t/τ₂)
//! ```
//!
//! On `[0, ∞)` the factor evaluated at `a(y)` decays super-exponentially, on
//! `(−∞, 0]` the one at `b(y)` does. Every integral is split at the origin and
//! each half-line piece is integrated on panels no longer than half a local
//! Airy wavelength, up to a cutoff where the decaying factor drops below
//! `e^{-40}`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::gauss_kronrod_panels;
use crate::specfun::{airy_eval, airy_scaled_tail, AiryValue};

/// Largest |t| accepted by the integral routines.
pub const T_LIMIT: f64 = 10.0;

const PANEL_TOL: f64 = 1e-13;
const TAIL_LOG: f64 = -40.0;

/// Crossing slopes `τ₁ = V₁'(0)`, `τ₂ = −V₂'(0)` and the derived `τ₃`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SlopeParams", into = "SlopeParams")]
pub struct SlopePair {
    tau1: f64,
    tau2: f64,
    tau3: f64,
}

#[derive(Serialize, Deserialize)]
struct SlopeParams {
    tau1: f64,
    tau2: f64,
}

impl TryFrom<SlopeParams> for SlopePair {
    type Error = Error;
    fn try_from(p: SlopeParams) -> Result<Self> {
        SlopePair::new(p.tau1, p.tau2)
    }
}

impl From<SlopePair> for SlopeParams {
    fn from(s: SlopePair) -> Self {
        SlopeParams {
            tau1: s.tau1,
            tau2: s.tau2,
        }
    }
}

impl SlopePair {
    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        if !(tau1 > 0.0 && tau2 > 0.0 && tau1.is_finite() && tau2.is_finite()) {
            return Err(Error::Misuse(format!(
                "slopes must be positive, got tau1 = {tau1}, tau2 = {tau2}"
            )));
        }
        Ok(SlopePair {
            tau1,
            tau2,
            tau3: 1.0 / (1.0 / tau1 + 1.0 / tau2),
        })
    }

    pub fn tau1(&self) -> f64 {
        self.tau1
    }

    pub fn tau2(&self) -> f64 {
        self.tau2
    }

    /// `τ₃` with `1/τ₃ = 1/τ₁ + 1/τ₂`.
    pub fn tau3(&self) -> f64 {
        self.tau3
    }

    /// Rescaled argument `−τ₃^{−2/3} t` of the closed forms.
    pub fn closed_form_arg(&self, t: f64) -> f64 {
        -self.tau3.powf(-2.0 / 3.0) * t
    }
}

/// Which of the two crossing channels an integral belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    One,
    Two,
}

/// Half-line of integration: `L = (−∞, 0]`, `R = [0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

/// `A` integrals involve only Ai; `B` integrals carry one Bi factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    A,
    B,
}

/// All crossing integrals at one rescaled energy `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingIntegrals {
    pub t: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub nu_a1r: f64,
    pub nu_b1r: f64,
    pub nu_a2r: f64,
    pub nu_b2r: f64,
    pub nu_a1l: f64,
    pub nu_b1l: f64,
    pub nu_a2l: f64,
    pub nu_b2l: f64,
}

impl CrossingIntegrals {
    pub fn compute(t: f64, slopes: &SlopePair) -> Result<Self> {
        use Channel::*;
        use Kind::*;
        use Side::*;
        Ok(CrossingIntegrals {
            t,
            mu1: mu(One, t, slopes)?,
            mu2: mu(Two, t, slopes)?,
            nu_a1r: nu(One, R, A, t, slopes)?,
            nu_b1r: nu(One, R, B, t, slopes)?,
            nu_a2r: nu(Two, R, A, t, slopes)?,
            nu_b2r: nu(Two, R, B, t, slopes)?,
            nu_a1l: nu(One, L, A, t, slopes)?,
            nu_b1l: nu(One, L, B, t, slopes)?,
            nu_a2l: nu(Two, L, A, t, slopes)?,
            nu_b2l: nu(Two, L, B, t, slopes)?,
        })
    }

    /// `ν^A_{1,R} + ν^A_{1,L}`.
    pub fn nu_a1_sum(&self) -> f64 {
        self.nu_a1r + self.nu_a1l
    }

    /// `ν^A_{2,R} + ν^A_{2,L}`.
    pub fn nu_a2_sum(&self) -> f64 {
        self.nu_a2r + self.nu_a2l
    }
}

/// Factor of an integrand: which Airy function (or derivative) is applied.
#[derive(Debug, Clone, Copy)]
enum Factor {
    Ai,
    Aip,
    Bi,
    Bip,
}

impl Factor {
    fn pick(self, v: &AiryValue) -> f64 {
        match self {
            Factor::Ai => v.ai,
            Factor::Aip => v.aip,
            Factor::Bi => v.bi,
            Factor::Bip => v.bip,
        }
    }
}

/// Affine argument `scale·(y − shift)` of one factor.
#[derive(Debug, Clone, Copy)]
struct Arg {
    scale: f64,
    shift: f64,
}

impl Arg {
    fn at(&self, y: f64) -> f64 {
        self.scale * (y - self.shift)
    }

    /// Local angular frequency in `y` where the argument is negative.
    fn omega(&self, y: f64) -> f64 {
        let x = self.at(y);
        if x < 0.0 {
            self.scale.abs() * (-x).sqrt()
        } else {
            0.0
        }
    }
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() || t.abs() > T_LIMIT {
        return Err(Error::Range {
            what: "crossing integral",
            value: t,
            min: -T_LIMIT,
            max: T_LIMIT,
        });
    }
    Ok(())
}

/// Airy argument beyond which `|Ai|`-type factors are below `e^{TAIL_LOG}`,
/// including the `x^{1/4}` growth of the derivative.
fn tail_cutoff() -> f64 {
    static CUT: OnceLock<f64> = OnceLock::new();
    *CUT.get_or_init(|| {
        let mut x = 4.0;
        loop {
            let (log_ai, _) = airy_scaled_tail(x).expect("x >= 4");
            if log_ai + 0.5 * x.ln() < TAIL_LOG {
                return x;
            }
            x += 0.25;
        }
    })
}

/// `∫ f1(a(y)) f2(b(y)) dy` over one half-line, where the factor whose
/// argument tends to `+∞` on that side is the decaying one.
fn half_line(side: Side, f1: Factor, a: Arg, f2: Factor, b: Arg) -> Result<f64> {
    let cut = tail_cutoff();
    // decaying argument reaches `cut` at y_cut
    let (lo, hi) = match side {
        Side::R => {
            let y_cut = a.shift + cut / a.scale;
            if y_cut <= 0.0 {
                return Ok(0.0);
            }
            (0.0, y_cut)
        }
        Side::L => {
            let y_cut = b.shift + cut / b.scale;
            if y_cut >= 0.0 {
                return Ok(0.0);
            }
            (y_cut, 0.0)
        }
    };

    let mut breaks = vec![lo];
    let mut y = lo;
    while y < hi {
        let omega = a.omega(y) + b.omega(y);
        let len = if omega > 0.0 {
            (std::f64::consts::PI / omega).min(1.0)
        } else {
            1.0
        };
        y = (y + len).min(hi);
        breaks.push(y);
    }

    // arguments stay inside the Airy range for |t| ≤ T_LIMIT and slopes of order one;
    // anything else surfaces as a non-finite value
    let integrand = |y: f64| -> f64 {
        match (airy_eval(a.at(y)), airy_eval(b.at(y))) {
            (Ok(u), Ok(v)) => f1.pick(&u) * f2.pick(&v),
            _ => f64::NAN,
        }
    };
    let q = gauss_kronrod_panels(integrand, &breaks, PANEL_TOL);
    if !q.value.is_finite() {
        return Err(Error::Range {
            what: "crossing integrand argument",
            value: lo,
            min: crate::specfun::AIRY_MIN_ARG,
            max: crate::specfun::AIRY_MAX_ARG,
        });
    }
    Ok(q.value)
}

fn args(slopes: &SlopePair, t: f64, swap: bool) -> (Arg, Arg) {
    let (t1, t2) = if swap {
        (slopes.tau2, slopes.tau1)
    } else {
        (slopes.tau1, slopes.tau2)
    };
    (
        Arg {
            scale: t1.cbrt(),
            shift: t / t1,
        },
        Arg {
            scale: -t2.cbrt(),
            shift: -t / t2,
        },
    )
}

/// `μ₁(t)` or `μ₂(t)`: the `[0, ∞)` Ai·Ai integrals of the elliptic-interaction width.
pub fn mu(j: Channel, t: f64, slopes: &SlopePair) -> Result<f64> {
    check_t(t)?;
    let (a, b) = args(slopes, t, j == Channel::Two);
    half_line(Side::R, Factor::Ai, a, Factor::Ai, b)
}

/// One of the eight `ν` integrals.
pub fn nu(j: Channel, side: Side, kind: Kind, t: f64, slopes: &SlopePair) -> Result<f64> {
    check_t(t)?;
    let (a, b) = args(slopes, t, false);
    use Channel::*;
    use Factor::*;
    use Kind::*;
    use Side::*;
    let (f1, f2) = match (j, side, kind) {
        (One, _, A) => (Aip, Ai),
        (One, R, B) => (Aip, Bi),
        (One, L, B) => (Bip, Ai),
        (Two, _, A) => (Ai, Aip),
        (Two, R, B) => (Ai, Bip),
        (Two, L, B) => (Bi, Aip),
    };
    half_line(side, f1, a, f2, b)
}

/// `ν^A_{j,R}(t) + ν^A_{j,L}(t)`, always assembled from the two half-lines.
pub fn nu_a_sum(j: Channel, t: f64, slopes: &SlopePair) -> Result<f64> {
    Ok(nu(j, Side::R, Kind::A, t, slopes)? + nu(j, Side::L, Kind::A, t, slopes)?)
}

/// `∫_ℝ Ai(τ₁^{1/3}(y − t/τ₁)) Ai(−τ₂^{1/3}(y + t/τ₂)) dy` by quadrature (L plus R).
pub fn airy_product_integral(t: f64, slopes: &SlopePair) -> Result<f64> {
    check_t(t)?;
    let (a, b) = args(slopes, t, false);
    Ok(half_line(Side::R, Factor::Ai, a, Factor::Ai, b)?
        + half_line(Side::L, Factor::Ai, a, Factor::Ai, b)?)
}

/// Closed form `(τ₁+τ₂)^{−1/3} Ai(−τ₃^{−2/3} t)` of the full-line product.
pub fn airy_product_closed_form(t: f64, slopes: &SlopePair) -> Result<f64> {
    check_t(t)?;
    let x = slopes.closed_form_arg(t);
    Ok((slopes.tau1 + slopes.tau2).powf(-1.0 / 3.0) * airy_eval(x)?.ai)
}

/// `d/dt` of [`airy_product_closed_form`].
pub fn airy_product_closed_form_dt(t: f64, slopes: &SlopePair) -> Result<f64> {
    check_t(t)?;
    let x = slopes.closed_form_arg(t);
    Ok(-(slopes.tau1 + slopes.tau2).powf(-1.0 / 3.0)
        * slopes.tau3.powf(-2.0 / 3.0)
        * airy_eval(x)?.aip)
}

/// `(τ₃^{1/3}/(τ₁+τ₂)) Ai'(−τ₃^{−2/3} t)²`, the closed form of the product of the two ν^A sums.
pub fn nu_product_closed_form(t: f64, slopes: &SlopePair) -> Result<f64> {
    check_t(t)?;
    let aip = airy_eval(slopes.closed_form_arg(t))?.aip;
    Ok(slopes.tau3.cbrt() / (slopes.tau1 + slopes.tau2) * aip * aip)
}
