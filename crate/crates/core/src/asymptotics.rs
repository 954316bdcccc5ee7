//! Asymptotic resonance predictions: the Bohr–Sommerfeld points `λ_k`, the
//! two width laws (scalar interaction `r₀` and vector-field interaction
//! `i r₁ h D_x`), and the reduced quantization condition.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::action::{solve_action, ActionData, Well};
use crate::crossing::{mu, nu_a_sum, Channel, SlopePair};
use crate::error::{Error, Result};
use crate::model::CrossingModel;
use crate::specfun::aip;

/// Where a resonance value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Numeric,
    Thm1,
    Thm2,
    Reduced,
}

/// A resonance `E = ρ h^{2/3}` with index `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub k: i64,
    pub e: Complex64,
    pub h: f64,
    pub rho: Complex64,
    pub provenance: Provenance,
}

impl Resonance {
    /// Builds from the rescaled energy; `e` is computed as `rho·h^{2/3}`.
    pub fn from_rho(k: i64, rho: Complex64, h: f64, provenance: Provenance) -> Self {
        Resonance {
            k,
            e: rho * h.powf(2.0 / 3.0),
            h,
            rho,
            provenance,
        }
    }

    pub fn from_energy(k: i64, e: Complex64, h: f64, provenance: Provenance) -> Self {
        let rho = e / h.powf(2.0 / 3.0);
        Resonance::from_rho(k, rho, h, provenance)
    }
}

/// `λ_k(h) = (−𝒜(0) + (k + ½)πh) / (𝒜'(0) h^{2/3})`.
pub fn lambda_k(actions: &ActionData, h: f64, k: i64) -> f64 {
    (-actions.a0 + (k as f64 + 0.5) * PI * h) / (actions.a1 * h.powf(2.0 / 3.0))
}

/// All `k` with `|λ_k(h)| ≤ c0`. The range is empty when no index qualifies.
pub fn k_window(actions: &ActionData, h: f64, c0: f64) -> RangeInclusive<i64> {
    let spread = c0 * actions.a1 * h.powf(2.0 / 3.0);
    let lo = ((actions.a0 - spread) / (PI * h) - 0.5).ceil() as i64;
    let hi = ((actions.a0 + spread) / (PI * h) - 0.5).floor() as i64;
    // guard the rounding at the edges against the defining inequality
    let lo = (lo - 1..=lo + 1)
        .find(|&k| lambda_k(actions, h, k).abs() <= c0)
        .unwrap_or(lo);
    let hi = (hi - 1..=hi + 1)
        .rev()
        .find(|&k| lambda_k(actions, h, k).abs() <= c0)
        .unwrap_or(hi);
    lo..=hi
}

/// Index of the window member closest to the crossing energy.
pub fn central_k(actions: &ActionData, h: f64) -> i64 {
    let k = (actions.a0 / (PI * h) - 0.5).round() as i64;
    (k - 1..=k + 1)
        .min_by(|a, b| {
            lambda_k(actions, h, *a)
                .abs()
                .total_cmp(&lambda_k(actions, h, *b).abs())
        })
        .unwrap_or(k)
}

fn re_two_term(actions: &ActionData, h: f64, lambda: f64) -> f64 {
    lambda * h.powf(2.0 / 3.0) - actions.a2 / (2.0 * actions.a1) * lambda * lambda * h.powf(4.0 / 3.0)
}

/// Two-term estimate of `Re ρ_k`, used to place box edges between zeros.
pub fn rho_estimate(actions: &ActionData, h: f64, k: i64) -> f64 {
    re_two_term(actions, h, lambda_k(actions, h, k)) / h.powf(2.0 / 3.0)
}

fn re_third_term(actions: &ActionData, h: f64, lambda: f64) -> f64 {
    -actions.a3 / (6.0 * actions.a1) * lambda.powi(3) * h * h
}

/// Prediction for a scalar interaction `r₀(0) ≠ 0`: width of order `h^{5/3}`.
pub fn predict_thm1(
    model: &CrossingModel,
    actions: &ActionData,
    slopes: &SlopePair,
    h: f64,
    k: i64,
) -> Result<Resonance> {
    let lambda = lambda_k(actions, h, k);
    let re = re_two_term(actions, h, lambda);
    let r0 = model.r0_at_crossing();
    let im = if r0 == 0.0 {
        0.0
    } else {
        let m1 = mu(Channel::One, lambda, slopes)?;
        let m2 = mu(Channel::Two, lambda, slopes)?;
        -(2.0 * PI * PI * r0 * r0 / actions.a1)
            * (slopes.tau1() * slopes.tau2()).cbrt()
            * (m1 * m1 + m2 * m2)
            * h.powf(5.0 / 3.0)
    };
    Ok(Resonance::from_energy(k, Complex64::new(re, im), h, Provenance::Thm1))
}

/// `τ₃^{1/3}/(τ₁+τ₂)·Ai'(−τ₃^{−2/3}ρ)²`.
fn width_profile(slopes: &SlopePair, rho: f64) -> Result<f64> {
    let d = aip(slopes.closed_form_arg(rho))?;
    Ok(slopes.tau3().cbrt() / (slopes.tau1() + slopes.tau2()) * d * d)
}

/// Prediction for the vector-field interaction (`r₀ ≡ 0`): width of order
/// `h^{7/3}` and a three-term real part.
pub fn predict_thm2(
    model: &CrossingModel,
    actions: &ActionData,
    slopes: &SlopePair,
    h: f64,
    k: i64,
) -> Result<Resonance> {
    if !model.r0_vanishes() {
        return Err(Error::Misuse(format!(
            "vector-field width law needs r0 ≡ 0 (A4), got r0 = {}",
            model.r0_at_crossing()
        )));
    }
    let lambda = lambda_k(actions, h, k);
    let re = re_two_term(actions, h, lambda) + re_third_term(actions, h, lambda);
    let r1 = model.r1_at_crossing();
    let im = -(PI * PI * r1 * r1 / actions.a1) * width_profile(slopes, lambda)? * h.powf(7.0 / 3.0);
    Ok(Resonance::from_energy(k, Complex64::new(re, im), h, Provenance::Thm2))
}

/// Leading term of `Im G`: `π² r₁(0)² (ν^A_{1,R}+ν^A_{1,L})(ν^A_{2,R}+ν^A_{2,L})`.
pub fn im_g(model: &CrossingModel, slopes: &SlopePair, rho_re: f64) -> Result<f64> {
    let r1 = model.r1_at_crossing();
    if r1 == 0.0 {
        return Ok(0.0);
    }
    let s1 = nu_a_sum(Channel::One, rho_re, slopes)?;
    let s2 = nu_a_sum(Channel::Two, rho_re, slopes)?;
    Ok(PI * PI * r1 * r1 * s1 * s2)
}

/// Solution of the reduced condition `cos(𝒜/h) = h^{4/3} sin(𝒜/h) G`.
///
/// The real part is the exact Bohr–Sommerfeld root `E_BS`; `Re G` is not
/// known and is dropped. The imaginary part is `−h^{7/3} Im G(λ_k)/𝒜'(0)`.
pub fn predict_reduced(
    model: &CrossingModel,
    actions: &ActionData,
    slopes: &SlopePair,
    h: f64,
    k: i64,
) -> Result<Resonance> {
    Ok(reduced_detail(model, actions, slopes, h, k)?.resonance)
}

/// Output of [`reduced_detail`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedPrediction {
    pub resonance: Resonance,
    /// Bohr–Sommerfeld root `E_BS`.
    pub e_bs: f64,
    /// Width evaluated at `ρ_BS = E_BS h^{−2/3}` and divided by `𝒜'(E_BS)`.
    pub im_at_bs: f64,
}

/// [`predict_reduced`] together with the width re-evaluated at the
/// Bohr–Sommerfeld point.
pub fn reduced_detail(
    model: &CrossingModel,
    actions: &ActionData,
    slopes: &SlopePair,
    h: f64,
    k: i64,
) -> Result<ReducedPrediction> {
    if !model.r0_vanishes() {
        return Err(Error::Misuse(format!(
            "reduced condition needs r0 ≡ 0 (A4), got r0 = {}",
            model.r0_at_crossing()
        )));
    }
    let well = Well::locate(model)?;
    let lambda = lambda_k(actions, h, k);
    let target = (k as f64 + 0.5) * PI * h;
    let e_bs = solve_action(model, &well, target, re_two_term(actions, h, lambda))?;
    let h73 = h.powf(7.0 / 3.0);
    let im = -h73 * im_g(model, slopes, lambda)? / actions.a1;
    let rho_bs = e_bs / h.powf(2.0 / 3.0);
    let a1_bs = crate::action::action_prime_direct(model, &well, e_bs)?;
    let im_at_bs = -h73 * im_g(model, slopes, rho_bs)? / a1_bs;
    Ok(ReducedPrediction {
        resonance: Resonance::from_energy(k, Complex64::new(e_bs, im), h, Provenance::Reduced),
        e_bs,
        im_at_bs,
    })
}
