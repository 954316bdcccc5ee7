//! The crossing model: the two potentials, the interaction coefficients,
//! validation of the structural assumptions, and the distortion contour.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::crossing::SlopePair;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

type C64 = Complex64;

/// Shape of the bonding potential `V₁`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WellFamily {
    /// `V₁(x) = c·x(x − x*)/√(1 + x⁴)`, bounded with limit `c` at both ends.
    #[default]
    Regularized,
    /// `V₁(x) = c·x(x − x*)`. Unbounded, so it fails the limit assumption;
    /// its action is elementary, which makes it useful for checking quadratures.
    Polynomial,
}

/// Profile of the vector-field coefficient `r₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum R1Profile {
    Constant { value: f64 },
    /// `amplitude·exp(−(x/width)²)`.
    Gaussian { amplitude: f64, width: f64 },
}

impl Default for R1Profile {
    fn default() -> Self {
        R1Profile::Constant { value: 1.0 }
    }
}

/// Tunable parameters of the built-in model catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    pub family: WellFamily,
    /// Height `c` of the well potential at infinity.
    pub c: f64,
    /// Left zero `x* < 0` of `V₁`.
    pub xstar: f64,
    /// Slope magnitude `τ₂ = −V₂'(0)`; also the asymptotic height of `V₂`.
    pub tau2: f64,
    /// Constant `r₀`.
    pub r0: f64,
    pub r1: R1Profile,
    /// Aperture of the analyticity sector.
    pub delta0: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            family: WellFamily::Regularized,
            c: 1.0,
            xstar: -1.0,
            tau2: 1.0,
            r0: 0.0,
            r1: R1Profile::default(),
            delta0: 0.55,
        }
    }
}

/// An immutable two-channel crossing model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "ModelParams", into = "ModelParams")]
pub struct CrossingModel {
    params: ModelParams,
}

impl From<ModelParams> for CrossingModel {
    fn from(params: ModelParams) -> Self {
        CrossingModel { params }
    }
}

impl From<CrossingModel> for ModelParams {
    fn from(m: CrossingModel) -> Self {
        m.params
    }
}

/// The built-in model: `V₁ = x(x+1)/√(1+x⁴)`, `V₂ = −x/√(1+x²)`, `r₀ ≡ 0`, `r₁ ≡ 1`.
pub fn default_model() -> CrossingModel {
    CrossingModel::new(ModelParams::default())
}

impl CrossingModel {
    pub fn new(params: ModelParams) -> Self {
        CrossingModel { params }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Copy with different interaction coefficients.
    pub fn with_interaction(&self, r0: f64, r1: R1Profile) -> Self {
        let mut params = self.params;
        params.r0 = r0;
        params.r1 = r1;
        CrossingModel { params }
    }

    pub fn xstar(&self) -> f64 {
        self.params.xstar
    }

    pub fn delta0(&self) -> f64 {
        self.params.delta0
    }

    /// `τ₁ = V₁'(0) = −c·x*`.
    pub fn tau1(&self) -> f64 {
        -self.params.c * self.params.xstar
    }

    pub fn tau2(&self) -> f64 {
        self.params.tau2
    }

    pub fn slopes(&self) -> Result<SlopePair> {
        SlopePair::new(self.tau1(), self.tau2())
    }

    pub fn v1(&self, z: C64) -> C64 {
        let p = &self.params;
        let poly = z * (z - p.xstar) * p.c;
        match p.family {
            WellFamily::Regularized => poly / (C64::new(1.0, 0.0) + z.powi(4)).sqrt(),
            WellFamily::Polynomial => poly,
        }
    }

    pub fn v2(&self, z: C64) -> C64 {
        -z * self.params.tau2 / (C64::new(1.0, 0.0) + z * z).sqrt()
    }

    pub fn v1_re(&self, x: f64) -> f64 {
        let p = &self.params;
        let poly = p.c * x * (x - p.xstar);
        match p.family {
            WellFamily::Regularized => poly / (1.0 + x.powi(4)).sqrt(),
            WellFamily::Polynomial => poly,
        }
    }

    pub fn v2_re(&self, x: f64) -> f64 {
        -self.params.tau2 * x / (1.0 + x * x).sqrt()
    }

    pub fn r0(&self, _z: C64) -> C64 {
        C64::new(self.params.r0, 0.0)
    }

    pub fn r1(&self, z: C64) -> C64 {
        match self.params.r1 {
            R1Profile::Constant { value } => C64::new(value, 0.0),
            R1Profile::Gaussian { amplitude, width } => (-(z / width).powi(2)).exp() * amplitude,
        }
    }

    pub fn r1_prime(&self, z: C64) -> C64 {
        match self.params.r1 {
            R1Profile::Constant { .. } => C64::new(0.0, 0.0),
            R1Profile::Gaussian { width, .. } => self.r1(z) * (-2.0 * z / (width * width)),
        }
    }

    /// `r₀(0)`.
    pub fn r0_at_crossing(&self) -> f64 {
        self.params.r0
    }

    /// `r₁(0)`.
    pub fn r1_at_crossing(&self) -> f64 {
        self.r1(C64::new(0.0, 0.0)).re
    }

    /// Whether `r₀` vanishes identically.
    pub fn r0_vanishes(&self) -> bool {
        self.params.r0 == 0.0
    }

    /// Limits `(V₁(−∞), V₁(+∞), V₂(−∞), V₂(+∞))`.
    pub fn limits(&self) -> (f64, f64, f64, f64) {
        let p = &self.params;
        let v1 = match p.family {
            WellFamily::Regularized => p.c,
            WellFamily::Polynomial => f64::INFINITY,
        };
        (v1, v1, p.tau2, -p.tau2)
    }

    /// Complex derivative of `V₁` by a central difference.
    pub fn v1_prime(&self, z: C64) -> C64 {
        let d = 1e-5;
        (self.v1(z + d) - self.v1(z - d)) / (2.0 * d)
    }

    /// Complex derivative of `V₂` by a central difference.
    pub fn v2_prime(&self, z: C64) -> C64 {
        let d = 1e-5;
        (self.v2(z + d) - self.v2(z - d)) / (2.0 * d)
    }

    /// Smallest ratio `|Im x|/⟨Re x⟩` over the singular points of the potentials.
    fn singularity_aperture(&self) -> f64 {
        // V₂: branch points at ±i
        let v2 = 1.0;
        match self.params.family {
            // zeros of 1 + x⁴ at (±1 ± i)/√2
            WellFamily::Regularized => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                (s / (1.0 + s * s).sqrt()).min(v2)
            }
            WellFamily::Polynomial => v2,
        }
    }
}

/// Downstream use a validation is performed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Purpose {
    /// Structural assumptions only.
    General,
    /// The vector-field width law, which needs `r₀ ≡ 0` and real `r₁`.
    VectorField,
}

/// Outcome of one assumption check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<AssumptionCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AssumptionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Converts failures into a misuse error naming the first violated assumption.
    pub fn into_result(self) -> Result<()> {
        match self.failures().next() {
            None => Ok(()),
            Some(c) => Err(Error::Misuse(format!("{}: {}", c.name, c.detail))),
        }
    }
}

fn check(name: &str, passed: bool, detail: String, witness: Option<f64>) -> AssumptionCheck {
    AssumptionCheck {
        name: name.to_string(),
        passed,
        detail,
        witness,
    }
}

const FD_TOL: f64 = 1e-8;

fn real_derivative(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    // 4th-order central difference
    let d = 1e-3;
    (8.0 * (f(x + d) - f(x - d)) - (f(x + 2.0 * d) - f(x - 2.0 * d))) / (12.0 * d)
}

/// Checks the analyticity, limit, sign-pattern and interaction assumptions.
pub fn validate(model: &CrossingModel) -> ValidationReport {
    validate_for(model, Purpose::General)
}

pub fn validate_for(model: &CrossingModel, purpose: Purpose) -> ValidationReport {
    let p = model.params();
    let mut checks = Vec::new();

    // analyticity in the sector and reality on the real axis
    let aperture = model.singularity_aperture();
    let mut witness = None;
    for i in 0..=400 {
        let x = -20.0 + 0.1 * i as f64;
        let z = C64::new(x, 0.0);
        let bad = model.v1(z).im.abs() > 1e-14 * (1.0 + model.v1(z).re.abs())
            || model.v2(z).im.abs() > 1e-14
            || !model.v1(z).re.is_finite();
        if bad {
            witness = Some(x);
            break;
        }
    }
    let analytic = p.delta0 > 0.0 && p.delta0 < aperture && witness.is_none();
    checks.push(check(
        "A1 analyticity",
        analytic,
        format!(
            "delta0 = {} must lie in (0, {:.6}) and potentials must be real on the real axis",
            p.delta0, aperture
        ),
        witness,
    ));

    let (v1m, v1p, v2m, v2p) = model.limits();
    let limits_ok = v1m.is_finite() && v1p.is_finite() && v1m > 0.0 && v1p > 0.0 && v2m > 0.0 && v2p < 0.0;
    checks.push(check(
        "A2 limits",
        limits_ok,
        format!("V1(-inf) = {v1m}, V1(+inf) = {v1p}, V2(-inf) = {v2m}, V2(+inf) = {v2p}"),
        None,
    ));

    // sign pattern on a validation grid, skipping small neighbourhoods of the zeros
    let mut sign_witness = None;
    let guard = 1e-3;
    for i in 0..=8000 {
        let x = -40.0 + 0.01 * i as f64;
        if (x - p.xstar).abs() < guard || x.abs() < guard {
            continue;
        }
        let (a, b) = (model.v1_re(x), model.v2_re(x));
        let ok = if x < p.xstar {
            a > 0.0 && b > 0.0
        } else if x < 0.0 {
            a < 0.0 && b > 0.0
        } else {
            b < 0.0 && a > 0.0
        };
        if !ok {
            sign_witness = Some(x);
            break;
        }
    }
    checks.push(check(
        "A3 sign pattern",
        p.xstar < 0.0 && sign_witness.is_none(),
        "V1>0, V2>0 left of x*; V1<0<V2 on (x*,0); V2<0<V1 right of 0".to_string(),
        sign_witness,
    ));

    let d1_0 = real_derivative(|x| model.v1_re(x), 0.0);
    let d2_0 = real_derivative(|x| model.v2_re(x), 0.0);
    let d1_star = real_derivative(|x| model.v1_re(x), p.xstar);
    let zeros_ok = model.v1_re(0.0).abs() < 1e-15
        && model.v2_re(0.0).abs() < 1e-15
        && model.v1_re(p.xstar).abs() < 1e-13;
    let slopes_ok = (d1_0 - model.tau1()).abs() < FD_TOL
        && (d2_0 + model.tau2()).abs() < FD_TOL
        && model.tau1() > 0.0
        && model.tau2() > 0.0
        && d1_star < 0.0;
    checks.push(check(
        "A3 crossing slopes",
        zeros_ok && slopes_ok,
        format!(
            "V1'(0) = {d1_0:.12} (tau1 = {}), V2'(0) = {d2_0:.12} (tau2 = {}), V1'(x*) = {d1_star:.6}",
            model.tau1(),
            model.tau2()
        ),
        if slopes_ok { None } else { Some(0.0) },
    ));

    // interaction: bounded on the sector boundary rays, real on the real axis
    let mut r_witness = None;
    for i in 0..=200 {
        let x = -50.0 + 0.5 * i as f64;
        let im = 0.99 * p.delta0 * (1.0 + x * x).sqrt();
        for z in [C64::new(x, im), C64::new(x, -im)] {
            let r = model.r1(z);
            if !r.is_finite() || r.norm() > 1e6 {
                r_witness = Some(x);
            }
        }
        if model.r1(C64::new(x, 0.0)).im.abs() > 1e-15 {
            r_witness = Some(x);
        }
    }
    checks.push(check(
        "A4 interaction",
        r_witness.is_none() && p.r0.is_finite(),
        "r0 real constant, r1 bounded on the sector and real on the real axis".to_string(),
        r_witness,
    ));

    if purpose == Purpose::VectorField {
        checks.push(check(
            "vector-field width law",
            model.r0_vanishes(),
            format!("requires r0 ≡ 0, got r0 = {}", p.r0),
            if model.r0_vanishes() { None } else { Some(0.0) },
        ));
    }

    ValidationReport { checks }
}

/// Piecewise-linear distortion contour: the real segment `[−l_left, x_inf]`
/// followed by the ray `x_inf + s·e^{iθ}`, `s ∈ [0, l_right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionContour {
    pub theta: f64,
    pub x_inf: f64,
    pub l_left: f64,
    pub l_right: f64,
}

/// One sample of the contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPoint {
    /// Arc length from the left end.
    pub s: f64,
    pub z: C64,
    /// `dz/ds`.
    pub dz: C64,
}

/// Truncation target for the outgoing wave at the end of the ray.
pub const RAY_TRUNCATION: f64 = 1e-18;

impl DistortionContour {
    pub fn new(theta: f64, x_inf: f64, l_left: f64, l_right: f64) -> Result<Self> {
        if !(theta >= 0.0 && x_inf > 0.0 && l_left > 0.0 && l_right > 0.0) {
            return Err(Error::Config(format!(
                "invalid contour: theta = {theta}, x_inf = {x_inf}, l_left = {l_left}, l_right = {l_right}"
            )));
        }
        Ok(DistortionContour {
            theta,
            x_inf,
            l_left,
            l_right,
        })
    }

    /// Contour whose ray is long enough for the channel-2 outgoing wave to
    /// decay below [`RAY_TRUNCATION`] at the end point for this `h`.
    pub fn for_h(model: &CrossingModel, h: f64, theta: f64, x_inf: f64, l_left: f64) -> Result<Self> {
        let (_, _, _, v2p) = model.limits();
        let rate = (-v2p).sqrt() * theta.sin();
        if rate <= 0.0 {
            return Err(Error::Config(format!(
                "theta = {theta} does not damp the outgoing channel"
            )));
        }
        let l_right = (-RAY_TRUNCATION.ln()) * h / rate;
        DistortionContour::new(theta, x_inf, l_left, l_right.max(2.0))
    }

    pub fn length(&self) -> f64 {
        self.l_left + self.x_inf + self.l_right
    }

    pub fn ray_direction(&self) -> C64 {
        C64::from_polar(1.0, self.theta)
    }

    /// Far end of the ray.
    pub fn end(&self) -> C64 {
        C64::new(self.x_inf, 0.0) + self.ray_direction() * self.l_right
    }

    /// Point at arc length `s` from the left end.
    pub fn at(&self, s: f64) -> ContourPoint {
        let corner = self.l_left + self.x_inf;
        if s <= corner {
            ContourPoint {
                s,
                z: C64::new(s - self.l_left, 0.0),
                dz: C64::new(1.0, 0.0),
            }
        } else {
            let dir = self.ray_direction();
            ContourPoint {
                s,
                z: C64::new(self.x_inf, 0.0) + dir * (s - corner),
                dz: dir,
            }
        }
    }

    /// Checks the aperture and turning-point constraints against a model.
    pub fn check_against(&self, model: &CrossingModel, e_max: f64) -> Result<()> {
        // the ray stays inside the sector |Im x| < δ₀⟨Re x⟩ iff tan θ < δ₀
        if self.theta.tan() >= model.delta0() {
            return Err(Error::Config(format!(
                "tan(theta) for theta = {} must be below delta0 = {}",
                self.theta,
                model.delta0()
            )));
        }
        // beyond x_inf channel 1 is forbidden and channel 2 allowed for |E| ≤ e_max
        for i in 0..=200 {
            let x = self.x_inf + 0.05 * i as f64;
            if model.v1_re(x) <= e_max || model.v2_re(x) >= -e_max {
                return Err(Error::Config(format!(
                    "x_inf = {} is not beyond the turning points (x = {x})",
                    self.x_inf
                )));
            }
        }
        Ok(())
    }
}

/// `n ≥ 2` samples of the contour equally spaced in arc length.
pub fn contour_points(contour: &DistortionContour, n: usize) -> Vec<ContourPoint> {
    let n = n.max(2);
    let total = contour.length();
    (0..n)
        .map(|i| contour.at(total * i as f64 / (n - 1) as f64))
        .collect()
}

/// Minimum over the ray of `Im ∫_{x_inf}^{z} √(E − V₂(t)) dt`.
pub fn ray_decay_minimum(model: &CrossingModel, contour: &DistortionContour, e: C64, samples: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(8);
    let dir = contour.ray_direction();
    let ds = contour.l_right / samples.max(1) as f64;
    let mut acc = C64::new(0.0, 0.0);
    let mut min = 0.0f64;
    for k in 0..samples.max(1) {
        let s0 = k as f64 * ds;
        for (x, w) in nodes.iter().zip(&weights) {
            let s = s0 + 0.5 * ds * (x + 1.0);
            let z = C64::new(contour.x_inf, 0.0) + dir * s;
            acc += (e - model.v2(z)).sqrt() * dir * (0.5 * ds * w);
        }
        min = min.min(acc.im);
    }
    min
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_model_crossing_values() {
        let m = default_model();
        assert_eq!(m.v1_re(0.0), 0.0);
        assert_eq!(m.v2_re(0.0), 0.0);
        assert_eq!(m.v1_re(-1.0), 0.0);
        assert_eq!(m.tau1(), 1.0);
        assert_eq!(m.tau2(), 1.0);
        assert!(m.v1_re(-0.5) < 0.0 && m.v2_re(-0.5) > 0.0);
        let d1 = real_derivative(|x| m.v1_re(x), 0.0);
        let d2 = real_derivative(|x| m.v2_re(x), 0.0);
        assert!((d1 - 1.0).abs() < 1e-9 && (d2 + 1.0).abs() < 1e-9);
    }

    #[test]
    fn complex_and_real_evaluations_agree() {
        let m = default_model();
        for &x in &[-3.0, -0.7, 0.2, 1.9] {
            assert!((m.v1(C64::new(x, 0.0)).re - m.v1_re(x)).abs() < 1e-15);
            assert!((m.v2(C64::new(x, 0.0)).re - m.v2_re(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn default_model_validates() {
        let r = validate_for(&default_model(), Purpose::VectorField);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn elliptic_coupling_is_flagged_for_vector_field_law() {
        let m = default_model().with_interaction(0.5, R1Profile::Constant { value: 1.0 });
        let r = validate_for(&m, Purpose::VectorField);
        let c = r.check("vector-field width law").unwrap();
        assert!(!c.passed);
        assert!(c.detail.contains("r0 ≡ 0"));
        assert!(validate(&m).all_passed());
        assert!(matches!(r.into_result(), Err(Error::Misuse(_))));
    }

    #[test]
    fn wrong_slope_sign_fails_with_witness() {
        let m = CrossingModel::new(ModelParams {
            tau2: -1.0,
            ..ModelParams::default()
        });
        let r = validate(&m);
        let c = r.check("A3 sign pattern").unwrap();
        assert!(!c.passed);
        assert!(c.witness.is_some());
        assert!(!r.check("A3 crossing slopes").unwrap().passed);
    }

    #[test]
    fn polynomial_family_fails_limits() {
        let m = CrossingModel::new(ModelParams {
            family: WellFamily::Polynomial,
            ..ModelParams::default()
        });
        assert!(!validate(&m).check("A2 limits").unwrap().passed);
    }

    #[test]
    fn contour_samples() {
        let c = DistortionContour::new(0.3, 1.0, 6.0, 4.0).unwrap();
        let pts = contour_points(&c, 101);
        assert_eq!(pts[0].z, C64::new(-6.0, 0.0));
        assert!((pts[100].z - (1.0 + 4.0 * C64::from_polar(1.0, 0.3))).norm() < 1e-14);
        assert_eq!(pts[1].dz, C64::new(1.0, 0.0));
        assert!((pts[99].dz - C64::from_polar(1.0, 0.3)).norm() < 1e-15);

        let flat = DistortionContour::new(0.0, 1.0, 6.0, 4.0).unwrap();
        for p in contour_points(&flat, 50) {
            assert_eq!(p.z.im, 0.0);
        }
        assert!((contour_points(&flat, 2)[1].z.re - 5.0).abs() < 1e-15);
    }

    #[test]
    fn ray_length_tracks_h() {
        let m = default_model();
        let a = DistortionContour::for_h(&m, 0.08, 0.3, 1.0, 6.0).unwrap();
        let b = DistortionContour::for_h(&m, 0.04, 0.3, 1.0, 6.0).unwrap();
        // e^{-rate·l/h} = 1e-18
        let rate = 0.3f64.sin();
        assert!(((-rate * a.l_right / 0.08).exp() - 1e-18).abs() < 1e-30);
        assert!(b.l_right < a.l_right);
        assert!(a.check_against(&m, 0.2).is_ok());
        let bad = DistortionContour::new(0.6, 1.0, 6.0, 4.0).unwrap();
        assert!(bad.check_against(&m, 0.2).is_err());
    }

    #[test]
    fn v2_approaches_its_limit_along_the_ray() {
        let m = default_model();
        let c = DistortionContour::new(0.3, 1.0, 6.0, 40.0).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..100 {
            let s = 5.0 + 0.35 * i as f64;
            let z = C64::new(c.x_inf, 0.0) + c.ray_direction() * s;
            let d = (m.v2(z) + 1.0).norm();
            assert!(d < last);
            last = d;
        }
    }
}
