//! Resonance search in the rescaled box `[−C₀, C₀] − i[0, C₀h^{1/3}]`:
//! Muller refinement from asymptotic seeds and an argument-principle count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{action_derivatives, ActionData};
use crate::asymptotics::{k_window, predict_thm1, predict_thm2, rho_estimate, Provenance, Resonance};
use crate::coupled::{wronskian_with, SolverOptions, WronskianValue};
use crate::crossing::SlopePair;
use crate::error::{Error, Result};
use crate::model::{CrossingModel, DistortionContour};

type C64 = Complex64;

/// Height of the counting contour above the real axis, in units of `C₀h^{1/3}`.
pub const TOP_LIFT: f64 = 0.25;
/// Phase change allowed between neighbouring boundary samples.
pub const MAX_PHASE_STEP: f64 = PI / 3.0;
/// Shortest boundary segment, in `ρ` units, before a count is declared inconclusive.
pub const MIN_SEGMENT: f64 = 1e-3;

/// Rectangle in `ρ = E h^{−2/3}` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub c0: f64,
    pub h: f64,
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl SearchBox {
    /// `[−c0, c0] − i[0, c0 h^{1/3}]`.
    pub fn new(c0: f64, h: f64) -> Self {
        SearchBox {
            c0,
            h,
            re_lo: -c0,
            re_hi: c0,
            im_lo: -c0 * h.cbrt(),
            im_hi: 0.0,
        }
    }

    /// Box used for counting: the real edges sit midway between the
    /// predicted zeros just inside and just outside the window, and the top
    /// edge is lifted above the real axis so that real zeros lie inside.
    pub fn for_counting(actions: &ActionData, h: f64, c0: f64) -> Self {
        let mut b = SearchBox::new(c0, h);
        let w = k_window(actions, h, c0);
        let (lo, hi) = (*w.start(), *w.end());
        b.re_lo = 0.5 * (rho_estimate(actions, h, lo - 1) + rho_estimate(actions, h, lo));
        b.re_hi = 0.5 * (rho_estimate(actions, h, hi) + rho_estimate(actions, h, hi + 1));
        b.im_hi = TOP_LIFT * c0 * h.cbrt();
        b
    }

    pub fn contains(&self, rho: C64) -> bool {
        rho.re >= self.re_lo && rho.re <= self.re_hi && rho.im >= self.im_lo && rho.im <= self.im_hi
    }

    /// Splits at `Re ρ = at`.
    pub fn split_re(&self, at: f64) -> (SearchBox, SearchBox) {
        let mut a = *self;
        let mut b = *self;
        a.re_hi = at;
        b.re_lo = at;
        (a, b)
    }

    fn corners(&self) -> [C64; 4] {
        [
            C64::new(self.re_lo, self.im_lo),
            C64::new(self.re_hi, self.im_lo),
            C64::new(self.re_hi, self.im_hi),
            C64::new(self.re_lo, self.im_hi),
        ]
    }
}

/// Search settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FinderOptions {
    pub solver: SolverOptions,
    pub max_iterations: usize,
    /// Muller stopping threshold on `|Δρ|`.
    pub tolerance: f64,
    /// Initial boundary samples per edge of the counting box.
    pub edge_samples: usize,
}

impl Default for FinderOptions {
    fn default() -> Self {
        FinderOptions {
            solver: SolverOptions::default(),
            max_iterations: 50,
            tolerance: 1e-12,
            edge_samples: 16,
        }
    }
}

/// Wronskian as a function of `ρ` for fixed `h`.
pub struct Target<'a> {
    pub model: &'a CrossingModel,
    pub contour: &'a DistortionContour,
    pub h: f64,
    pub solver: SolverOptions,
}

impl Target<'_> {
    pub fn eval(&self, rho: C64) -> Result<WronskianValue> {
        wronskian_with(self.model, self.contour, rho * self.h.powf(2.0 / 3.0), self.h, &self.solver)
    }
}

/// Result of one Muller run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MullerOutcome {
    pub rho: C64,
    pub iterations: usize,
    pub evaluations: usize,
    pub last_step: f64,
}

/// Muller iteration in `ρ` from `seed` with initial spread `step`.
pub fn muller(target: &Target, seed: C64, step: f64, options: &FinderOptions) -> Result<MullerOutcome> {
    let first = target.eval(seed)?;
    let reference = first.log_scale;
    let f = |rho: C64| -> Result<C64> { Ok(target.eval(rho)?.rescaled(reference)) };
    let mut x = [seed - step, seed + C64::new(0.0, -0.5 * step), seed];
    let mut fx = [f(x[0])?, f(x[1])?, first.w];
    let mut evaluations = 3;
    for it in 1..=options.max_iterations {
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        let d1 = (fx[1] - fx[0]) / h1;
        let d2 = (fx[2] - fx[1]) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - a * fx[2] * 4.0).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        let mut dx = if den.norm() == 0.0 {
            C64::new(step, 0.0)
        } else {
            -fx[2] * 2.0 / den
        };
        if !(dx.re.is_finite() && dx.im.is_finite()) {
            return Err(Error::NoConvergence {
                what: "Muller iteration",
                iterations: it,
            });
        }
        // keep steps on the scale of the seed spread
        let cap = 10.0 * step.max(1e-6);
        if dx.norm() > cap {
            dx *= cap / dx.norm();
        }
        let next = x[2] + dx;
        let fn_ = f(next)?;
        evaluations += 1;
        let size = dx.norm();
        let stalled = size < 1e3 * options.tolerance && fn_.norm() >= fx[2].norm();
        x = [x[1], x[2], next];
        fx = [fx[1], fx[2], fn_];
        if size < options.tolerance || stalled || fn_.norm() == 0.0 {
            return Ok(MullerOutcome {
                rho: next,
                iterations: it,
                evaluations,
                last_step: size,
            });
        }
    }
    Err(Error::NoConvergence {
        what: "Muller iteration",
        iterations: options.max_iterations,
    })
}

/// A seed that did not produce a resonance in the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedIssue {
    pub k: i64,
    pub reason: String,
}

/// Output of [`find_resonances`].
#[derive(Debug, Clone, PartialEq)]
pub struct FinderOutcome {
    pub resonances: Vec<Resonance>,
    pub unresolved: Vec<SeedIssue>,
    pub escaped: Vec<SeedIssue>,
    pub evaluations: usize,
    pub iterations: usize,
}

/// One resonance per `k` in the window, seeded from the asymptotic formulas.
pub fn find_resonances(
    model: &CrossingModel,
    contour: &DistortionContour,
    actions: &ActionData,
    slopes: &SlopePair,
    h: f64,
    c0: f64,
) -> Result<FinderOutcome> {
    find_resonances_with(model, contour, actions, slopes, h, c0, &FinderOptions::default())
}

/// [`find_resonances`] with explicit settings.
pub fn find_resonances_with(
    model: &CrossingModel,
    contour: &DistortionContour,
    actions: &ActionData,
    slopes: &SlopePair,
    h: f64,
    c0: f64,
    options: &FinderOptions,
) -> Result<FinderOutcome> {
    let target = Target {
        model,
        contour,
        h,
        solver: options.solver,
    };
    let ks: Vec<i64> = k_window(actions, h, c0).collect();
    let bounds = SearchBox::for_counting(actions, h, c0);
    let spacing = PI * h.cbrt() / actions.a1;
    let step = 1e-3 * spacing;
    let runs: Vec<(i64, Result<MullerOutcome>)> = ks
        .par_iter()
        .map(|&k| {
            let seed = if model.r0_vanishes() {
                predict_thm2(model, actions, slopes, h, k)
            } else {
                predict_thm1(model, actions, slopes, h, k)
            };
            let run = seed.and_then(|s| muller(&target, s.rho, step, options));
            (k, run)
        })
        .collect();
    let merge = PI * h / (4.0 * actions.a1);
    let mut out = FinderOutcome {
        resonances: Vec::new(),
        unresolved: Vec::new(),
        escaped: Vec::new(),
        evaluations: 0,
        iterations: 0,
    };
    for (k, run) in runs {
        match run {
            Ok(m) => {
                out.evaluations += m.evaluations;
                out.iterations += m.iterations;
                let r = Resonance::from_rho(k, m.rho, h, Provenance::Numeric);
                if !bounds.contains(m.rho) {
                    out.escaped.push(SeedIssue {
                        k,
                        reason: format!("converged to rho = {} outside the box", m.rho),
                    });
                } else if let Some(prev) = out.resonances.iter().find(|p| (p.e - r.e).norm() < merge) {
                    out.unresolved.push(SeedIssue {
                        k,
                        reason: format!("merged with the zero of k = {}", prev.k),
                    });
                } else {
                    out.resonances.push(r);
                }
            }
            Err(e) => out.unresolved.push(SeedIssue { k, reason: e.to_string() }),
        }
    }
    Ok(out)
}

/// Result of an argument-principle count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountOutcome {
    pub count: usize,
    pub samples: usize,
    /// Total phase change divided by 2π before rounding.
    pub winding: f64,
}

fn phase_step(a: C64, b: C64) -> f64 {
    (b / a).arg()
}

/// Winding number of the Wronskian around the boundary of `b`.
pub fn count_in_box(target: &Target, b: &SearchBox, options: &FinderOptions) -> Result<CountOutcome> {
    let corners = b.corners();
    let n = options.edge_samples.max(2);
    // positions along the closed boundary, counterclockwise
    let mut points: Vec<C64> = Vec::with_capacity(4 * n + 1);
    for i in 0..4 {
        let (p, q) = (corners[i], corners[(i + 1) % 4]);
        for j in 0..n {
            points.push(p + (q - p) * (j as f64 / n as f64));
        }
    }
    points.push(corners[0]);
    let eval_all = |pts: &[C64]| -> Result<Vec<C64>> {
        pts.par_iter().map(|&p| target.eval(p).map(|w| w.w)).collect()
    };
    let mut values = eval_all(&points[..points.len() - 1])?;
    values.push(values[0]);
    loop {
        let mut mids = Vec::new();
        let mut at = Vec::new();
        for i in 0..points.len() - 1 {
            if phase_step(values[i], values[i + 1]).abs() > MAX_PHASE_STEP {
                let len = (points[i + 1] - points[i]).norm();
                let mid = 0.5 * (points[i] + points[i + 1]);
                if len < MIN_SEGMENT {
                    return Err(Error::InconclusiveCount { re: mid.re, im: mid.im });
                }
                mids.push(mid);
                at.push(i);
            }
        }
        if mids.is_empty() {
            break;
        }
        let new_values = eval_all(&mids)?;
        for (offset, ((i, m), v)) in at.iter().zip(mids).zip(new_values).enumerate() {
            points.insert(i + 1 + offset, m);
            values.insert(i + 1 + offset, v);
        }
    }
    let total: f64 = values.windows(2).map(|w| phase_step(w[0], w[1])).sum();
    let winding = total / (2.0 * PI);
    let rounded = winding.round();
    if (winding - rounded).abs() > 0.05 || rounded < 0.0 {
        return Err(Error::Consistency {
            what: "winding number",
            detail: format!("phase sum gives {winding}"),
        });
    }
    Ok(CountOutcome {
        count: rounded as usize,
        samples: points.len() - 1,
        winding,
    })
}

/// Number of zeros in the counting box of [`SearchBox::for_counting`].
pub fn count_zeros(model: &CrossingModel, contour: &DistortionContour, h: f64, c0: f64) -> Result<usize> {
    let actions = action_derivatives(model)?;
    let target = Target {
        model,
        contour,
        h,
        solver: SolverOptions::default(),
    };
    let b = SearchBox::for_counting(&actions, h, c0);
    Ok(count_in_box(&target, &b, &FinderOptions::default())?.count)
}

/// Seedless search: bisect the box along `Re ρ` until each piece holds one
/// zero, then run Muller from the piece centre.
pub fn find_seedless(target: &Target, b: &SearchBox, options: &FinderOptions) -> Result<Vec<C64>> {
    let count = count_in_box(target, b, options)?.count;
    let mut found = Vec::new();
    seedless_rec(target, b, count, options, 0, &mut found)?;
    found.sort_by(|a, b| a.re.total_cmp(&b.re));
    Ok(found)
}

fn seedless_rec(
    target: &Target,
    b: &SearchBox,
    count: usize,
    options: &FinderOptions,
    depth: usize,
    found: &mut Vec<C64>,
) -> Result<()> {
    if count == 0 {
        return Ok(());
    }
    if count == 1 {
        let mid = 0.5 * (b.re_lo + b.re_hi);
        let step = 1e-2 * (b.re_hi - b.re_lo);
        // narrow resonances sit just below the real axis; deeper starts are fallbacks
        for im in [0.0, 0.25 * b.im_lo] {
            match muller(target, C64::new(mid, im), step, options) {
                Ok(m) if b.contains(m.rho) => {
                    found.push(m.rho);
                    return Ok(());
                }
                Ok(_) | Err(Error::NoConvergence { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        // the iteration wandered off: narrow the piece and retry
    }
    if depth > 16 {
        return Err(Error::NoConvergence {
            what: "seedless subdivision",
            iterations: depth,
        });
    }
    // try a few split positions in case one passes too close to a zero
    let width = b.re_hi - b.re_lo;
    for frac in [0.5, 0.47, 0.53, 0.41, 0.59] {
        let (l, r) = b.split_re(b.re_lo + frac * width);
        let cl = match count_in_box(target, &l, options) {
            Ok(c) => c.count,
            Err(Error::InconclusiveCount { .. }) => continue,
            Err(e) => return Err(e),
        };
        if cl > count {
            continue;
        }
        seedless_rec(target, &l, cl, options, depth + 1, found)?;
        seedless_rec(target, &r, count - cl, options, depth + 1, found)?;
        return Ok(());
    }
    Err(Error::InconclusiveCount {
        re: b.re_lo + 0.5 * width,
        im: 0.0,
    })
}
