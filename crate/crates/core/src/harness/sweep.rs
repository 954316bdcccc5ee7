use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Mode, SweepConfig};
use super::fit::fit_slope;
use super::identities::{identity_checks, Check};
use crate::action::{action_derivatives, ActionData};
use crate::asymptotics::{
    central_k, k_window, lambda_k, predict_thm1, predict_thm2, reduced_detail, rho_estimate, Provenance,
    Resonance,
};
use crate::crossing::SlopePair;
use crate::error::Result;
use crate::finder::{
    count_in_box, find_resonances_with, find_seedless, FinderOptions, SearchBox, SeedIssue, Target,
};
use crate::model::{validate_for, CrossingModel, DistortionContour, Purpose};
use crate::shooting;

type C64 = Complex64;

/// Comparison at one `(h, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub h: f64,
    pub k: i64,
    pub lambda: f64,
    pub central: bool,
    /// Prediction the gaps and the ratio refer to.
    pub reference: Provenance,
    pub e_num: Option<C64>,
    pub e_thm1: Option<C64>,
    pub e_thm2: Option<C64>,
    pub e_red: Option<C64>,
    /// Reduced-condition width taken at the Bohr–Sommerfeld point itself.
    pub im_red_at_bs: Option<f64>,
    /// Real eigenvalue of `P₁` from shooting, where computed.
    pub e_p1: Option<f64>,
    pub abs_gap_re: Option<f64>,
    pub abs_gap_im: Option<f64>,
    pub ratio_im: Option<f64>,
    pub ode_rtol: f64,
    /// Absolute energy tolerance of the zero refinement.
    pub zero_tol: f64,
    pub status: String,
}

/// Outcome of the search at one `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSummary {
    pub h: f64,
    pub k_lo: i64,
    pub k_hi: i64,
    pub found: usize,
    pub count: Option<usize>,
    pub winding: Option<f64>,
    pub issues: Vec<SeedIssue>,
}

/// Work counters at one `h`; reproducible, unlike wall-clock time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    pub h: f64,
    pub wronskian_evaluations: usize,
    pub muller_iterations: usize,
    pub count_samples: usize,
}

/// Log-log fit of an error series against `h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub name: String,
    pub target: Option<f64>,
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    /// `(h, err)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub records: Vec<Record>,
    pub slopes: Vec<SlopeFit>,
    pub identity_checks: Vec<Check>,
    pub timings: Vec<Counters>,
    pub sweep: Vec<HSummary>,
    pub checks: Vec<Check>,
    pub pass: bool,
}

impl SweepReport {
    /// Records whose zero search failed.
    pub fn solver_failures(&self) -> usize {
        self.records.iter().filter(|r| r.e_num.is_none()).count()
    }
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WallClock {
    pub stages: Vec<(String, f64)>,
}

struct HOutcome {
    records: Vec<Record>,
    summary: HSummary,
    counters: Counters,
    seconds: f64,
}

struct Setup {
    model: CrossingModel,
    actions: ActionData,
    slopes: SlopePair,
}

fn setup(config: &SweepConfig) -> Result<Setup> {
    let model = CrossingModel::new(config.effective_model());
    let purpose = if model.r0_vanishes() && config.mode == Mode::Thm2Check {
        Purpose::VectorField
    } else {
        Purpose::General
    };
    validate_for(&model, purpose).into_result()?;
    let actions = action_derivatives(&model)?;
    let slopes = model.slopes()?;
    Ok(Setup { model, actions, slopes })
}

fn finder_options(config: &SweepConfig) -> FinderOptions {
    let t = &config.tolerances;
    FinderOptions {
        solver: t.solver(),
        max_iterations: t.max_iterations,
        tolerance: t.zero,
        edge_samples: t.edge_samples,
    }
}

fn seedless_zeros(
    target: &Target,
    actions: &ActionData,
    h: f64,
    c0: f64,
    options: &FinderOptions,
) -> Result<Vec<Resonance>> {
    let b = SearchBox::for_counting(actions, h, c0);
    let window = k_window(actions, h, c0);
    let zeros = find_seedless(target, &b, options)?;
    // label each zero with the window index of the nearest estimate
    Ok(zeros
        .into_iter()
        .map(|rho| {
            let k = window
                .clone()
                .min_by(|a, b| {
                    (rho_estimate(actions, h, *a) - rho.re)
                        .abs()
                        .total_cmp(&(rho_estimate(actions, h, *b) - rho.re).abs())
                })
                .unwrap_or(*window.start());
            Resonance::from_rho(k, rho, h, Provenance::Numeric)
        })
        .collect())
}

fn run_h(config: &SweepConfig, s: &Setup, h: f64) -> HOutcome {
    let start = Instant::now();
    let window = k_window(&s.actions, h, config.c0);
    let mut summary = HSummary {
        h,
        k_lo: *window.start(),
        k_hi: *window.end(),
        found: 0,
        count: None,
        winding: None,
        issues: Vec::new(),
    };
    let mut counters = Counters {
        h,
        wronskian_evaluations: 0,
        muller_iterations: 0,
        count_samples: 0,
    };
    let options = finder_options(config);
    let c = &config.contour;
    let contour = DistortionContour::for_h(&s.model, h, c.theta, c.x_inf, c.l_left).and_then(|contour| {
        contour.check_against(&s.model, config.c0 * h.powf(2.0 / 3.0))?;
        Ok(contour)
    });
    let mut numeric: Vec<Resonance> = Vec::new();
    let mut failure: Option<String> = None;
    match &contour {
        Err(e) => failure = Some(e.to_string()),
        Ok(contour) => {
            let target = Target {
                model: &s.model,
                contour,
                h,
                solver: options.solver,
            };
            if config.seedless {
                match seedless_zeros(&target, &s.actions, h, config.c0, &options) {
                    Ok(z) => numeric = z,
                    Err(e) => failure = Some(e.to_string()),
                }
            } else {
                match find_resonances_with(&s.model, contour, &s.actions, &s.slopes, h, config.c0, &options) {
                    Ok(out) => {
                        counters.wronskian_evaluations += out.evaluations;
                        counters.muller_iterations += out.iterations;
                        summary.issues.extend(out.unresolved);
                        summary.issues.extend(out.escaped);
                        numeric = out.resonances;
                    }
                    Err(e) => failure = Some(e.to_string()),
                }
            }
            if config.count {
                let b = SearchBox::for_counting(&s.actions, h, config.c0);
                match count_in_box(&target, &b, &options) {
                    Ok(c) => {
                        summary.count = Some(c.count);
                        summary.winding = Some(c.winding);
                        counters.count_samples += c.samples;
                    }
                    Err(e) => summary.issues.push(SeedIssue {
                        k: -1,
                        reason: format!("count: {e}"),
                    }),
                }
            }
        }
    }
    summary.found = numeric.len();

    let p1 = match config.mode {
        Mode::DecoupledOracle | Mode::Thm2Check => {
            let span = 1.2 * config.c0 * h.powf(2.0 / 3.0);
            shooting::eigenvalues(&s.model, h, -span, span).ok()
        }
        _ => None,
    };
    let kc = central_k(&s.actions, h);
    let zero_tol = config.tolerances.zero * h.powf(2.0 / 3.0);
    let records = window
        .map(|k| {
            let thm1 = predict_thm1(&s.model, &s.actions, &s.slopes, h, k).ok().map(|r| r.e);
            let thm2 = predict_thm2(&s.model, &s.actions, &s.slopes, h, k).ok().map(|r| r.e);
            let red = reduced_detail(&s.model, &s.actions, &s.slopes, h, k).ok();
            let (reference, e_ref) = if s.model.r0_vanishes() {
                (Provenance::Thm2, thm2)
            } else {
                (Provenance::Thm1, thm1)
            };
            let num = numeric.iter().find(|r| r.k == k).map(|r| r.e);
            let status = match (&num, &failure) {
                (Some(_), _) => "converged".to_string(),
                (None, Some(f)) => f.clone(),
                (None, None) => summary
                    .issues
                    .iter()
                    .find(|i| i.k == k)
                    .map(|i| i.reason.clone())
                    .unwrap_or_else(|| "no zero".to_string()),
            };
            let e_p1 = match (&p1, num) {
                (Some(levels), Some(e)) => levels
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - e.re).abs().total_cmp(&(b - e.re).abs())),
                _ => None,
            };
            let gaps = num.zip(e_ref).map(|(n, r)| {
                let ratio = if r.im != 0.0 { Some(n.im / r.im) } else { None };
                ((n.re - r.re).abs(), (n.im - r.im).abs(), ratio)
            });
            Record {
                h,
                k,
                lambda: lambda_k(&s.actions, h, k),
                central: k == kc,
                reference,
                e_num: num,
                e_thm1: thm1,
                e_thm2: thm2,
                e_red: red.map(|r| r.resonance.e),
                im_red_at_bs: red.map(|r| r.im_at_bs),
                e_p1,
                abs_gap_re: gaps.map(|g| g.0),
                abs_gap_im: gaps.map(|g| g.1),
                ratio_im: gaps.and_then(|g| g.2),
                ode_rtol: config.tolerances.ode_rtol,
                zero_tol,
                status,
            }
        })
        .collect();
    HOutcome {
        records,
        summary,
        counters,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fit(name: &str, target: Option<f64>, pairs: Vec<(f64, f64)>) -> SlopeFit {
    match fit_slope(&pairs) {
        Ok((slope, r2)) => SlopeFit {
            name: name.into(),
            target,
            slope: Some(slope),
            r2: Some(r2),
            points: pairs,
            note: None,
        },
        Err(e) => SlopeFit {
            name: name.into(),
            target,
            slope: None,
            r2: None,
            points: pairs,
            note: Some(e.to_string()),
        },
    }
}

/// Central-`k` error series, keeping only values above 100× the solver floor.
fn central_series(records: &[Record], config: &SweepConfig, f: impl Fn(&Record) -> Option<f64>) -> Vec<(f64, f64)> {
    let t = &config.tolerances;
    records
        .iter()
        .filter(|r| r.central)
        .filter_map(|r| {
            let floor = 100.0 * t.zero.max(t.ode_rtol) * r.h.powf(2.0 / 3.0);
            f(r).filter(|v| *v > floor).map(|v| (r.h, v))
        })
        .collect()
}

fn slopes(records: &[Record], config: &SweepConfig) -> Vec<SlopeFit> {
    match config.mode {
        Mode::Thm2Check => vec![
            fit("re_gap_thm2", Some(7.0 / 3.0), central_series(records, config, |r| r.abs_gap_re)),
            fit("im_gap_thm2", Some(8.0 / 3.0), central_series(records, config, |r| r.abs_gap_im)),
            fit(
                "re_gap_p1",
                Some(7.0 / 3.0),
                central_series(records, config, |r| Some((r.e_num?.re - r.e_p1?).abs())),
            ),
        ],
        Mode::Thm1Check => vec![
            fit("re_gap_thm1", Some(2.0), central_series(records, config, |r| r.abs_gap_re)),
            fit("im_gap_thm1", None, central_series(records, config, |r| r.abs_gap_im)),
        ],
        _ => Vec::new(),
    }
}

fn sweep_checks(config: &SweepConfig, records: &[Record], summaries: &[HSummary], fits: &[SlopeFit]) -> Vec<Check> {
    let t = &config.tolerances;
    let mut out = Vec::new();
    for s in summaries {
        let size = (s.k_hi - s.k_lo + 1).max(0) as f64;
        let mut miss = (s.found as f64 - size).abs();
        if config.count {
            miss += s.count.map_or(f64::INFINITY, |c| (c as f64 - size).abs());
        }
        out.push(Check::below(format!("completeness[h={}]", s.h), miss, 0.5));
    }
    let central: Vec<&Record> = records.iter().filter(|r| r.central).collect();
    match config.mode {
        Mode::Thm2Check => {
            for r in &central {
                let dev = r.ratio_im.map_or(f64::NAN, |q| (q - 1.0).abs());
                out.push(Check::below(
                    format!("width_ratio[h={}]", r.h),
                    dev,
                    t.ratio_band * r.h.cbrt(),
                ));
            }
            let re = fits.iter().find(|f| f.name == "re_gap_thm2");
            let (slope, r2) = re.map_or((None, None), |f| (f.slope, f.r2));
            let passed = slope.is_some_and(|s| s >= t.re_slope_min) && r2.is_some_and(|r| r >= t.r2_min);
            out.push(Check {
                name: "re_gap_slope".into(),
                value: slope,
                tolerance: t.re_slope_min,
                passed,
                acceptance: true,
            });
            let worst = records
                .iter()
                .map(|r| match (r.e_red, r.e_thm2) {
                    (Some(a), Some(b)) if b.im != 0.0 => ((a.im - b.im) / b.im).abs(),
                    (Some(a), Some(b)) if a.im == b.im => 0.0,
                    _ => f64::NAN,
                })
                .fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) });
            out.push(Check::below("reduced_identity", worst, t.reduced_rel));
        }
        Mode::Thm1Check => {
            let devs: Vec<f64> = central
                .iter()
                .map(|r| r.ratio_im.map_or(f64::NAN, |q| (q - 1.0).abs()))
                .collect();
            out.push(Check::below("width_ratio_initial", devs.first().copied().unwrap_or(f64::NAN), 0.5));
            let rise = devs.windows(2).map(|w| w[1] - w[0]).fold(0.0, |m: f64, v| {
                if v.is_nan() || m.is_nan() {
                    f64::NAN
                } else {
                    m.max(v)
                }
            });
            out.push(Check::below("width_ratio_monotone", rise, t.monotone_slack));
            let drift = match (devs.first(), devs.last()) {
                (Some(a), Some(b)) => b - a,
                _ => f64::NAN,
            };
            out.push(Check::below("width_ratio_converging", drift, t.monotone_slack));
        }
        Mode::DecoupledOracle => {
            for s in summaries {
                let rows: Vec<&Record> = records.iter().filter(|r| r.h == s.h).collect();
                let im = rows
                    .iter()
                    .map(|r| r.e_num.map_or(f64::NAN, |e| e.im.abs()))
                    .fold(0.0, f64::max);
                let im = if rows.iter().any(|r| r.e_num.is_none()) { f64::NAN } else { im };
                out.push(Check::below(format!("decoupled_real[h={}]", s.h), im, t.decoupled_im));
                let rel = rows
                    .iter()
                    .map(|r| match (r.e_num, r.e_p1) {
                        (Some(e), Some(p)) => (e.re - p).abs() / p.abs(),
                        _ => f64::NAN,
                    })
                    .fold(0.0, |m: f64, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) });
                out.push(Check::below(format!("decoupled_shooting[h={}]", s.h), rel, t.decoupled_rel));
            }
        }
        Mode::IdentitiesOnly => {}
    }
    out
}

/// Runs the sweep without writing anything.
pub fn execute(config: &SweepConfig) -> Result<(SweepReport, WallClock)> {
    config.validate()?;
    let mut wall = WallClock::default();
    let t0 = Instant::now();
    let ids = identity_checks()?;
    wall.stages.push(("identities".into(), t0.elapsed().as_secs_f64()));

    let mut report = SweepReport {
        config: SweepConfig {
            out: None,
            ..config.clone()
        },
        records: Vec::new(),
        slopes: Vec::new(),
        identity_checks: ids,
        timings: Vec::new(),
        sweep: Vec::new(),
        checks: Vec::new(),
        pass: false,
    };
    if config.mode != Mode::IdentitiesOnly {
        let t1 = Instant::now();
        let s = setup(config)?;
        wall.stages.push(("setup".into(), t1.elapsed().as_secs_f64()));
        let outcomes: Vec<HOutcome> = config.h_grid.values().par_iter().map(|&h| run_h(config, &s, h)).collect();
        for o in outcomes {
            wall.stages.push((format!("h={}", o.summary.h), o.seconds));
            report.records.extend(o.records);
            report.sweep.push(o.summary);
            report.timings.push(o.counters);
        }
        report.slopes = slopes(&report.records, config);
        report.checks = sweep_checks(config, &report.records, &report.sweep, &report.slopes);
    }
    report.pass = report
        .identity_checks
        .iter()
        .chain(report.checks.iter())
        .filter(|c| c.acceptance)
        .all(|c| c.passed);
    Ok((report, wall))
}

/// Runs the sweep and, when an output directory is configured, writes the
/// report files there.
pub fn run(config: &SweepConfig) -> Result<SweepReport> {
    let (report, wall) = execute(config)?;
    if let Some(dir) = &config.out {
        super::emit::emit(&report, dir)?;
        super::emit::write_wall_clock(&wall, dir)?;
    }
    Ok(report)
}

