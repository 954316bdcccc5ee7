//! Dormand–Prince 5(4) for complex linear systems along a real parameter.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C64 = Complex64;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Tolerances and limits for [`Dopri5`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-11,
            max_steps: 2_000_000,
        }
    }
}

/// Counters accumulated over the life of an integrator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Adaptive integrator state; the step size carries over between calls.
#[derive(Debug, Clone)]
pub struct Dopri5 {
    pub options: OdeOptions,
    pub stats: OdeStats,
    step: f64,
}

fn max_abs<const N: usize>(y: &[C64; N]) -> f64 {
    y.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

impl Dopri5 {
    pub fn new(options: OdeOptions, initial_step: f64) -> Self {
        Dopri5 {
            options,
            stats: OdeStats::default(),
            step: initial_step.abs(),
        }
    }

    /// Advances `y` from `s0` to `s1` (either direction) under `dy/ds = f(s, y)`.
    ///
    /// The error is measured against the largest component of the state,
    /// so components that are small relative to the rest are not resolved
    /// to relative accuracy.
    pub fn integrate<const N: usize, F>(&mut self, f: &F, s0: f64, s1: f64, y: &mut [C64; N]) -> Result<()>
    where
        F: Fn(f64, &[C64; N]) -> [C64; N],
    {
        let dir = if s1 >= s0 { 1.0 } else { -1.0 };
        let span = (s1 - s0).abs();
        if span == 0.0 {
            return Ok(());
        }
        let mut s = s0;
        let mut k = [[C64::new(0.0, 0.0); N]; 7];
        k[0] = f(s, y);
        self.stats.evaluations += 1;
        let mut step = self.step.min(span);
        let mut steps = 0;
        loop {
            let remaining = (s1 - s).abs();
            if remaining <= 1e-15 * span.max(s1.abs()) {
                break;
            }
            let last = step >= remaining;
            let hs = if last { remaining } else { step } * dir;
            for stage in 1..7 {
                let mut tmp = *y;
                for (i, t) in tmp.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, kj) in k.iter().enumerate().take(stage) {
                        if A[stage][j] != 0.0 {
                            acc += kj[i] * A[stage][j];
                        }
                    }
                    *t += acc * hs;
                }
                k[stage] = f(s + C[stage] * hs, &tmp);
            }
            self.stats.evaluations += 6;
            // stage 6 was evaluated at the fifth-order solution (FSAL)
            let mut y_new = *y;
            for (i, yn) in y_new.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate().take(6) {
                    acc += kj[i] * A[6][j];
                }
                *yn += acc * hs;
            }
            let scale = self.options.rtol * max_abs(y).max(max_abs(&y_new)).max(f64::MIN_POSITIVE);
            let mut err: f64 = 0.0;
            for i in 0..N {
                let mut acc = C64::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate() {
                    acc += kj[i] * E[j];
                }
                err = err.max((acc * hs).norm() / scale);
            }
            if !err.is_finite() {
                err = 1e10;
            }
            if err <= 1.0 {
                s = if last { s1 } else { s + hs };
                *y = y_new;
                k[0] = k[6];
                self.stats.accepted += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a truncated final step says little about the natural step size
                if !(last && fac >= 1.0) {
                    step = hs.abs() * fac;
                }
                self.step = step;
            } else {
                self.stats.rejected += 1;
                step = hs.abs() * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
                if step < 1e-14 * (1.0 + s.abs()) {
                    return Err(Error::Stiffness { s, step });
                }
            }
            steps += 1;
            if steps > self.options.max_steps {
                return Err(Error::Stiffness { s, step });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_round_trip() {
        let f = |_s: f64, y: &[C64; 2]| [y[1], -y[0]];
        let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let mut ode = Dopri5::new(OdeOptions::default(), 0.1);
        ode.integrate(&f, 0.0, 10.0, &mut y).unwrap();
        assert!((y[0].re - 10f64.cos()).abs() < 1e-9);
        ode.integrate(&f, 10.0, 0.0, &mut y).unwrap();
        assert!((y[0].re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn complex_exponential() {
        let lam = C64::new(-0.3, 2.0);
        let f = |_s: f64, y: &[C64; 1]| [y[0] * lam];
        let mut y = [C64::new(1.0, 0.0)];
        let mut ode = Dopri5::new(OdeOptions::default(), 0.01);
        ode.integrate(&f, 0.0, 3.0, &mut y).unwrap();
        assert!((y[0] - (lam * 3.0).exp()).norm() < 1e-9);
    }
}
