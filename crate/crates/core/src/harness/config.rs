use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coupled::SolverOptions;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// What a sweep compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Scalar interaction `r₀ ≠ 0` against the `h^{5/3}` width law.
    Thm1Check,
    /// Vector-field interaction `r₀ ≡ 0` against the `h^{7/3}` width law.
    #[default]
    Thm2Check,
    /// Special-function and crossing-integral identities only; no ODE solves.
    IdentitiesOnly,
    /// Interaction switched off; compared with real shooting for `P₁`.
    DecoupledOracle,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm1-check" => Ok(Mode::Thm1Check),
            "thm2-check" => Ok(Mode::Thm2Check),
            "identities-only" => Ok(Mode::IdentitiesOnly),
            "decoupled-oracle" => Ok(Mode::DecoupledOracle),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Thm1Check => "thm1-check",
            Mode::Thm2Check => "thm2-check",
            Mode::IdentitiesOnly => "identities-only",
            Mode::DecoupledOracle => "decoupled-oracle",
        })
    }
}

/// Contour angle, real segment and left truncation; the ray length is sized
/// per `h` from the decay of the outgoing channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContourConfig {
    pub theta: f64,
    pub x_inf: f64,
    pub l_left: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            theta: 0.3,
            x_inf: 1.0,
            l_left: 6.0,
        }
    }
}

/// Geometric grid between `max` and `min`, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HGrid {
    pub max: f64,
    pub min: f64,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Default for HGrid {
    fn default() -> Self {
        HGrid {
            max: 0.08,
            min: 0.01,
            points: 8,
            values: None,
        }
    }
}

impl HGrid {
    pub fn values(&self) -> Vec<f64> {
        if let Some(v) = &self.values {
            return v.clone();
        }
        if self.points < 2 {
            return vec![self.max];
        }
        let q = (self.min / self.max).powf(1.0 / (self.points - 1) as f64);
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.min } else { self.max * q.powi(i as i32) })
            .collect()
    }
}

/// Numerical tolerances and check thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ode_rtol: f64,
    /// Re-orthonormalization interval in units of `h`.
    pub reortho: f64,
    /// Muller stopping tolerance, relative to `h^{2/3}`.
    pub zero: f64,
    pub max_iterations: usize,
    /// Boundary samples per edge before adaptive refinement.
    pub edge_samples: usize,
    /// Width ratios must lie within `ratio_band·h^{1/3}` of 1.
    pub ratio_band: f64,
    /// Smallest accepted slope of the real-part error.
    pub re_slope_min: f64,
    pub r2_min: f64,
    /// Relative agreement of the reduced and closed-form widths.
    pub reduced_rel: f64,
    /// Allowed increase of `|1 − ratio|` between consecutive `h`.
    pub monotone_slack: f64,
    pub decoupled_im: f64,
    pub decoupled_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode_rtol: 1e-11,
            reortho: 1.0,
            zero: 1e-12,
            max_iterations: 50,
            edge_samples: 16,
            ratio_band: 3.0,
            re_slope_min: 2.1,
            r2_min: 0.95,
            reduced_rel: 1e-5,
            monotone_slack: 0.1,
            decoupled_im: 1e-10,
            decoupled_rel: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            rtol: self.ode_rtol,
            reortho: self.reortho,
        }
    }
}

/// A sweep in `h`, as read from a TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: Mode,
    pub model: ModelParams,
    pub contour: ContourConfig,
    pub h_grid: HGrid,
    pub c0: f64,
    pub tolerances: Tolerances,
    /// Run the argument-principle count at every `h`.
    pub count: bool,
    /// Locate zeros by subdividing the box instead of seeding.
    pub seedless: bool,
    /// Left out of the report so that reruns into other directories match.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mode: Mode::default(),
            model: ModelParams::default(),
            contour: ContourConfig::default(),
            h_grid: HGrid::default(),
            c0: 1.5,
            tolerances: Tolerances::default(),
            count: true,
            seedless: false,
            out: None,
        }
    }
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut config = SweepConfig::from_toml(&text)?;
        // a relative output directory is taken relative to the config file
        if let (Some(out), Some(dir)) = (&config.out, path.parent()) {
            if out.is_relative() {
                config.out = Some(dir.join(out));
            }
        }
        Ok(config)
    }

    /// Model parameters after the mode has imposed its interaction.
    pub fn effective_model(&self) -> ModelParams {
        let mut p = self.model;
        if self.mode == Mode::DecoupledOracle {
            p.r0 = 0.0;
            p.r1 = crate::model::R1Profile::Constant { value: 0.0 };
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let hs = self.h_grid.values();
        if hs.is_empty() {
            return Err(Error::Config("empty h grid".into()));
        }
        if hs.iter().any(|&h| !(h > 0.0 && h <= 0.1)) {
            return Err(Error::Config(format!("h values must lie in (0, 0.1], got {hs:?}")));
        }
        if hs.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Config(format!("h grid must be strictly decreasing, got {hs:?}")));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::Config(format!("c0 must be positive, got {}", self.c0)));
        }
        let t = &self.tolerances;
        let positive = [
            ("ode_rtol", t.ode_rtol),
            ("reortho", t.reortho),
            ("zero", t.zero),
            ("ratio_band", t.ratio_band),
            ("r2_min", t.r2_min),
            ("reduced_rel", t.reduced_rel),
            ("monotone_slack", t.monotone_slack),
            ("decoupled_im", t.decoupled_im),
            ("decoupled_rel", t.decoupled_rel),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if t.max_iterations == 0 || t.edge_samples < 2 {
            return Err(Error::Config("max_iterations ≥ 1 and edge_samples ≥ 2 required".into()));
        }
        match self.mode {
            Mode::Thm2Check if self.model.r0 != 0.0 => Err(Error::Config(format!(
                "thm2-check needs r0 = 0, got {}",
                self.model.r0
            ))),
            Mode::Thm1Check if self.model.r0 == 0.0 => {
                Err(Error::Config("thm1-check needs r0 ≠ 0".into()))
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_geometric() {
        let hs = HGrid::default().values();
        assert_eq!(hs.len(), 8);
        assert_eq!(hs[0], 0.08);
        assert_eq!(hs[7], 0.01);
        let q = hs[1] / hs[0];
        for w in hs.windows(2) {
            assert!((w[1] / w[0] - q).abs() < 1e-12);
        }
    }

    #[test]
    fn thm2_rejects_scalar_coupling() {
        let mut c = SweepConfig::default();
        c.model.r0 = 0.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        c.mode = Mode::Thm1Check;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn parses_nested_toml() {
        let c = SweepConfig::from_toml(
            "mode = \"decoupled-oracle\"\nc0 = 1.2\n[h_grid]\nvalues = [0.04, 0.02]\n[model.r1]\nkind = \"constant\"\nvalue = 2.0\n",
        )
        .unwrap();
        assert_eq!(c.mode, Mode::DecoupledOracle);
        assert_eq!(c.h_grid.values(), vec![0.04, 0.02]);
        assert_eq!(c.effective_model().r0, 0.0);
        assert!(SweepConfig::from_toml("bogus = 1").is_err());
    }
}
