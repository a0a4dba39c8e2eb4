use std::path::{Path, PathBuf};

use serde::Deserialize;

use rcthermo::maser::{Model, SweepAxis, TRUNCATION_TOL};
use rcthermo::spectral::GridSpec;
use rcthermo::{MaserParams64, SetParams64, SpectralDensity64};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run reads from its config file. Command-line flags override
/// the matching top-level keys.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    pub maser: Option<MaserParams64>,
    pub set: Option<SetParams64>,
    pub map_sd: Option<MapSdConfig>,
    pub sweep: Option<SweepConfig>,
    pub eqcheck: Option<EqConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSdConfig {
    pub sd: Option<SpectralDensity64>,
    /// Two-column `omega,j` table, relative to the config file.
    pub csv: Option<PathBuf>,
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Delta21,
    Gamma,
    D0,
    Bias,
}

impl Axis {
    pub fn maser_axis(self) -> Option<SweepAxis> {
        match self {
            Axis::Delta21 => Some(SweepAxis::Delta21),
            Axis::Gamma => Some(SweepAxis::Gamma),
            Axis::D0 => Some(SweepAxis::D0),
            Axis::Bias => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Grid along one axis, in the axis' dimensionless units: `Δ21/ω0`, `γ/ω0`,
/// `d0/ω0²` or `V/Ω1`. Either `values` or `start`/`stop`/`points`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub points: Option<usize>,
    #[serde(default)]
    pub spacing: Spacing,
    pub models: Option<Vec<Model>>,
    /// Re-solve every RC point at `Nc + 4` and fail points that move.
    #[serde(default)]
    pub gate: bool,
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let bad = |m: &str| Err(CliError::Config(format!("sweep: {m}")));
        let range = (self.start, self.stop, self.points);
        let values = match (&self.values, range) {
            (Some(v), (None, None, None)) => v.clone(),
            (None, (Some(a), Some(b), Some(n))) => {
                if n < 2 {
                    return bad("points must be at least 2");
                }
                let t = |i: usize| i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => (0..n).map(|i| a + (b - a) * t(i)).collect(),
                    Spacing::Log => {
                        if !(a > 0.0 && b > 0.0) {
                            return bad("log spacing needs positive start and stop");
                        }
                        let (la, lb) = (a.ln(), b.ln());
                        let mut v: Vec<f64> = (0..n).map(|i| (la + (lb - la) * t(i)).exp()).collect();
                        v[0] = a;
                        v[n - 1] = b;
                        v
                    }
                }
            }
            _ => return bad("give either `values` or all of `start`, `stop`, `points`"),
        };
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return bad("grid values must be finite and non-empty");
        }
        Ok(values)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EqConfig {
    #[serde(default = "default_beta_omega0")]
    pub beta_omega0: f64,
}

fn default_beta_omega0() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative current change allowed under `Nc → Nc + 4`.
    pub truncation: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            truncation: TRUNCATION_TOL,
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}
