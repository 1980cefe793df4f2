//! Experiment configuration read from a TOML file with one `[experiment]`
//! table.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use thiserror::Error;

use crate::estimators::Method;
use crate::fading::{doppler_hz, ChannelSpec, FadingError};
use crate::frontend::{compute_f, sigma_h2_from_gain, ImpedanceSet};
use crate::{Cplx, Mat};

pub const MODERATE_SPEED_KMH: f64 = 50.0;
pub const SLOW_SPEED_KMH: f64 = 5.0;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Iid,
    Moderate,
    Slow,
    Custom,
}

impl Scenario {
    pub fn tag(self) -> &'static str {
        match self {
            Scenario::Iid => "iid",
            Scenario::Moderate => "moderate",
            Scenario::Slow => "slow",
            Scenario::Custom => "custom",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(Scenario::Iid),
            "moderate" => Ok(Scenario::Moderate),
            "slow" => Ok(Scenario::Slow),
            "custom" => Ok(Scenario::Custom),
            _ => Err(invalid("scenario", format!("unknown scenario '{s}' (expected iid, moderate, slow or custom)"))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    experiment: RawExperiment,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    scenario: Scenario,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    #[serde(rename = "T")]
    t: usize,
    snr_grid_db: Vec<f64>,
    trials: usize,
    seed: u64,
    estimators: Vec<Method>,
    #[serde(rename = "P", default = "one")]
    p: f64,
    #[serde(default = "default_carrier")]
    f_c_hz: f64,
    v_kmh: Option<f64>,
    #[serde(rename = "T_s", default = "default_symbol_period")]
    t_s: f64,
    #[serde(rename = "Z_A", default = "default_za")]
    z_a: [f64; 2],
    #[serde(rename = "Z1", default = "default_z1")]
    z1: [f64; 2],
    #[serde(rename = "Z2", default = "default_z2")]
    z2: [f64; 2],
    #[serde(default = "one")]
    sigma_g2: f64,
    loss_db: Option<f64>,
    #[serde(default)]
    load_angle_deg: f64,
    #[serde(default)]
    noiseless: bool,
    output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

fn default_carrier() -> f64 {
    2.1e9
}

fn default_symbol_period() -> f64 {
    1e-3
}

fn default_za() -> [f64; 2] {
    [73.0, 42.5]
}

fn default_z1() -> [f64; 2] {
    [50.0, 0.0]
}

fn default_z2() -> [f64; 2] {
    [60.0, 20.0]
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub l: usize,
    pub t: usize,
    pub p: f64,
    pub f_c_hz: f64,
    /// Terminal speed; fixed by the `moderate` and `slow` presets.
    pub v_kmh: Option<f64>,
    pub t_s: f64,
    pub z_a: Cplx,
    pub z1: Cplx,
    pub z2: Cplx,
    pub sigma_g2: f64,
    pub snr_grid_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub estimators: Vec<Method>,
    /// Initial power loss of the unadapted load, for capacity runs.
    pub loss_db: Option<f64>,
    pub load_angle_deg: f64,
    /// Forces `σ_n² = 0`.
    pub noiseless: bool,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawFile = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_raw(raw.experiment)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    fn from_raw(r: RawExperiment) -> Result<Self, ConfigError> {
        let v_kmh = match (r.scenario, r.v_kmh) {
            (Scenario::Iid, None) => None,
            (Scenario::Moderate, None) => Some(MODERATE_SPEED_KMH),
            (Scenario::Slow, None) => Some(SLOW_SPEED_KMH),
            (Scenario::Custom, Some(v)) => Some(v),
            (Scenario::Custom, None) => return Err(invalid("v_kmh", "required when scenario = \"custom\"")),
            (s, Some(_)) => return Err(invalid("v_kmh", format!("only allowed with scenario = \"custom\", not \"{s}\""))),
        };
        let cfg = Self {
            scenario: r.scenario,
            n: r.n,
            l: r.l,
            t: r.t,
            p: r.p,
            f_c_hz: r.f_c_hz,
            v_kmh,
            t_s: r.t_s,
            z_a: Cplx::new(r.z_a[0], r.z_a[1]),
            z1: Cplx::new(r.z1[0], r.z1[1]),
            z2: Cplx::new(r.z2[0], r.z2[1]),
            sigma_g2: r.sigma_g2,
            snr_grid_db: r.snr_grid_db,
            trials: r.trials,
            seed: r.seed,
            estimators: r.estimators,
            loss_db: r.loss_db,
            load_angle_deg: r.load_angle_deg,
            noiseless: r.noiseless,
            output: r.output,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field; also run after command-line overrides.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return Err(invalid("N", "must be at least 1"));
        }
        if self.l == 0 {
            return Err(invalid("L", "must be at least 1"));
        }
        if self.t == 0 || !self.t.is_multiple_of(2) {
            return Err(invalid("T", format!("must be even and positive, got {}", self.t)));
        }
        if self.t / 2 < self.n {
            return Err(invalid("T", format!("T/2 = {} is smaller than N = {}", self.t / 2, self.n)));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.trials > u32::MAX as usize {
            return Err(invalid("trials", "too many trials"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(invalid("snr_grid_db", "must not be empty"));
        }
        if let Some(x) = self.snr_grid_db.iter().find(|x| !x.is_finite()) {
            return Err(invalid("snr_grid_db", format!("non-finite value {x}")));
        }
        if self.estimators.is_empty() {
            return Err(invalid("estimators", "must not be empty"));
        }
        if self.estimators.iter().collect::<BTreeSet<_>>().len() != self.estimators.len() {
            return Err(invalid("estimators", "contains duplicates"));
        }
        if self.estimators.contains(&Method::Ml1) && self.l != 1 {
            return Err(invalid("estimators", format!("ML1 needs L = 1, got L = {}", self.l)));
        }
        for (field, v) in [("P", self.p), ("f_c_hz", self.f_c_hz), ("T_s", self.t_s), ("sigma_g2", self.sigma_g2)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(field, format!("must be positive, got {v}")));
            }
        }
        if let Some(v) = self.v_kmh {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid("v_kmh", format!("must be >= 0, got {v}")));
            }
        }
        if let Some(db) = self.loss_db {
            if !(db >= 0.0 && db.is_finite()) {
                return Err(invalid("loss_db", format!("must be >= 0, got {db}")));
            }
        }
        if !self.load_angle_deg.is_finite() {
            return Err(invalid("load_angle_deg", "must be finite"));
        }
        let imp = ImpedanceSet::new(self.z_a, self.z1, self.z2).map_err(|e| invalid("Z_A/Z1/Z2", e.to_string()))?;
        imp.f().map_err(|e| invalid("Z_A/Z1/Z2", e.to_string()))?;
        self.correlation().map_err(|e| invalid("scenario", e.to_string()))?;
        Ok(())
    }

    pub fn doppler_hz(&self) -> Option<f64> {
        self.v_kmh.map(|v| doppler_hz(v, self.f_c_hz))
    }

    /// Temporal correlation of the scenario.
    pub fn correlation(&self) -> Result<Mat, FadingError> {
        Ok(self.channel_spec(1.0)?.correlation().clone())
    }

    pub fn channel_spec(&self, sigma_h2: f64) -> Result<ChannelSpec<f64>, FadingError> {
        match self.doppler_hz() {
            None => ChannelSpec::iid(self.n, self.l, sigma_h2),
            Some(fd) => ChannelSpec::clarke(self.n, self.l, sigma_h2, fd, self.t_s),
        }
    }

    /// `σ_h²` for the training load `Z1`.
    pub fn sigma_h2(&self) -> f64 {
        sigma_h2_from_gain(self.sigma_g2, self.z_a, self.z1).expect("validated impedances")
    }

    pub fn true_f(&self) -> Cplx {
        compute_f(self.z_a, self.z1, self.z2).expect("validated impedances")
    }
}
