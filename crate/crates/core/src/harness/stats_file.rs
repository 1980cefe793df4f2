//! Sufficient statistics stored as TOML, the input of one-shot estimation.
//!
//! ```toml
//! sigma2 = 0.125
//! method = "ML_MP"          # optional
//! Z1 = [50.0, 0.0]          # optional, enables the impedance estimate
//! Z2 = [60.0, 20.0]
//! Y1 = [[[0.1, -0.3], [1.2, 0.4]]]   # L rows of N [re, im] pairs
//! Y2 = [[[0.2, 0.1], [0.9, -0.5]]]
//!
//! [correlation]             # optional, needed by ML_MP
//! kind = "clarke"           # "iid", "clarke" or "matrix"
//! f_d_hz = 97.2
//! T_s = 1e-3
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ConfigError;
use super::HarnessError;
use crate::estimators::Method;
use crate::fading::ChannelSpec;
use crate::signalpath::SufficientStats;
use crate::{Cplx, Mat};

type Pairs = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CorrelationSpec {
    Iid,
    Clarke {
        f_d_hz: f64,
        #[serde(rename = "T_s")]
        t_s: f64,
    },
    Matrix { entries: Pairs },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStats {
    sigma2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    #[serde(rename = "Z1", skip_serializing_if = "Option::is_none")]
    z1: Option<[f64; 2]>,
    #[serde(rename = "Z2", skip_serializing_if = "Option::is_none")]
    z2: Option<[f64; 2]>,
    #[serde(rename = "Y1")]
    y1: Pairs,
    #[serde(rename = "Y2")]
    y2: Pairs,
    #[serde(skip_serializing_if = "Option::is_none")]
    correlation: Option<CorrelationSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StatsFile {
    pub stats: SufficientStats<f64>,
    pub method: Option<Method>,
    pub loads: Option<(Cplx, Cplx)>,
    pub correlation: Option<CorrelationSpec>,
}

fn to_mat(field: &'static str, rows: &Pairs) -> Result<Mat, ConfigError> {
    let rows: Vec<Vec<Cplx>> = rows
        .iter()
        .map(|r| r.iter().map(|p| Cplx::new(p[0], p[1])).collect())
        .collect();
    if rows.is_empty() || rows[0].is_empty() {
        return Err(ConfigError::Invalid {
            field,
            reason: "must have at least one row and one column".into(),
        });
    }
    Mat::from_rows(&rows).map_err(|e| ConfigError::Invalid {
        field,
        reason: e.to_string(),
    })
}

fn from_mat(m: &Mat) -> Pairs {
    (0..m.rows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect()
}

impl StatsFile {
    pub fn from_toml_str(text: &str) -> Result<Self, HarnessError> {
        let raw: RawStats = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let stats = SufficientStats::new(to_mat("Y1", &raw.y1)?, to_mat("Y2", &raw.y2)?, raw.sigma2).map_err(|e| {
            ConfigError::Invalid {
                field: "Y1/Y2/sigma2",
                reason: e.to_string(),
            }
        })?;
        let loads = match (raw.z1, raw.z2) {
            (Some(a), Some(b)) => Some((Cplx::new(a[0], a[1]), Cplx::new(b[0], b[1]))),
            (None, None) => None,
            _ => {
                return Err(ConfigError::Invalid {
                    field: "Z1/Z2",
                    reason: "give both loads or neither".into(),
                }
                .into())
            }
        };
        Ok(Self {
            stats,
            method: raw.method,
            loads,
            correlation: raw.correlation,
        })
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let raw = RawStats {
            sigma2: self.stats.sigma2(),
            method: self.method,
            z1: self.loads.map(|(a, _)| [a.re, a.im]),
            z2: self.loads.map(|(_, b)| [b.re, b.im]),
            y1: from_mat(self.stats.y1()),
            y2: from_mat(self.stats.y2()),
            correlation: self.correlation.clone(),
        };
        toml::to_string(&raw).expect("statistics serialize to TOML")
    }

    /// Channel description implied by the `[correlation]` table.
    pub fn channel_spec(&self) -> Result<Option<ChannelSpec<f64>>, HarnessError> {
        let (n, l) = (self.stats.n(), self.stats.l());
        let spec = match &self.correlation {
            None => return Ok(None),
            Some(CorrelationSpec::Iid) => ChannelSpec::iid(n, l, 1.0)?,
            Some(CorrelationSpec::Clarke { f_d_hz, t_s }) => ChannelSpec::clarke(n, l, 1.0, *f_d_hz, *t_s)?,
            Some(CorrelationSpec::Matrix { entries }) => ChannelSpec::new(n, 1.0, to_mat("correlation.entries", entries)?)?,
        };
        Ok(Some(spec))
    }
}
