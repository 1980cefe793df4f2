//! Capacity of a receiver that adapts its load from estimated impedance.
//!
//! Training runs with the original mismatched load `Z_L0` and the second
//! load `Z2`. Each trial estimates `F`, inverts it for `Ẑ_A` and switches to
//! `Ẑ_A*`. The grid SNR is the SNR of the receiver before adaptation, so a
//! matched load would see it scaled by `1/M0`.

use super::config::{ConfigError, ExperimentConfig};
use super::output::SweepRow;
use super::sweep::{classify, empty_row, with_bounds, Cell};
use super::{env_threads, run_indexed, HarnessError};
use crate::bounds::{capacity_lb, gamma_eff};
use crate::frontend::{compute_f, find_mismatched_load, mismatch_loss, recover_za, sigma_h2_from_gain, ImpedanceSet};
use crate::scalar::db_to_linear;
use crate::Cplx;

/// Loads and power factors of a capacity experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitySetup {
    pub z_l0: Cplx,
    /// Delivered-power fraction of `Z_L0`.
    pub m0: f64,
    /// `σ_h²` at a conjugate-matched load.
    pub sigma_h2_matched: f64,
    /// `σ_h²` during training at `Z_L0`.
    pub sigma_h2_train: f64,
    /// Ratio for the training pair `(Z_L0, Z2)`.
    pub f_train: Cplx,
}

impl CapacitySetup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, HarnessError> {
        let loss_db = cfg.loss_db.ok_or(ConfigError::Invalid {
            field: "loss_db",
            reason: "required for capacity runs".into(),
        })?;
        let z_l0 = find_mismatched_load(cfg.z_a, loss_db, cfg.load_angle_deg.to_radians())?;
        ImpedanceSet::new(cfg.z_a, z_l0, cfg.z2).map_err(|e| ConfigError::Invalid {
            field: "Z2",
            reason: format!("cannot train against the mismatched load {z_l0}: {e}"),
        })?;
        Ok(Self {
            z_l0,
            m0: mismatch_loss(cfg.z_a, z_l0)?,
            sigma_h2_matched: sigma_h2_from_gain(cfg.sigma_g2, cfg.z_a, cfg.z_a.conj())?,
            sigma_h2_train: sigma_h2_from_gain(cfg.sigma_g2, cfg.z_a, z_l0)?,
            f_train: compute_f(cfg.z_a, z_l0, cfg.z2)?,
        })
    }
}

/// Capacity bound at matched SNR `gamma` when a fraction `m` of the
/// available power is delivered.
pub fn capacity_at(gamma: f64, m: f64, n: usize, t: usize) -> Result<f64, HarnessError> {
    Ok(capacity_lb(gamma_eff(gamma * m, n, t)?, n)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Adapted {
    Degenerate,
    Fallback { capacity: f64, f_err2: f64 },
    Matched { capacity: f64, f_err2: f64 },
}

pub fn run_capacity(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, HarnessError> {
    run_capacity_with_threads(cfg, env_threads()?)
}

pub fn run_capacity_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<SweepRow>, HarnessError> {
    cfg.validate()?;
    let setup = CapacitySetup::new(cfg)?;
    let train_cfg = ExperimentConfig {
        z1: setup.z_l0,
        ..cfg.clone()
    };
    let mut rows = Vec::new();
    for (ci, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let gamma = db_to_linear(snr_db) / setup.m0;
        let c_upper = capacity_at(gamma, 1.0, cfg.n, cfg.t)?;
        let c_mismatched = capacity_at(gamma, setup.m0, cfg.n, cfg.t)?;
        let cell = Cell::new(&train_cfg, snr_db, setup.f_train, setup.sigma_h2_train)?;

        let outcomes = run_indexed(threads, cfg.trials, |trial| -> Result<Vec<Adapted>, HarnessError> {
            let (stats, truth) = cell.draw(cfg.seed, ci, trial)?;
            cfg.estimators
                .iter()
                .map(|&method| {
                    let Some(r) = classify(&stats, method, &cell.spec)? else {
                        return Ok(Adapted::Degenerate);
                    };
                    let f_err2 = (r.f_hat - truth.f).norm_sqr();
                    match recover_za(r.f_hat, setup.z_l0, cfg.z2) {
                        Ok(za_hat) if za_hat.re > 0.0 && za_hat.re.is_finite() && za_hat.im.is_finite() => {
                            let m = mismatch_loss(cfg.z_a, za_hat.conj())?;
                            Ok(Adapted::Matched {
                                capacity: capacity_at(gamma, m, cfg.n, cfg.t)?,
                                f_err2,
                            })
                        }
                        _ => Ok(Adapted::Fallback {
                            capacity: c_mismatched,
                            f_err2,
                        }),
                    }
                })
                .collect()
        })?
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

        for (ei, &method) in cfg.estimators.iter().enumerate() {
            let mut row = with_bounds(empty_row(cfg, method, snr_db), &cell);
            let (mut c_sum, mut f_sum) = (0.0, 0.0);
            for trial in &outcomes {
                match trial[ei] {
                    Adapted::Degenerate => row.trials_degenerate += 1,
                    Adapted::Fallback { capacity, f_err2 } | Adapted::Matched { capacity, f_err2 } => {
                        if matches!(trial[ei], Adapted::Fallback { .. }) {
                            row.trials_fallback += 1;
                        }
                        row.trials_ok += 1;
                        c_sum += capacity;
                        f_sum += f_err2;
                    }
                }
            }
            if row.trials_ok > 0 {
                let ok = row.trials_ok as f64;
                row.c_adapted = Some(c_sum / ok);
                row.rmse_f_rel = Some((f_sum / ok).sqrt() / setup.f_train.norm());
            }
            row.c_mismatched = Some(c_mismatched);
            row.c_upper = Some(c_upper);
            rows.push(row);
        }
    }
    Ok(rows)
}
