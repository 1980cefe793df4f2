//! Relative-RMSE sweeps over SNR.

use super::config::ExperimentConfig;
use super::output::SweepRow;
use super::rng::trial_rng;
use super::{env_threads, run_indexed, HarnessError};
use crate::bounds::{bayesian_crb_h, crb};
use crate::estimators::{estimate, mmse_channel, moment_sigma_h2, EstimateError, EstimateReport, Method};
use crate::fading::ChannelSpec;
use crate::frontend::effective_sigma2;
use crate::scalar::db_to_linear;
use crate::signalpath::{dft_training, sufficient_stats, synthesize, SufficientStats, TrainingSpec, Truth};
use crate::{Cplx, Mat};

/// Fixed quantities of one SNR cell.
#[derive(Debug, Clone)]
pub struct Cell {
    pub snr_db: f64,
    pub f: Cplx,
    pub sigma_h2: f64,
    pub sigma_n2: f64,
    /// Noise variance of the sufficient statistics.
    pub sigma2: f64,
    pub spec: ChannelSpec<f64>,
    pub train: TrainingSpec<f64>,
}

impl Cell {
    /// SNR `γ = P σ_h² / σ_n²` is set through `σ_n²`.
    pub fn new(cfg: &ExperimentConfig, snr_db: f64, f: Cplx, sigma_h2: f64) -> Result<Self, HarnessError> {
        let gamma = db_to_linear(snr_db);
        let sigma_n2 = if cfg.noiseless { 0.0 } else { cfg.p * sigma_h2 / gamma };
        Ok(Self {
            snr_db,
            f,
            sigma_h2,
            sigma_n2,
            sigma2: effective_sigma2(sigma_n2, cfg.n, cfg.p, cfg.t),
            spec: cfg.channel_spec(sigma_h2)?,
            train: dft_training(cfg.n, cfg.t, cfg.p)?,
        })
    }

    /// Synthesises one training exchange and reduces it.
    pub fn draw(&self, seed: u64, cell: usize, trial: usize) -> Result<(SufficientStats<f64>, Truth<f64>), HarnessError> {
        let mut rng = trial_rng(seed, cell, trial);
        let mut obs = synthesize(&self.spec, &self.train, self.f, self.sigma_n2, &mut rng)?;
        let stats = sufficient_stats(&obs, &self.train, self.sigma_n2)?;
        let truth = obs.truth.take().expect("synthesized observations carry truth");
        Ok((stats, truth))
    }
}

/// Result of one estimator on one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrialOutcome {
    /// No usable ratio estimate, or the variance estimate collapsed to zero.
    Degenerate,
    Estimated {
        f_err2: f64,
        sigma_h2_err2: Option<f64>,
        /// Per-entry squared error of the MMSE channel estimate.
        h_err2: Option<f64>,
    },
}

/// Runs one estimator and classifies the result.
pub fn classify(
    stats: &SufficientStats<f64>,
    method: Method,
    spec: &ChannelSpec<f64>,
) -> Result<Option<EstimateReport<f64>>, HarnessError> {
    match estimate(stats, method, Some(spec)) {
        Ok(r) if r.degenerate => Ok(None),
        Ok(r) => Ok(Some(r)),
        Err(EstimateError::Degenerate { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn score(
    stats: &SufficientStats<f64>,
    truth: &Truth<f64>,
    method: Method,
    spec: &ChannelSpec<f64>,
) -> Result<TrialOutcome, HarnessError> {
    let Some(r) = classify(stats, method, spec)? else {
        return Ok(TrialOutcome::Degenerate);
    };
    let s_hat = r.sigma_h2_hat.unwrap_or_else(|| moment_sigma_h2(stats, r.f_hat));
    let h_err2 = match mmse_channel(stats, r.f_hat, s_hat, spec) {
        Ok(h) => Some(channel_error(&h, &truth.h)),
        Err(EstimateError::SingularSystem { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(TrialOutcome::Estimated {
        f_err2: (r.f_hat - truth.f).norm_sqr(),
        sigma_h2_err2: r.sigma_h2_hat.map(|s| (s - truth.sigma_h2).powi(2)),
        h_err2,
    })
}

/// Mean squared error per entry.
pub fn channel_error(h_hat: &Mat, h: &Mat) -> f64 {
    (h_hat - h).frobenius_sqr() / (h.rows() * h.cols()) as f64
}

/// Per-trial outcomes of every configured estimator for one cell, indexed
/// `[trial][estimator]`.
pub fn run_cell(
    cfg: &ExperimentConfig,
    cell_index: usize,
    cell: &Cell,
    threads: Option<usize>,
) -> Result<Vec<Vec<TrialOutcome>>, HarnessError> {
    run_indexed(threads, cfg.trials, |trial| {
        let (stats, truth) = cell.draw(cfg.seed, cell_index, trial)?;
        cfg.estimators
            .iter()
            .map(|&m| score(&stats, &truth, m, &cell.spec))
            .collect::<Result<Vec<_>, _>>()
    })?
    .into_iter()
    .collect()
}

#[derive(Default)]
struct Accumulator {
    ok: usize,
    degenerate: usize,
    f: f64,
    s: f64,
    s_count: usize,
    h: f64,
    h_count: usize,
}

impl Accumulator {
    fn push(&mut self, o: &TrialOutcome) {
        match *o {
            TrialOutcome::Degenerate => self.degenerate += 1,
            TrialOutcome::Estimated {
                f_err2,
                sigma_h2_err2,
                h_err2,
            } => {
                self.ok += 1;
                self.f += f_err2;
                if let Some(e) = sigma_h2_err2 {
                    self.s += e;
                    self.s_count += 1;
                }
                if let Some(e) = h_err2 {
                    self.h += e;
                    self.h_count += 1;
                }
            }
        }
    }
}

fn mean(sum: f64, count: usize) -> Option<f64> {
    (count > 0).then(|| sum / count as f64)
}

pub(crate) fn empty_row(cfg: &ExperimentConfig, method: Method, snr_db: f64) -> SweepRow {
    SweepRow {
        scenario: cfg.scenario,
        estimator: method,
        n: cfg.n,
        l: cfg.l,
        snr_db,
        trials: cfg.trials,
        trials_ok: 0,
        trials_degenerate: 0,
        rmse_f_rel: None,
        rmse_sigma_h2_rel: None,
        crb_f_rel: None,
        crb_sigma_h2_rel: None,
        rmse_h_rel: None,
        bcrb_h_rel: None,
        c_mismatched: None,
        c_adapted: None,
        c_upper: None,
        trials_fallback: 0,
    }
}

/// Attaches the Cramér-Rao references of a cell.
pub(crate) fn with_bounds(mut row: SweepRow, cell: &Cell) -> SweepRow {
    if let Ok(b) = crb(cell.f, cell.sigma_h2, cell.sigma2, cell.spec.n(), cell.spec.lambdas()) {
        row.crb_f_rel = Some(b.crb_f_rel(cell.f));
        row.crb_sigma_h2_rel = Some(b.crb_sigma_h2_rel(cell.sigma_h2));
    }
    row
}

/// Runs the sweep on the worker count taken from the environment.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, HarnessError> {
    run_sweep_with_threads(cfg, env_threads()?)
}

pub fn run_sweep_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Vec<SweepRow>, HarnessError> {
    cfg.validate()?;
    let f = cfg.true_f();
    let sigma_h2 = cfg.sigma_h2();
    let mut rows = Vec::with_capacity(cfg.snr_grid_db.len() * cfg.estimators.len());
    for (ci, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let cell = Cell::new(cfg, snr_db, f, sigma_h2)?;
        let outcomes = run_cell(cfg, ci, &cell, threads)?;
        let bcrb = bayesian_crb_h(f, sigma_h2, cell.sigma2, &cell.spec).ok();
        for (ei, &method) in cfg.estimators.iter().enumerate() {
            let mut acc = Accumulator::default();
            for trial in &outcomes {
                acc.push(&trial[ei]);
            }
            let mut row = with_bounds(empty_row(cfg, method, snr_db), &cell);
            row.trials_ok = acc.ok;
            row.trials_degenerate = acc.degenerate;
            row.rmse_f_rel = mean(acc.f, acc.ok).map(|m| m.sqrt() / f.norm());
            row.rmse_sigma_h2_rel = mean(acc.s, acc.s_count).map(|m| m.sqrt() / sigma_h2);
            row.rmse_h_rel = mean(acc.h, acc.h_count).map(|m| (m / sigma_h2).sqrt());
            row.bcrb_h_rel = bcrb.map(|b| (b / sigma_h2).sqrt());
            rows.push(row);
        }
    }
    Ok(rows)
}
