//! Versioned CSV output.
//!
//! The first line is `schema=1`; the header row follows. Floats are written
//! with 17 significant digits and absent values as empty fields.

use std::io::{BufRead, Write};

use super::config::Scenario;
use super::HarnessError;
use crate::estimators::Method;

pub const SCHEMA_LINE: &str = "schema=1";

pub const COLUMNS: [&str; 18] = [
    "scenario",
    "estimator",
    "N",
    "L",
    "snr_db",
    "trials",
    "trials_ok",
    "trials_degenerate",
    "rmse_F_rel",
    "rmse_sigma_h2_rel",
    "crb_F_rel",
    "crb_sigma_h2_rel",
    "rmse_H_rel",
    "bcrb_H_rel",
    "c_mismatched",
    "c_adapted",
    "c_upper",
    "trials_fallback",
];

/// One (SNR, estimator) cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scenario: Scenario,
    pub estimator: Method,
    pub n: usize,
    pub l: usize,
    pub snr_db: f64,
    pub trials: usize,
    pub trials_ok: usize,
    pub trials_degenerate: usize,
    pub rmse_f_rel: Option<f64>,
    pub rmse_sigma_h2_rel: Option<f64>,
    pub crb_f_rel: Option<f64>,
    pub crb_sigma_h2_rel: Option<f64>,
    /// `sqrt(per-entry MSE of Ĥ / σ_h²)`.
    pub rmse_h_rel: Option<f64>,
    pub bcrb_h_rel: Option<f64>,
    pub c_mismatched: Option<f64>,
    pub c_adapted: Option<f64>,
    pub c_upper: Option<f64>,
    /// Capacity trials whose impedance estimate was not passive; the
    /// original load was kept.
    pub trials_fallback: usize,
}

impl SweepRow {
    fn record(&self) -> Vec<String> {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
        vec![
            self.scenario.tag().to_string(),
            self.estimator.tag().to_string(),
            self.n.to_string(),
            self.l.to_string(),
            format!("{:.16e}", self.snr_db),
            self.trials.to_string(),
            self.trials_ok.to_string(),
            self.trials_degenerate.to_string(),
            f(self.rmse_f_rel),
            f(self.rmse_sigma_h2_rel),
            f(self.crb_f_rel),
            f(self.crb_sigma_h2_rel),
            f(self.rmse_h_rel),
            f(self.bcrb_h_rel),
            f(self.c_mismatched),
            f(self.c_adapted),
            f(self.c_upper),
            self.trials_fallback.to_string(),
        ]
    }

    fn from_record(rec: &csv::StringRecord) -> Result<Self, HarnessError> {
        let bad = |col: &str, v: &str| HarnessError::Schema(format!("column {col}: cannot parse '{v}'"));
        let get = |i: usize| rec.get(i).unwrap_or("");
        let int = |i: usize| get(i).parse::<usize>().map_err(|_| bad(COLUMNS[i], get(i)));
        let opt = |i: usize| -> Result<Option<f64>, HarnessError> {
            match get(i) {
                "" => Ok(None),
                s => s.parse::<f64>().map(Some).map_err(|_| bad(COLUMNS[i], s)),
            }
        };
        Ok(Self {
            scenario: get(0).parse().map_err(|_| bad(COLUMNS[0], get(0)))?,
            estimator: get(1).parse().map_err(|_| bad(COLUMNS[1], get(1)))?,
            n: int(2)?,
            l: int(3)?,
            snr_db: get(4).parse().map_err(|_| bad(COLUMNS[4], get(4)))?,
            trials: int(5)?,
            trials_ok: int(6)?,
            trials_degenerate: int(7)?,
            rmse_f_rel: opt(8)?,
            rmse_sigma_h2_rel: opt(9)?,
            crb_f_rel: opt(10)?,
            crb_sigma_h2_rel: opt(11)?,
            rmse_h_rel: opt(12)?,
            bcrb_h_rel: opt(13)?,
            c_mismatched: opt(14)?,
            c_adapted: opt(15)?,
            c_upper: opt(16)?,
            trials_fallback: int(17)?,
        })
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<(), HarnessError> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(COLUMNS)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[SweepRow]) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is ASCII"))
}

pub fn read_csv<R: BufRead>(mut input: R) -> Result<Vec<SweepRow>, HarnessError> {
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(HarnessError::Schema(format!("expected '{SCHEMA_LINE}', found '{}'", first.trim_end())));
    }
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(HarnessError::Schema(format!("unexpected header {header:?}")));
    }
    r.records().map(|rec| SweepRow::from_record(&rec?)).collect()
}

/// Fraction of all trials flagged degenerate.
pub fn degenerate_fraction(rows: &[SweepRow]) -> f64 {
    let total: usize = rows.iter().map(|r| r.trials).sum();
    let flagged: usize = rows.iter().map(|r| r.trials_degenerate).sum();
    if total == 0 {
        0.0
    } else {
        flagged as f64 / total as f64
    }
}
