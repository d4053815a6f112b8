//! Record and table emission.

use std::io::Write;

use serde::Serialize;

use crate::cbm::{Estimate, FtConfig};
use crate::error::{Error, Result};

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub eta: f64,
    pub f: f64,
    pub epsilon: f64,
    pub adversary: String,
    pub trials: u64,
    pub success_rate: f64,
    pub stderr: f64,
    pub signonly_rate: f64,
    pub failure_rate: f64,
    pub inconsistent_rate: f64,
}

impl SweepRow {
    pub fn new(cfg: &FtConfig, est: &Estimate) -> Self {
        SweepRow {
            n: cfg.enc.n,
            p: cfg.enc.p,
            q: cfg.enc.q,
            eta: cfg.noise.loss_rate,
            f: cfg.noise.failure_detection,
            epsilon: cfg.noise.flip_error_rate,
            adversary: cfg.adversary.to_string(),
            trials: est.trials,
            success_rate: est.success_rate(),
            stderr: est.stderr(),
            signonly_rate: est.signonly_rate(),
            failure_rate: est.failure_rate(),
            inconsistent_rate: est.inconsistent_rate(),
        }
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Config(format!("csv: {e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per line.
pub fn write_json_lines<W: Write, T: Serialize>(records: &[T], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| Error::Config(format!("json: {e}")))?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
