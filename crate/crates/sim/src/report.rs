//! Sweep results and their CSV/JSON forms.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::engine::FrameTally;
use crate::error::{SimError, SimResult};

pub const CSV_HEADER: [&str; 6] =
    ["snr_db", "ber", "bit_errors", "bits", "avg_real_mults_per_bit_metric", "amortized_prep_mults"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MinErrors,
    MaxFrames,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub snr_db: f64,
    pub ber: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub avg_real_mults_per_bit_metric: f64,
    /// Channel preparation and rotation work divided by the bit metrics it
    /// served.
    pub amortized_prep_mults: f64,
    pub frames: u64,
    pub metrics_computed: u64,
    pub stop: StopReason,
}

impl SimPoint {
    pub fn from_tally(snr_db: f64, t: &FrameTally, stop: StopReason) -> Self {
        let per_metric =
            |x: u64| if t.counter.metrics_computed == 0 { 0.0 } else { x as f64 / t.counter.metrics_computed as f64 };
        SimPoint {
            snr_db,
            ber: if t.bits == 0 { 0.0 } else { t.bit_errors as f64 / t.bits as f64 },
            bit_errors: t.bit_errors,
            bits: t.bits,
            avg_real_mults_per_bit_metric: per_metric(t.counter.real_multiplications),
            amortized_prep_mults: per_metric(t.prep_mults),
            frames: t.frames,
            metrics_computed: t.counter.metrics_computed,
            stop,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Ber,
    Complexity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub kind: SweepKind,
    pub config: SimConfig,
    pub points: Vec<SimPoint>,
    pub wall_time_s: f64,
    pub build: String,
}

pub fn build_id() -> String {
    format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"))
}

impl RunReport {
    /// Equality of everything but the wall time.
    pub fn same_results(&self, other: &RunReport) -> bool {
        self.kind == other.kind
            && self.config == other.config
            && self.points == other.points
            && self.build == other.build
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> SimResult<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(CSV_HEADER)?;
        for p in &self.points {
            wr.write_record([
                p.snr_db.to_string(),
                p.ber.to_string(),
                p.bit_errors.to_string(),
                p.bits.to_string(),
                p.avg_real_mults_per_bit_metric.to_string(),
                p.amortized_prep_mults.to_string(),
            ])?;
        }
        wr.flush().map_err(|source| SimError::Io { path: "<csv>".into(), source })?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> SimResult<()> {
        let f =
            std::fs::File::create(path).map_err(|source| SimError::Io { path: path.display().to_string(), source })?;
        self.write_csv(f)
    }

    pub fn save_json(&self, path: &Path) -> SimResult<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text + "\n").map_err(|source| SimError::Io { path: path.display().to_string(), source })
    }

    /// Fixed-width table for the terminal.
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:>8} {:>12} {:>10} {:>12} {:>10} {:>14} {:>12}\n",
            "snr_db", "ber", "errors", "bits", "frames", "mults/metric", "prep/metric"
        );
        for p in &self.points {
            s += &format!(
                "{:>8.2} {:>12.4e} {:>10} {:>12} {:>10} {:>14.1} {:>12.2}\n",
                p.snr_db,
                p.ber,
                p.bit_errors,
                p.bits,
                p.frames,
                p.avg_real_mults_per_bit_metric,
                p.amortized_prep_mults
            );
        }
        s
    }
}

/// Reads back the six CSV columns.
pub fn read_csv<R: std::io::Read>(r: R) -> SimResult<Vec<[f64; 6]>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(SimError::config(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let mut row = [0.0; 6];
        for (slot, field) in row.iter_mut().zip(rec.iter()) {
            *slot = field.parse().map_err(|_| SimError::config(format!("bad CSV field {field:?}")))?;
        }
        rows.push(row);
    }
    Ok(rows)
}
