//! Monte Carlo harness for perfect-coded and fully precoded multiple
//! beamforming: configuration, parallel BER and complexity sweeps, the
//! diversity slope, CSV/JSON output and the `bicmb` CLI.

pub mod config;
pub mod engine;
mod error;
pub mod probe;
pub mod report;
pub mod selftest;
pub mod slope;
pub mod sweep;

pub use config::{SimConfig, System};
pub use error::{SimError, SimResult};
pub use report::{RunReport, SimPoint};
pub use slope::estimate_diversity_slope;
pub use sweep::{run_ber_sweep, run_complexity_sweep, run_fp_baseline};
