//! SNR sweeps: batches of frames run in parallel, stop rule checked between
//! batches.

use std::time::Instant;

use bicmb_core::channel::NoiseConfig;
use bicmb_core::detector::SearchMethod;
use rayon::prelude::*;

use crate::config::{LinkPlan, SimConfig, System};
use crate::engine::{simulate_frame, trial_index, FrameTally};
use crate::error::{SimError, SimResult};
use crate::report::{build_id, RunReport, SimPoint, StopReason, SweepKind};

fn pool(workers: usize) -> SimResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::config(format!("cannot start worker pool: {e}")))
}

/// Frames `[start, end)` of SNR point `snr_idx`, merged in index order.
fn run_batch(
    plan: &LinkPlan,
    noise: &NoiseConfig,
    method: SearchMethod,
    seed: u64,
    snr_idx: usize,
    start: u64,
    end: u64,
) -> SimResult<FrameTally> {
    (start..end)
        .into_par_iter()
        .map(|f| simulate_frame(plan, noise, method, seed, trial_index(snr_idx, f)))
        .try_reduce(FrameTally::default, |a, b| Ok(a.merge(b)))
}

fn sweep(config: &SimConfig, kind: SweepKind) -> SimResult<RunReport> {
    let plan = config.build()?;
    let started = Instant::now();
    let method = SearchMethod::from(config.detection);
    let (max_frames, min_errors) = match kind {
        SweepKind::Ber => (config.max_frames, Some(config.min_bit_errors)),
        SweepKind::Complexity => (config.complexity_frames, None),
    };
    let pool = pool(config.workers)?;
    let mut points = Vec::with_capacity(config.snr_db.len());
    for (i, &snr_db) in config.snr_db.iter().enumerate() {
        let noise = if config.noise_disabled {
            NoiseConfig::noiseless()
        } else {
            NoiseConfig::from_db(plan.params.dim, snr_db)?
        };
        let mut tally = FrameTally::default();
        let stop = loop {
            let start = tally.frames;
            let end = (start + config.batch_frames).min(max_frames);
            let batch = pool.install(|| run_batch(&plan, &noise, method, config.seed, i, start, end))?;
            tally = tally.merge(batch);
            if min_errors.is_some_and(|m| tally.bit_errors >= m) {
                break StopReason::MinErrors;
            }
            if tally.frames >= max_frames {
                break StopReason::MaxFrames;
            }
        };
        points.push(SimPoint::from_tally(snr_db, &tally, stop));
    }
    Ok(RunReport {
        kind,
        config: config.clone(),
        points,
        wall_time_s: started.elapsed().as_secs_f64(),
        build: build_id(),
    })
}

/// BER per SNR until `min_bit_errors` or `max_frames`.
pub fn run_ber_sweep(config: &SimConfig) -> SimResult<RunReport> {
    sweep(config, SweepKind::Ber)
}

/// Multiplication counts per SNR over exactly `complexity_frames` frames.
pub fn run_complexity_sweep(config: &SimConfig) -> SimResult<RunReport> {
    sweep(config, SweepKind::Complexity)
}

/// BER sweep of the fully precoded baseline.
pub fn run_fp_baseline(config: &SimConfig) -> SimResult<RunReport> {
    if config.system != System::FullPrecoded {
        return Err(SimError::config("run_fp_baseline needs system = \"bicmb-fp\""));
    }
    sweep(config, SweepKind::Ber)
}
