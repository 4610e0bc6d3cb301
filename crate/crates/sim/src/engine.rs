//! One frame through the whole link, and the per-frame tallies.

use bicmb_core::bicm::CodedFrame;
use bicmb_core::channel::{sample_channel, transmit, transmit_vector, NoiseConfig};
use bicmb_core::detector::{
    fp_preparation_mults, preparation_mults, prepare, prepare_fp, rotation_mults, MultCounter, SearchMethod,
};
use bicmb_core::pstbc::encode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{LinkPlan, System};
use crate::error::SimResult;

/// Additive per-frame results. Integer-only so that any merge order gives
/// the same totals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FrameTally {
    pub frames: u64,
    pub bit_errors: u64,
    pub bits: u64,
    pub counter: MultCounter,
    pub prep_mults: u64,
}

impl FrameTally {
    pub fn merge(mut self, other: FrameTally) -> FrameTally {
        self.frames += other.frames;
        self.bit_errors += other.bit_errors;
        self.bits += other.bits;
        self.counter += other.counter;
        self.prep_mults += other.prep_mults;
        self
    }
}

/// `snr_idx << 32 | frame_idx`.
#[inline]
pub fn trial_index(snr_idx: usize, frame_idx: u64) -> u64 {
    ((snr_idx as u64) << 32) | (frame_idx & 0xffff_ffff)
}

#[inline]
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(master_seed ^ trial)
}

/// Per-stream-position metric pairs for a frame already through the
/// channel and detector.
pub struct Received {
    pub frame: CodedFrame,
    pub metrics: Vec<[f64; 2]>,
    pub counter: MultCounter,
    pub prep_mults: u64,
}

/// Draws info bits, a channel and noise from `rng` and runs the receiver
/// up to the bit metrics.
pub fn transmit_frame<R: Rng>(
    plan: &LinkPlan,
    noise: &NoiseConfig,
    method: SearchMethod,
    rng: &mut R,
) -> SimResult<Received> {
    let layout = &plan.layout;
    let info: Vec<u8> = (0..layout.info_len()).map(|_| rng.random_range(0..2u8)).collect();
    let channel = sample_channel(plan.params.dim, rng)?;
    let frame = layout.encode(&info)?;
    let d = plan.params.size();
    let q = layout.constellation().bits_per_symbol();
    let mut metrics = vec![[0.0; 2]; layout.stream_len()];
    let mut counter = MultCounter::default();
    let group_bits = d * q;
    let uses = (layout.blocks() * d) as u64;
    let prep_mults = match plan.system {
        System::PerfectCoded => {
            let ctx = prepare(&channel.lambda, &plan.params, layout.constellation())?;
            for (k, block) in frame.symbol_blocks.iter().enumerate() {
                let z = encode(&plan.params, block)?;
                let y = transmit(&channel.lambda, &z, noise, rng)?;
                for (v, y_tilde) in ctx.rotate_codeword(&y)?.iter().enumerate() {
                    let at = (k * d + v) * group_bits;
                    ctx.group_metrics(y_tilde, method, &mut counter, &mut metrics[at..at + group_bits])?;
                }
            }
            preparation_mults(plan.params.dim) + uses * rotation_mults(plan.params.dim)
        }
        System::FullPrecoded => {
            let ctx = prepare_fp(&channel.lambda, &plan.params.generator, layout.constellation())?;
            for (k, block) in frame.symbol_blocks.iter().enumerate() {
                for (v, x) in block.columns.iter().enumerate() {
                    let w = plan.params.generator.mul_vec(x)?;
                    let r = transmit_vector(&channel.lambda, &w, noise, rng)?;
                    let y_tilde = ctx.rotate(&r)?;
                    let at = (k * d + v) * group_bits;
                    ctx.metrics(&y_tilde, method, &mut counter, &mut metrics[at..at + group_bits])?;
                }
            }
            fp_preparation_mults(plan.params.dim) + uses * rotation_mults(plan.params.dim)
        }
    };
    Ok(Received { frame, metrics, counter, prep_mults })
}

/// Simulates trial `trial` and counts decoded bit errors.
pub fn simulate_frame(
    plan: &LinkPlan,
    noise: &NoiseConfig,
    method: SearchMethod,
    master_seed: u64,
    trial: u64,
) -> SimResult<FrameTally> {
    let mut rng = trial_rng(master_seed, trial);
    let rx = transmit_frame(plan, noise, method, &mut rng)?;
    let decoded = plan.layout.decode(&rx.metrics)?;
    let bit_errors = decoded.iter().zip(&rx.frame.info_bits).filter(|(a, b)| a != b).count() as u64;
    Ok(FrameTally { frames: 1, bit_errors, bits: decoded.len() as u64, counter: rx.counter, prep_mults: rx.prep_mults })
}
