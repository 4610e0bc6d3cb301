//! Quick invariant checks behind `bicmb selftest`. The long-running
//! diversity slope is not included.

use bicmb_core::bicm::{conv_encode, viterbi_decode, CodeRate, Constellation, ConvCodeSpec};
use bicmb_core::channel::{sample_channel, NoiseConfig};
use bicmb_core::detector::{prepare, BitMetricRequest, MultCounter, SearchMethod};
use bicmb_core::linalg::ComplexMatrix;
use bicmb_core::pstbc::{encode, extract_group, make_params, phase_matrix, SymbolBlock};
use bicmb_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{SimConfig, System};
use crate::engine::simulate_frame;
use crate::error::{SimError, SimResult};
use crate::probe::probe_single_symbol_errors;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn(&mut ChaCha8Rng) -> SimResult<String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> SimResult<()> {
    if cond {
        Ok(())
    } else {
        Err(SimError::SelfTest(msg()))
    }
}

fn random_block(c: &Constellation, d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    (0..d).map(|_| (0..d).map(|_| c.point(rng.random_range(0..c.size() as u32))).collect()).collect()
}

fn grouping(rng: &mut ChaCha8Rng) -> SimResult<String> {
    let mut worst: f64 = 0.0;
    for d in [2, 3, 4, 6] {
        let p = make_params(d)?;
        let c = Constellation::qam(16)?;
        for _ in 0..100 {
            let ch = sample_channel(p.dim, rng)?;
            let cols = random_block(&c, d, rng);
            let y = ch.lambda_matrix().matmul(&encode(&p, &SymbolBlock::new(p.dim, cols.clone())?)?.z)?;
            for (v, col) in cols.iter().enumerate() {
                let want = phase_matrix(&p, v)?.phi.matmul(&ch.lambda_matrix())?.matmul(&p.generator)?.mul_vec(col)?;
                let got = extract_group(&y, v)?;
                worst = got.iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(worst, f64::max);
            }
        }
    }
    ensure(worst < 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn realness(rng: &mut ChaCha8Rng) -> SimResult<String> {
    let mut worst: f64 = 0.0;
    for d in [2, 4] {
        let p = make_params(d)?;
        for _ in 0..200 {
            let ch = sample_channel(p.dim, rng)?;
            let lg = ComplexMatrix::from_real_diag(&ch.lambda).matmul(&p.generator)?;
            let r = bicmb_core::linalg::qr(&lg)?.r;
            let im = r.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
            worst = worst.max(im / r.frobenius_norm());
        }
    }
    ensure(worst < 1e-9, || format!("max |Im R|/|R| = {worst:e}"))?;
    Ok(format!("max |Im R|/|R| = {worst:.1e}"))
}

fn sd_exactness(rng: &mut ChaCha8Rng) -> SimResult<String> {
    let mut n = 0;
    for (d, m) in [(2, 4), (2, 16), (2, 64), (4, 4), (3, 4)] {
        let p = make_params(d)?;
        let c = Constellation::qam(m)?;
        for _ in 0..100 {
            let ch = sample_channel(p.dim, rng)?;
            let ctx = prepare(&ch.lambda, &p, &c)?;
            let y: Vec<Complex64> =
                (0..d).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5) * 3.0).collect();
            let req = BitMetricRequest::new(
                &c,
                y,
                rng.random_range(0..d),
                rng.random_range(0..c.bits_per_symbol()),
                rng.random_range(0..2),
            )?;
            let mut cnt = MultCounter::default();
            let sd = ctx.bit_metric_sd(&req, &mut cnt)?;
            let ex = if ctx.r_is_real() {
                ctx.bit_metric_exhaustive_axis(&req, &mut cnt)?
            } else {
                ctx.bit_metric_exhaustive(&req, &mut cnt)?
            };
            ensure((sd - ex).abs() <= 1e-9 * (1.0 + ex), || format!("D={d} M={m}: SD {sd} vs exhaustive {ex}"))?;
            n += 1;
        }
    }
    Ok(format!("{n} instances"))
}

fn noiseless_chain(_rng: &mut ChaCha8Rng) -> SimResult<String> {
    let mut frames = 0;
    for system in [System::PerfectCoded, System::FullPrecoded] {
        for (d, m, rate) in [(2, 4, "2/3"), (2, 16, "2/3"), (4, 4, "4/5")] {
            let plan = SimConfig::new(system, d, m, rate, vec![0.0]).build()?;
            for t in 0..20 {
                let tally = simulate_frame(&plan, &NoiseConfig::noiseless(), SearchMethod::SphereDecoder, 1, t)?;
                ensure(tally.bit_errors == 0, || format!("{system} D={d} M={m}: {} errors", tally.bit_errors))?;
                frames += 1;
            }
        }
    }
    Ok(format!("{frames} frames, 0 errors"))
}

fn candidate_counts(rng: &mut ChaCha8Rng) -> SimResult<String> {
    for d in [2, 4] {
        let p = make_params(d)?;
        for m in [4usize, 16, 64] {
            if d == 4 && m == 64 {
                continue;
            }
            let c = Constellation::qam(m)?;
            let ctx = prepare(&sample_channel(p.dim, rng)?.lambda, &p, &c)?;
            let req = BitMetricRequest::new(&c, vec![Complex64::new(0.1, 0.2); d], 0, 0, 0)?;
            let mut full = MultCounter::default();
            ctx.bit_metric_exhaustive(&req, &mut full)?;
            let mut axis = MultCounter::default();
            ctx.bit_metric_exhaustive_axis(&req, &mut axis)?;
            let side = (m as f64).sqrt() as u64;
            ensure(full.candidates_enumerated == (m as u64).pow(d as u32) / 2, || format!("full count D={d} M={m}"))?;
            ensure(axis.candidates_enumerated == side.pow(d as u32) / 2, || format!("axis count D={d} M={m}"))?;
        }
    }
    Ok("M^D/2 and (√M)^D/2".into())
}

fn rho_positive(_rng: &mut ChaCha8Rng) -> SimResult<String> {
    let mut lo = f64::INFINITY;
    for d in [2, 4] {
        let s = probe_single_symbol_errors(d, 4)?;
        lo = lo.min(s.min_rho[0]);
    }
    ensure(lo > 1e-9, || format!("min ρ_0 = {lo:e}"))?;
    Ok(format!("min ρ_0 = {lo:.3}"))
}

fn viterbi_short(rng: &mut ChaCha8Rng) -> SimResult<String> {
    let spec = ConvCodeSpec::standard(CodeRate::TwoThirds);
    for _ in 0..50 {
        let len = rng.random_range(1..=6usize);
        let metrics: Vec<[f64; 2]> = (0..spec.coded_len(len)).map(|_| [rng.random(), rng.random()]).collect();
        let cost = |info: &[u8]| -> SimResult<f64> {
            Ok(conv_encode(&spec, info)?.iter().zip(&metrics).map(|(&b, m)| m[b as usize]).sum())
        };
        let decoded = viterbi_decode(&spec, &metrics)?;
        let mut best = f64::INFINITY;
        for word in 0..1u32 << len {
            let info: Vec<u8> = (0..len).map(|i| ((word >> i) & 1) as u8).collect();
            best = best.min(cost(&info)?);
        }
        let got = cost(&decoded)?;
        ensure((got - best).abs() < 1e-9, || format!("Viterbi cost {got} vs best {best}"))?;
    }
    Ok("50 frames".into())
}

const CHECKS: [(&str, Check); 7] = [
    ("grouping identity", grouping),
    ("real triangular factor", realness),
    ("sphere decoder exactness", sd_exactness),
    ("noise-free chain", noiseless_chain),
    ("candidate counts", candidate_counts),
    ("rho_0 positivity", rho_positive),
    ("viterbi optimality", viterbi_short),
];

pub fn run_selftest(seed: u64) -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .enumerate()
        .map(|(i, (name, check))| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ i as u64);
            match check(&mut rng) {
                Ok(detail) => CheckOutcome { name, passed: true, detail },
                Err(e) => CheckOutcome { name, passed: false, detail: e.to_string() },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        for o in super::run_selftest(0) {
            assert!(o.passed, "{}: {}", o.name, o.detail);
        }
    }
}
