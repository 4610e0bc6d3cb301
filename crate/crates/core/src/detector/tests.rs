use super::*;
use crate::channel::{complex_gaussian, sample_channel};
use crate::pstbc::{encode, make_params, SymbolBlock};
use alloc::vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_symbols(c: &Constellation, d: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    (0..d).map(|_| rng.random_range(0..c.size() as u32)).collect()
}

fn context(d: usize, m: usize, rng: &mut ChaCha8Rng) -> DetectorContext {
    let p = make_params(d).unwrap();
    let ch = sample_channel(p.dim, rng).unwrap();
    prepare(&ch.lambda, &p, &Constellation::qam(m).unwrap()).unwrap()
}

fn noisy_obs(ctx: &DetectorContext, labels: &[u32], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let x: Vec<Complex64> = labels.iter().map(|&l| ctx.constellation().point(l)).collect();
    let mut y = ctx.r().mul_vec(&x).unwrap();
    for z in &mut y {
        *z += complex_gaussian(rng, sigma * sigma);
    }
    y
}

#[test]
fn realness_of_triangular_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for d in [2, 3, 4, 6] {
        for _ in 0..200 {
            let ctx = context(d, 4, &mut rng);
            assert_eq!(ctx.r_is_real(), d == 2 || d == 4);
            let r = ctx.r();
            for i in 0..d {
                assert!(r[(i, i)].re > 0.0 && r[(i, i)].im == 0.0);
                for j in 0..i {
                    assert!(r[(i, j)].norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn identity_lambda_gives_identity_r() {
    for d in [2, 3, 4, 6] {
        let p = make_params(d).unwrap();
        let ctx = prepare(&vec![1.0; d], &p, &Constellation::qam(4).unwrap()).unwrap();
        let id = ComplexMatrix::identity(d);
        assert!(ctx.r().sub(&id).unwrap().max_abs() < 1e-9);
        assert!(ctx.q().matmul(ctx.r()).unwrap().sub(&p.generator).unwrap().max_abs() < 1e-9);
    }
}

#[test]
fn lambda_validation() {
    let p = make_params(2).unwrap();
    let c = Constellation::qam(4).unwrap();
    assert!(prepare(&[1.0, 2.0], &p, &c).is_err());
    assert!(prepare(&[1.0, 0.0], &p, &c).is_err());
    assert!(prepare(&[1.0], &p, &c).is_err());
    assert!(prepare(&[f64::NAN, 1.0], &p, &c).is_err());
    assert!(prepare(&[1.0, 1.0], &p, &c).is_ok());
}

#[test]
fn noiseless_rotation_recovers_r_x() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [2, 3, 4, 6] {
        let p = make_params(d).unwrap();
        let c = Constellation::qam(16).unwrap();
        for _ in 0..50 {
            let ch = sample_channel(p.dim, &mut rng).unwrap();
            let ctx = prepare(&ch.lambda, &p, &c).unwrap();
            let cols: Vec<Vec<Complex64>> =
                (0..d).map(|_| random_symbols(&c, d, &mut rng).iter().map(|&l| c.point(l)).collect()).collect();
            let x = SymbolBlock::new(p.dim, cols.clone()).unwrap();
            let y = ch.lambda_matrix().matmul(&encode(&p, &x).unwrap().z).unwrap();
            let rotated = ctx.rotate_codeword(&y).unwrap();
            for v in 0..d {
                let want = ctx.r().mul_vec(&cols[v]).unwrap();
                let err: f64 = rotated[v].iter().zip(&want).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                assert!(err < 1e-9, "D={d} v={v} err={err}");
            }
            // Group 0 has no phase: plain Q^H.
            let y0 = extract_group(&y, 0).unwrap();
            let direct = ctx.q().adjoint().mul_vec(&y0).unwrap();
            assert_eq!(ctx.rotate_group(&y0, 0).unwrap(), direct);
        }
    }
    let ctx = context(2, 4, &mut rng);
    assert!(ctx.rotate_group(&[Complex64::new(0.0, 0.0)], 0).is_err());
    assert!(ctx.rotate_group(&[Complex64::new(0.0, 0.0); 2], 2).is_err());
}

#[test]
fn rotated_noise_stays_white() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let ctx = context(2, 4, &mut rng);
    let n0 = 0.7;
    let draws = 100_000;
    let mut cov = [[Complex64::new(0.0, 0.0); 2]; 2];
    for _ in 0..draws {
        let n = [complex_gaussian(&mut rng, n0), complex_gaussian(&mut rng, n0)];
        let t = ctx.rotate_group(&n, 1).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                cov[a][b] += t[a] * t[b].conj();
            }
        }
    }
    for a in 0..2 {
        for b in 0..2 {
            let e = cov[a][b] / draws as f64;
            if a == b {
                assert!((e.re - n0).abs() < 0.02 * n0, "var {e}");
            } else {
                assert!(e.norm() < 0.02 * n0, "cross {e}");
            }
        }
    }
}

#[test]
fn exhaustive_noiseless_metrics() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (d, m) in [(2, 4), (2, 16), (3, 4)] {
        let ctx = context(d, m, &mut rng);
        let c = ctx.constellation().clone();
        let labels = random_symbols(&c, d, &mut rng);
        let y = noisy_obs(&ctx, &labels, 0.0, &mut rng);
        let rmin = (0..d).map(|i| ctx.r()[(i, i)].re).fold(f64::INFINITY, f64::min);
        for n in 0..d {
            for j in 0..c.bits_per_symbol() {
                let sent = c.label_bit(labels[n], j);
                let mut cnt = MultCounter::default();
                let same = BitMetricRequest::new(&c, y.clone(), n, j, sent).unwrap();
                let other = BitMetricRequest::new(&c, y.clone(), n, j, 1 - sent).unwrap();
                assert!(ctx.bit_metric_exhaustive(&same, &mut cnt).unwrap() < 1e-20);
                let g = ctx.bit_metric_exhaustive(&other, &mut cnt).unwrap();
                assert!(g >= c.min_distance().powi(2) * rmin * rmin * (1.0 - 1e-9));
                assert_eq!(cnt.candidates_enumerated, 2 * (m as u64).pow(d as u32) / 2);
                assert_eq!(cnt.metrics_computed, 2);
            }
        }
    }
}

#[test]
fn candidate_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let ctx = context(2, 4, &mut rng);
    let c = ctx.constellation().clone();
    let req = BitMetricRequest::new(&c, vec![Complex64::new(0.1, -0.2); 2], 0, 1, 0).unwrap();
    let mut a = MultCounter::default();
    ctx.bit_metric_exhaustive(&req, &mut a).unwrap();
    assert_eq!(a.candidates_enumerated, 8);
    let mut b = MultCounter::default();
    ctx.bit_metric_exhaustive_axis(&req, &mut b).unwrap();
    assert_eq!(b.candidates_enumerated, 2);
    let ctx4 = context(4, 64, &mut rng);
    let c64 = ctx4.constellation().clone();
    let req = BitMetricRequest::new(&c64, vec![Complex64::new(0.1, -0.2); 4], 2, 4, 1).unwrap();
    let mut e = MultCounter::default();
    ctx4.bit_metric_exhaustive_axis(&req, &mut e).unwrap();
    assert_eq!(e.candidates_enumerated, 8u64.pow(4) / 2);
}

#[test]
fn axis_search_needs_real_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let ctx = context(3, 4, &mut rng);
    let c = ctx.constellation().clone();
    let req = BitMetricRequest::new(&c, vec![Complex64::new(0.0, 0.0); 3], 0, 0, 0).unwrap();
    assert!(matches!(
        ctx.bit_metric_exhaustive_axis(&req, &mut MultCounter::default()),
        Err(Error::UnsupportedConfiguration(_))
    ));
    let mut bad = req.clone();
    bad.axis = Axis::Imag;
    assert!(ctx.bit_metric_sd(&bad, &mut MultCounter::default()).is_err());
}

/// Brute force of `min ‖y − R x‖²` over the real or imaginary parts of
/// `x ∈ χ^D` with an optional constraint on entry `n`.
fn brute_axis(ctx: &DetectorContext, y: &[f64], constraint: Option<(usize, usize, u8)>) -> f64 {
    let d = ctx.dim().get();
    let pam = ctx.constellation().pam();
    let side = pam.len();
    let mut best = f64::INFINITY;
    for code in 0..side.pow(d as u32) {
        let idx: Vec<usize> = (0..d).map(|l| code / side.pow(l as u32) % side).collect();
        if let Some((n, ja, b)) = constraint {
            if pam.label_bit(idx[n], ja) != b {
                continue;
            }
        }
        let mut m = 0.0;
        for i in 0..d {
            let mut s = y[i];
            for l in i..d {
                s -= ctx.r()[(i, l)].re * pam.levels[idx[l]];
            }
            m += s * s;
        }
        best = best.min(m);
    }
    best
}

#[test]
fn axis_separation_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for m in [4, 16] {
        for _ in 0..50 {
            let ctx = context(2, m, &mut rng);
            let c = ctx.constellation().clone();
            let labels = random_symbols(&c, 2, &mut rng);
            let y = noisy_obs(&ctx, &labels, 0.4, &mut rng);
            let re: Vec<f64> = y.iter().map(|z| z.re).collect();
            let im: Vec<f64> = y.iter().map(|z| z.im).collect();
            let mut cnt = MultCounter::default();
            // Unconstrained complex minimum splits into two axis minima.
            let free_re = brute_axis(&ctx, &re, None);
            let free_im = brute_axis(&ctx, &im, None);
            for n in 0..2 {
                for j in 0..c.bits_per_symbol() {
                    for b in 0..2u8 {
                        let req = BitMetricRequest::new(&c, y.clone(), n, j, b).unwrap();
                        let full = ctx.bit_metric_exhaustive(&req, &mut cnt).unwrap();
                        let axis = ctx.bit_metric_exhaustive_axis(&req, &mut cnt).unwrap();
                        let (ax, ja) = c.axis_of(j);
                        let (own, free) = if ax == Axis::Real { (&re, free_im) } else { (&im, free_re) };
                        assert!((full - free - axis).abs() < 1e-9);
                        assert!((axis - brute_axis(&ctx, own, Some((n, ja, b)))).abs() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn sd_agrees_with_exhaustive_per_request() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (d, m, trials) in [(2, 4, 200), (2, 64, 200), (4, 16, 50), (3, 16, 50), (6, 4, 10)] {
        for _ in 0..trials {
            let ctx = context(d, m, &mut rng);
            let c = ctx.constellation().clone();
            let labels = random_symbols(&c, d, &mut rng);
            let y = noisy_obs(&ctx, &labels, 0.5, &mut rng);
            let n = rng.random_range(0..d);
            let j = rng.random_range(0..c.bits_per_symbol());
            let b = rng.random_range(0..2u8);
            let req = BitMetricRequest::new(&c, y, n, j, b).unwrap();
            let mut sd = MultCounter::default();
            let mut ex = MultCounter::default();
            let g_sd = ctx.bit_metric_sd(&req, &mut sd).unwrap();
            let g_ex = if ctx.r_is_real() {
                ctx.bit_metric_exhaustive_axis(&req, &mut ex).unwrap()
            } else {
                ctx.bit_metric_exhaustive(&req, &mut ex).unwrap()
            };
            assert!((g_sd - g_ex).abs() <= 1e-9 * (1.0 + g_ex), "D={d} M={m}");
            assert!(sd.leaves_visited <= ex.candidates_enumerated);
        }
    }
}

#[test]
fn group_metrics_methods_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    for (d, m) in [(2, 16), (3, 4), (4, 4)] {
        let q = Constellation::qam(m).unwrap().bits_per_symbol();
        for _ in 0..30 {
            let ctx = context(d, m, &mut rng);
            let labels = random_symbols(ctx.constellation(), d, &mut rng);
            let y = noisy_obs(&ctx, &labels, 0.6, &mut rng);
            let mut a = vec![[0.0; 2]; d * q];
            let mut b = vec![[0.0; 2]; d * q];
            let mut full = vec![[0.0; 2]; d * q];
            let mut cnt = MultCounter::default();
            ctx.group_metrics(&y, SearchMethod::SphereDecoder, &mut cnt, &mut a).unwrap();
            assert_eq!(cnt.metrics_computed, (2 * d * q) as u64);
            ctx.group_metrics(&y, SearchMethod::Exhaustive, &mut cnt, &mut b).unwrap();
            ctx.group_metrics(&y, SearchMethod::ExhaustiveComplex, &mut cnt, &mut full).unwrap();
            for k in 0..d * q {
                for t in 0..2 {
                    assert!((a[k][t] - b[k][t]).abs() < 1e-9 * (1.0 + b[k][t]));
                }
                let llr_axis = b[k][0] - b[k][1];
                let llr_full = full[k][0] - full[k][1];
                assert!((llr_axis - llr_full).abs() < 1e-9 * (1.0 + llr_full.abs()));
            }
        }
    }
}

#[test]
fn counters_are_deterministic() {
    let run = || {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let ctx = context(4, 16, &mut rng);
        let mut cnt = MultCounter::default();
        let mut out = vec![[0.0; 2]; 16];
        for _ in 0..20 {
            let labels = random_symbols(ctx.constellation(), 4, &mut rng);
            let y = noisy_obs(&ctx, &labels, 0.3, &mut rng);
            ctx.group_metrics(&y, SearchMethod::SphereDecoder, &mut cnt, &mut out).unwrap();
        }
        cnt
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.real_multiplications > 0);
    let mut twice = a;
    twice.merge(&a);
    assert_eq!(twice.real_multiplications, 2 * a.real_multiplications);
}

#[test]
fn fp_metrics_sd_matches_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for (d, m) in [(2, 16), (4, 4)] {
        let p = make_params(d).unwrap();
        let c = Constellation::qam(m).unwrap();
        let q = c.bits_per_symbol();
        for _ in 0..20 {
            let ch = sample_channel(p.dim, &mut rng).unwrap();
            let fp = prepare_fp(&ch.lambda, &p.generator, &c).unwrap();
            let x: Vec<Complex64> = random_symbols(&c, d, &mut rng).iter().map(|&l| c.point(l)).collect();
            let w = p.generator.mul_vec(&x).unwrap();
            let r: Vec<Complex64> =
                w.iter().zip(&ch.lambda).map(|(a, l)| a * l + complex_gaussian(&mut rng, 0.2)).collect();
            let y = fp.rotate(&r).unwrap();
            let mut a = vec![[0.0; 2]; d * q];
            let mut b = vec![[0.0; 2]; d * q];
            let mut cnt = MultCounter::default();
            fp.metrics(&y, SearchMethod::SphereDecoder, &mut cnt, &mut a).unwrap();
            fp.metrics(&y, SearchMethod::Exhaustive, &mut cnt, &mut b).unwrap();
            for k in 0..d * q {
                for t in 0..2 {
                    assert!((a[k][t] - b[k][t]).abs() < 1e-9 * (1.0 + b[k][t]));
                }
            }
        }
    }
}
