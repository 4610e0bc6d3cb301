//! Quasi-static Rayleigh channel reduced by SVD beamforming to the diagonal
//! model `Y = ΛZ + N`.
//!
//! The transmit filter `V` and receive filter `U^H` cancel exactly, so only
//! the singular values are carried into the link.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{svd, ComplexMatrix, SvdResult};
use crate::pstbc::{Dimension, PstbcCodeword};
use crate::{Error, Result};

/// One channel draw, fixed for a whole frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `N_r × N_t` matrix with i.i.d. CN(0, 1) entries.
    pub h: ComplexMatrix,
    pub svd: SvdResult,
    /// `λ_1 ≥ … ≥ λ_D`.
    pub lambda: Vec<f64>,
}

impl ChannelRealization {
    pub fn from_matrix(h: ComplexMatrix) -> Result<Self> {
        Dimension::new(h.rows())?;
        let svd = svd(&h)?;
        let lambda = svd.singular_values.clone();
        Ok(ChannelRealization { h, svd, lambda })
    }

    pub fn lambda_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&self.lambda)
    }
}

/// Noise level for a target SNR: `N_0 = D / SNR` per complex entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Linear SNR.
    pub snr: f64,
    pub n0: f64,
}

impl NoiseConfig {
    pub fn from_linear(dim: Dimension, snr: f64) -> Result<Self> {
        if snr.is_nan() || snr <= 0.0 {
            return Err(Error::invalid("SNR must be positive"));
        }
        Ok(NoiseConfig { snr, n0: dim.get() as f64 / snr })
    }

    pub fn from_db(dim: Dimension, snr_db: f64) -> Result<Self> {
        Self::from_linear(dim, 10f64.powf(snr_db / 10.0))
    }

    /// Infinite SNR: `transmit` adds nothing.
    pub fn noiseless() -> Self {
        NoiseConfig { snr: f64::INFINITY, n0: 0.0 }
    }

    #[inline]
    pub fn is_noiseless(&self) -> bool {
        self.n0 == 0.0
    }
}

/// Circularly symmetric complex Gaussian sample with variance `var`.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

pub fn sample_channel<R: Rng + ?Sized>(dim: Dimension, rng: &mut R) -> Result<ChannelRealization> {
    let d = dim.get();
    let h = ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng, 1.0));
    ChannelRealization::from_matrix(h)
}

/// `Y = ΛZ + N`, `N` i.i.d. CN(0, N_0).
pub fn transmit<R: Rng + ?Sized>(
    lambda: &[f64],
    z: &PstbcCodeword,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let d = z.dim.get();
    if lambda.len() != d {
        return Err(Error::invalid("transmit: Λ and codeword dimensions differ"));
    }
    let mut y = ComplexMatrix::from_fn(d, d, |i, j| z.z[(i, j)] * lambda[i]);
    if !noise.is_noiseless() {
        for i in 0..d {
            for j in 0..d {
                y[(i, j)] += complex_gaussian(rng, noise.n0);
            }
        }
    }
    Ok(y)
}

/// `r = Λ w + n` for one channel use of a vector `w` (used by the fully
/// precoded baseline).
pub fn transmit_vector<R: Rng + ?Sized>(
    lambda: &[f64],
    w: &[Complex64],
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if lambda.len() != w.len() {
        return Err(Error::invalid("transmit_vector: length mismatch"));
    }
    Ok(lambda
        .iter()
        .zip(w)
        .map(|(l, x)| {
            let clean = x * *l;
            if noise.is_noiseless() {
                clean
            } else {
                clean + complex_gaussian(rng, noise.n0)
            }
        })
        .collect())
}
