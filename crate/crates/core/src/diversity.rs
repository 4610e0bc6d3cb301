//! Per-subchannel weights of a pairwise error event.
//!
//! For symbol blocks `X ≠ X̂`, subchannel `u` sees the distance
//! `ρ_u = Σ_v |g_u^T (x_v − x̂_v)|²`, where `g_u^T` is row `u` of the
//! generator. Full diversity needs `ρ_0 > 0` for every error pair.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::pstbc::{PstbcParams, SymbolBlock};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityProbe {
    pub x: SymbolBlock,
    pub x_hat: SymbolBlock,
    /// `rho[u]`, subchannel `u` (strongest first).
    pub rho: Vec<f64>,
}

pub fn diversity_probe(params: &PstbcParams, x: &SymbolBlock, x_hat: &SymbolBlock) -> Result<DiversityProbe> {
    if x.dim != params.dim || x_hat.dim != params.dim {
        return Err(Error::invalid("symbol block dimension differs from code dimension"));
    }
    if x == x_hat {
        return Err(Error::invalid("error pair needs X ≠ X̂"));
    }
    let d = params.size();
    let mut rho = alloc::vec![0.0; d];
    for (col, col_hat) in x.columns.iter().zip(&x_hat.columns) {
        let diff: Vec<Complex64> = col.iter().zip(col_hat).map(|(a, b)| a - b).collect();
        let gd = params.generator.mul_vec(&diff)?;
        for (r, z) in rho.iter_mut().zip(gd) {
            *r += z.norm_sqr();
        }
    }
    if rho[0].is_nan() || rho[0] <= 0.0 {
        return Err(Error::InternalConsistency(alloc::format!("ρ_0 vanished for a nonzero error pair: {rho:?}")));
    }
    Ok(DiversityProbe { x: x.clone(), x_hat: x_hat.clone(), rho })
}
