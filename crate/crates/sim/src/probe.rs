//! Enumerates single-symbol error pairs and records the smallest `ρ_u`.

use bicmb_core::bicm::Constellation;
use bicmb_core::diversity::diversity_probe;
use bicmb_core::pstbc::{make_params, SymbolBlock};
use serde::Serialize;

use crate::error::SimResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub dim: usize,
    pub m: usize,
    pub pairs: u64,
    /// Smallest `ρ_u` over all pairs, per subchannel.
    pub min_rho: Vec<f64>,
}

/// Every `(X, X̂)` that differ in one entry; the other entries are fixed
/// since they cancel in `X − X̂`.
pub fn probe_single_symbol_errors(dim: usize, m: usize) -> SimResult<ProbeSummary> {
    let params = make_params(dim)?;
    let c = Constellation::qam(m)?;
    let d = params.size();
    let block = |pos: usize, label: u32| {
        let cols =
            (0..d).map(|v| (0..d).map(|n| c.point(if v * d + n == pos { label } else { 0 })).collect()).collect();
        SymbolBlock::new(params.dim, cols)
    };
    let mut min_rho = vec![f64::INFINITY; d];
    let mut pairs = 0;
    for pos in 0..d * d {
        for a in 0..m as u32 {
            for b in 0..m as u32 {
                if a == b {
                    continue;
                }
                let p = diversity_probe(&params, &block(pos, a)?, &block(pos, b)?)?;
                for (lo, r) in min_rho.iter_mut().zip(&p.rho) {
                    *lo = lo.min(*r);
                }
                pairs += 1;
            }
        }
    }
    Ok(ProbeSummary { dim, m, pairs, min_rho })
}
