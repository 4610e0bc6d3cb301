//! Perfect space-time block codewords and their group decomposition.
//!
//! A block of `D²` symbols `X = [x_1, …, x_D]` becomes
//! `Z = Σ_v diag(G x_v) E^{v-1}`. Every entry of `ΛZ` depends on exactly
//! one column `x_v`, so the received codeword splits into `D` independent
//! `D`-dimensional problems `y̆_v = Φ_v Λ G x_v + n̆_v`.
//!
//! All indices in this module are zero-based: group `v` and row `u` run over
//! `0..D`.

mod generators;

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// System dimension: `N_t = N_r = S = D`. Perfect codes exist for
/// `D ∈ {2, 3, 4, 6}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(usize);

impl Dimension {
    pub const SUPPORTED: [usize; 4] = [2, 3, 4, 6];

    pub fn new(d: usize) -> Result<Self> {
        if Self::SUPPORTED.contains(&d) {
            Ok(Dimension(d))
        } else {
            Err(Error::InvalidInput(alloc::format!("unsupported dimension {d}; expected 2, 3, 4 or 6")))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// Whether `R` from the QR of `ΛG` is real, which allows the
    /// real/imaginary split of the bit metrics.
    pub fn has_real_triangular_factor(self) -> bool {
        matches!(self.0, 2 | 4)
    }
}

impl TryFrom<usize> for Dimension {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Dimension::new(d)
    }
}

/// Code constants for one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PstbcParams {
    pub dim: Dimension,
    /// Unit-modulus non-norm element closing the cyclic shift.
    pub g: Complex64,
    pub generator: ComplexMatrix,
    /// Ones on the first superdiagonal and `g` in the bottom-left corner.
    pub shift: ComplexMatrix,
}

impl PstbcParams {
    #[inline]
    pub fn size(&self) -> usize {
        self.dim.get()
    }

    /// Row `u` of `G`.
    pub fn generator_row(&self, u: usize) -> &[Complex64] {
        self.generator.row(u)
    }
}

/// `D` columns of `D` constellation symbols each; `columns[v][n]` is entry
/// `n` of `x_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub dim: Dimension,
    pub columns: Vec<Vec<Complex64>>,
}

impl SymbolBlock {
    pub fn new(dim: Dimension, columns: Vec<Vec<Complex64>>) -> Result<Self> {
        let d = dim.get();
        if columns.len() != d || columns.iter().any(|c| c.len() != d) {
            return Err(Error::invalid("symbol block must hold D columns of D symbols"));
        }
        Ok(SymbolBlock { dim, columns })
    }

    pub fn zeros(dim: Dimension) -> Self {
        let d = dim.get();
        SymbolBlock { dim, columns: alloc::vec![alloc::vec![Complex64::new(0.0, 0.0); d]; d] }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PstbcCodeword {
    pub dim: Dimension,
    pub z: ComplexMatrix,
}

/// Diagonal phase matrix `Φ_v` of group `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    pub dim: Dimension,
    pub group: usize,
    pub phi: ComplexMatrix,
}

impl PhaseMatrix {
    /// Diagonal entries `φ_{v,u}`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        self.phi.diagonal()
    }
}

fn g_for(dim: Dimension) -> Complex64 {
    match dim.get() {
        2 | 4 => Complex64::new(0.0, 1.0),
        3 => Complex64::from_polar(1.0, 2.0 * PI / 3.0),
        _ => -Complex64::from_polar(1.0, 2.0 * PI / 3.0),
    }
}

pub fn make_params(dim: usize) -> Result<PstbcParams> {
    let dim = Dimension::new(dim)?;
    let d = dim.get();
    let g = g_for(dim);
    let generator = generators::generator(d).expect("supported dimension");
    let shift = ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            Complex64::new(1.0, 0.0)
        } else if i == d - 1 && j == 0 {
            g
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    Ok(PstbcParams { dim, g, generator, shift })
}

/// Builds `Z = Σ_v diag(G x_v) E^{v-1}`.
///
/// `E^{p}` moves row `u` to column `(u + p) mod D`, picking up a factor `g`
/// when it wraps, so entry `(u, (u+v) mod D)` of `Z` is
/// `(G x_v)_u · (g if u + v ≥ D else 1)`.
pub fn encode(params: &PstbcParams, x: &SymbolBlock) -> Result<PstbcCodeword> {
    if x.dim != params.dim {
        return Err(Error::invalid("symbol block dimension differs from code dimension"));
    }
    let d = params.size();
    let mut z = ComplexMatrix::zeros(d, d);
    for (v, col) in x.columns.iter().enumerate() {
        let gx = params.generator.mul_vec(col)?;
        for (u, val) in gx.into_iter().enumerate() {
            let wraps = u + v >= d;
            z[(u, (u + v) % d)] = if wraps { val * params.g } else { val };
        }
    }
    Ok(PstbcCodeword { dim: params.dim, z })
}

/// Matrix positions `(u, (u+v) mod D)`, `u = 0..D`, holding group `v`.
pub fn group_positions(dim: Dimension, v: usize) -> Result<Vec<(usize, usize)>> {
    let d = dim.get();
    if v >= d {
        return Err(Error::InvalidInput(alloc::format!("group index {v} out of range for D={d}")));
    }
    Ok((0..d).map(|u| (u, (u + v) % d)).collect())
}

/// `Φ_v = diag(φ_{v,u})` with `φ_{v,u} = g` when `u + v ≥ D`, else 1.
pub fn phase_matrix(params: &PstbcParams, v: usize) -> Result<PhaseMatrix> {
    let d = params.size();
    if v >= d {
        return Err(Error::InvalidInput(alloc::format!("group index {v} out of range for D={d}")));
    }
    let diag: Vec<Complex64> = (0..d).map(|u| if u + v >= d { params.g } else { Complex64::new(1.0, 0.0) }).collect();
    Ok(PhaseMatrix { dim: params.dim, group: v, phi: ComplexMatrix::from_diag(&diag) })
}

/// Reads the entries of `y` at the positions of group `v`, row order.
pub fn extract_group(y: &ComplexMatrix, v: usize) -> Result<Vec<Complex64>> {
    let dim = Dimension::new(y.rows())?;
    if !y.is_square() {
        return Err(Error::invalid("received codeword must be square"));
    }
    Ok(group_positions(dim, v)?.into_iter().map(|p| y[p]).collect())
}
