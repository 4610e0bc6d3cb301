//! Generator matrices of the perfect codes.
//!
//! Each code lives in a cyclic extension `Q(ω, θ)/Q(ω)` with `ω = i`
//! (D = 2, 4) or `ω = e^{2πi/3}` (D = 3, 6) and `θ` generating a totally
//! real cyclic field of degree D. Row `k` of `G` is the `k`-th Galois
//! conjugate of `α·[ν_1(θ), …, ν_D(θ)]`, scaled by `1/√c`:
//!
//! ```text
//! G[k][l] = σ^k(α) · ν_l(θ_k) / √c
//! ```
//!
//! where `(α)` is the ideal and `ν_l` an integral basis of `Z[θ]` that is
//! orthonormal (up to `c`) for the trace form `Tr(α ᾱ x y)`. Rows follow
//! the cyclic order of the Galois generator, which is what makes `E` the
//! right shift for the codeword construction.
//!
//! Provenance:
//! - D = 2: the Golden Code, `θ = (1+√5)/2`, `α = 1 + i(1-θ)`, basis
//!   `{1, θ}`, `c = 5`.
//! - D = 4: `θ = 2cos(2π/15)`, `α = (1-3i) + iθ²`, basis
//!   `{1, θ, θ³-3θ, θ³+θ²-3θ-1}`, `c = 15`.
//! - D = 3: `θ = 2cos(2π/7)`, `α = (1+ω) + θ`, basis
//!   `{1, 2-θ-θ², 2-θ²}`, `c = 7`.
//! - D = 6: `θ = 2cos(2π/13)`, `α = 1 + (2-ω)θ + (1+ω)θ² + ωθ³`, basis
//!   found by lattice reduction of the trace form, `c = 26`.
//!
//! D = 3 and 6 were rebuilt from the construction above (ideal, cubic trace
//! lattice, cyclic row order) rather than copied digit by digit; the
//! unitarity and nonzero-first-row checks in the tests gate them.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

enum Conjugates {
    /// Roots of x² - x - 1.
    Golden,
    /// `2cos(2π m / conductor)` for `m` in Galois-cyclic order.
    Cosine { conductor: u32, orbit: &'static [u32] },
}

#[derive(Clone, Copy)]
enum BaseUnit {
    /// Gaussian integers, `ω = i`.
    I,
    /// Eisenstein integers, `ω = e^{2πi/3}`.
    J,
}

struct CodeData {
    conjugates: Conjugates,
    unit: BaseUnit,
    /// `α = Σ_p (a_p + b_p ω) θ^p`
    alpha: &'static [(i32, i32)],
    /// `ν_l(θ) = Σ_p basis[l][p] θ^p`
    basis: &'static [&'static [i32]],
    norm: f64,
}

const GOLDEN: CodeData = CodeData {
    conjugates: Conjugates::Golden,
    unit: BaseUnit::I,
    alpha: &[(1, 1), (0, -1)],
    basis: &[&[1, 0], &[0, 1]],
    norm: 5.0,
};

const PERFECT_3: CodeData = CodeData {
    conjugates: Conjugates::Cosine { conductor: 7, orbit: &[1, 2, 3] },
    unit: BaseUnit::J,
    alpha: &[(1, 1), (1, 0)],
    basis: &[&[1, 0, 0], &[2, -1, -1], &[2, 0, -1]],
    norm: 7.0,
};

const PERFECT_4: CodeData = CodeData {
    conjugates: Conjugates::Cosine { conductor: 15, orbit: &[1, 2, 4, 7] },
    unit: BaseUnit::I,
    alpha: &[(1, -3), (0, 0), (0, 1)],
    basis: &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, -3, 0, 1], &[-1, -3, 1, 1]],
    norm: 15.0,
};

const PERFECT_6: CodeData = CodeData {
    conjugates: Conjugates::Cosine { conductor: 13, orbit: &[1, 2, 4, 5, 3, 6] },
    unit: BaseUnit::J,
    alpha: &[(1, 0), (2, -1), (1, 1), (0, 1)],
    basis: &[
        &[1, 2, 0, -4, 0, 1],
        &[1, 4, -4, -1, 1, 0],
        &[0, 1, 4, -4, -1, 1],
        &[-2, 5, 1, -5, 0, 1],
        &[-3, 7, 5, -9, -1, 2],
        &[0, 7, 1, -9, 0, 2],
    ],
    norm: 26.0,
};

impl CodeData {
    fn thetas(&self) -> Vec<f64> {
        match self.conjugates {
            Conjugates::Golden => {
                let s5 = 5f64.sqrt();
                alloc::vec![(1.0 + s5) / 2.0, (1.0 - s5) / 2.0]
            }
            Conjugates::Cosine { conductor, orbit } => {
                orbit.iter().map(|&m| 2.0 * (2.0 * PI * m as f64 / conductor as f64).cos()).collect()
            }
        }
    }

    fn omega(&self) -> Complex64 {
        match self.unit {
            BaseUnit::I => Complex64::new(0.0, 1.0),
            BaseUnit::J => Complex64::from_polar(1.0, 2.0 * PI / 3.0),
        }
    }

    fn generator(&self) -> ComplexMatrix {
        let thetas = self.thetas();
        let omega = self.omega();
        let d = thetas.len();
        let scale = 1.0 / self.norm.sqrt();
        ComplexMatrix::from_fn(d, d, |k, l| {
            let t = thetas[k];
            let alpha: Complex64 = self
                .alpha
                .iter()
                .enumerate()
                .map(|(p, &(a, b))| (Complex64::new(a as f64, 0.0) + omega * b as f64) * t.powi(p as i32))
                .sum();
            let nu: f64 = self.basis[l].iter().enumerate().map(|(p, &c)| c as f64 * t.powi(p as i32)).sum();
            alpha * nu * scale
        })
    }
}

/// Unitary generator `G` for dimension `d ∈ {2, 3, 4, 6}`.
pub(crate) fn generator(d: usize) -> Option<ComplexMatrix> {
    let data = match d {
        2 => &GOLDEN,
        3 => &PERFECT_3,
        4 => &PERFECT_4,
        6 => &PERFECT_6,
        _ => return None,
    };
    Some(data.generator())
}
