//! Dense complex matrices for the handful of tiny square systems the link
//! needs (D ∈ {2, 3, 4, 6}), with an SVD and a QR that both follow fixed
//! phase conventions so repeated runs give bit-identical factors.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting empty shapes and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be at least 1x1"));
        }
        if data.len() != rows * cols {
            return Err(Error::invalid("entry count does not match dimensions"));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { ZERO })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { ZERO })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Matrix product `self * rhs`.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::invalid("matmul: inner dimensions differ"));
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |i, j| (0..self.cols).map(|l| self[(i, l)] * rhs[(l, j)]).sum()))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::invalid("mul_vec: length mismatch"));
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Complex64) -> ComplexMatrix {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &ComplexMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<ComplexMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::invalid("elementwise op: shape mismatch"));
        }
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| f(*a, *b)).collect(),
        })
    }

    /// Sum of squared moduli of all entries.
    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest entry-wise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A^H A - I|` entry-wise; zero for an exactly unitary matrix.
    pub fn unitarity_error(&self) -> f64 {
        let gram = self.adjoint().matmul(self).expect("square by construction");
        gram.sub(&ComplexMatrix::identity(self.cols)).expect("same shape").max_abs()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `A = U diag(σ) V^H` with σ non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    pub fn recompose(&self) -> ComplexMatrix {
        let sigma = ComplexMatrix::from_real_diag(&self.singular_values);
        self.u.matmul(&sigma).and_then(|us| us.matmul(&self.v.adjoint())).expect("factor shapes agree")
    }
}

/// `A = Q R`, `R` upper triangular with a real nonnegative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct QrResult {
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
}

const JACOBI_MAX_SWEEPS: usize = 80;

fn check_square_finite(a: &ComplexMatrix, op: &str) -> Result<()> {
    if !a.is_square() {
        return Err(Error::InvalidInput(alloc::format!("{op}: matrix must be square")));
    }
    if !a.is_finite() {
        return Err(Error::InvalidInput(alloc::format!("{op}: non-finite entries")));
    }
    Ok(())
}

/// Singular value decomposition by one-sided (Hestenes) Jacobi rotations.
///
/// Singular values come out non-increasing. The phase of each right
/// singular vector is fixed by making its first nonzero entry real and
/// nonnegative; the matching left vector takes the same phase.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    check_square_finite(a, "svd")?;
    let n = a.cols();
    // Work column-major: w[j] is column j of A·V.
    let mut w: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<Complex64>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { ONE } else { ZERO }).collect()).collect();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = w[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = w[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = w[p].iter().zip(&w[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Rotate column q so that <w_p, w_q> becomes real, then apply
                // a real Jacobi rotation.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for cols in [&mut w, &mut v] {
                    for i in 0..n {
                        let xp = cols[p][i];
                        let xq = cols[q][i] * phase;
                        cols[p][i] = xp * c - xq * s;
                        cols[q][i] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = w.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]).then(i.cmp(&j)));
    let scale = sigma.iter().cloned().fold(0.0, f64::max);
    let tiny = scale * 1e-14;

    let mut u_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut v_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut sorted = Vec::with_capacity(n);
    for &k in &order {
        let s = sigma[k];
        let u = if s > tiny { w[k].iter().map(|z| z / s).collect() } else { complete_orthonormal(&u_cols, n) };
        u_cols.push(u);
        v_cols.push(core::mem::take(&mut v[k]));
        sorted.push(if s > tiny { s } else { 0.0 });
    }
    sigma = sorted;

    for (u, v) in u_cols.iter_mut().zip(v_cols.iter_mut()) {
        if let Some(first) = v.iter().find(|z| z.norm() > 1e-300) {
            let ph = (first.conj()) / first.norm();
            v.iter_mut().for_each(|z| *z *= ph);
            u.iter_mut().for_each(|z| *z *= ph);
        }
    }

    let u = ComplexMatrix::from_fn(n, n, |i, j| u_cols[j][i]);
    let v = ComplexMatrix::from_fn(n, n, |i, j| v_cols[j][i]);
    Ok(SvdResult { u, singular_values: sigma, v })
}

/// A unit vector orthogonal to every column in `basis` (Gram–Schmidt over
/// the canonical basis).
fn complete_orthonormal(basis: &[Vec<Complex64>], n: usize) -> Vec<Complex64> {
    let mut best: Option<(f64, Vec<Complex64>)> = None;
    for e in 0..n {
        let mut x: Vec<Complex64> = (0..n).map(|i| if i == e { ONE } else { ZERO }).collect();
        for _ in 0..2 {
            for b in basis {
                let proj: Complex64 = b.iter().zip(&x).map(|(bi, xi)| bi.conj() * xi).sum();
                x.iter_mut().zip(b).for_each(|(xi, bi)| *xi -= proj * bi);
            }
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|(b, _)| nrm > *b) {
            best = Some((nrm, x));
        }
    }
    let (nrm, x) = best.expect("n >= 1");
    x.into_iter().map(|z| z / nrm).collect()
}

/// QR by modified Gram–Schmidt with one reorthogonalization pass.
///
/// `R` has a real nonnegative diagonal: every column phase lives in `Q`.
/// A column whose residual norm falls to `1e-12·max(1, ‖A‖)` is treated as
/// rank deficiency.
pub fn qr(a: &ComplexMatrix) -> Result<QrResult> {
    check_square_finite(a, "qr")?;
    let n = a.cols();
    let tol = 1e-12 * a.frobenius_norm().max(1.0);
    let mut q_cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    let mut r = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut x = a.column(j);
        for _pass in 0..2 {
            for (i, qi) in q_cols.iter().enumerate() {
                let proj: Complex64 = qi.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                r[(i, j)] += proj;
                x.iter_mut().zip(qi).for_each(|(xk, qk)| *xk -= proj * qk);
            }
        }
        let nrm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm <= tol {
            return Err(Error::DegenerateFactorization(alloc::format!(
                "qr: column {j} is linearly dependent (residual {nrm:e})"
            )));
        }
        r[(j, j)] = Complex64::new(nrm, 0.0);
        q_cols.push(x.into_iter().map(|z| z / nrm).collect());
    }
    let q = ComplexMatrix::from_fn(n, n, |i, j| q_cols[j][i]);
    Ok(QrResult { q, r })
}
