//! Receiver front end: group extraction, rotation by `Q^H Φ_v^H` and bit
//! metrics `Γ = min_{x ∈ ξ} ‖ỹ − R x‖²`.
//!
//! For `D ∈ {2, 4}` the triangular factor `R` is real, so the real and
//! imaginary parts of `ỹ` decouple and each bit metric becomes a search
//! over one `√M`-PAM axis. Such axis metrics omit the (bit independent)
//! minimum over the other axis; the difference `Γ_0 − Γ_1` is unchanged.

mod search;

use alloc::vec::Vec;
use core::ops::AddAssign;

use num_complex::Complex64;

use crate::bicm::{Axis, Constellation};
use crate::linalg::{qr, ComplexMatrix};
use crate::pstbc::{extract_group, group_positions, phase_matrix, Dimension, PhaseMatrix, PstbcParams};
use crate::{Error, Result};

use search::{ComplexLayer, Triangular, MAX_D};

/// Relative tolerance on `max |Im R_ij| / ‖R‖` for the real-factor path.
pub const REALNESS_TOLERANCE: f64 = 1e-9;

/// Work counters of the metric searches. Preparation work is reported
/// separately by the contexts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MultCounter {
    pub real_multiplications: u64,
    /// Bit metrics `Γ(c = b)` produced; a bit yields two.
    pub metrics_computed: u64,
    /// Complete candidate points reached by the sphere decoder.
    pub leaves_visited: u64,
    /// Candidate points scored by exhaustive search.
    pub candidates_enumerated: u64,
}

impl MultCounter {
    pub fn merge(&mut self, other: &MultCounter) {
        *self += *other;
    }

    /// Real multiplications per bit metric, 0 if none was computed.
    pub fn mults_per_metric(&self) -> f64 {
        if self.metrics_computed == 0 {
            0.0
        } else {
            self.real_multiplications as f64 / self.metrics_computed as f64
        }
    }
}

impl AddAssign for MultCounter {
    fn add_assign(&mut self, o: MultCounter) {
        self.real_multiplications += o.real_multiplications;
        self.metrics_computed += o.metrics_computed;
        self.leaves_visited += o.leaves_visited;
        self.candidates_enumerated += o.candidates_enumerated;
    }
}

/// One bit metric query on a rotated group observation.
#[derive(Debug, Clone, PartialEq)]
pub struct BitMetricRequest {
    pub observation: Vec<Complex64>,
    /// Entry `n` of `x_v` carrying the bit.
    pub entry: usize,
    /// Label bit index `j`.
    pub bit: usize,
    pub value: u8,
    pub axis: Axis,
}

impl BitMetricRequest {
    /// Fills in the axis from the label layout.
    pub fn new(
        constellation: &Constellation,
        observation: Vec<Complex64>,
        entry: usize,
        bit: usize,
        value: u8,
    ) -> Result<Self> {
        if bit >= constellation.bits_per_symbol() || value > 1 {
            return Err(Error::invalid("bit index or value out of range"));
        }
        let axis = constellation.axis_of(bit).0;
        Ok(BitMetricRequest { observation, entry, bit, value, axis })
    }
}

/// How [`DetectorContext::group_metrics`] scores the candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMethod {
    /// Per-metric exhaustive search; over one axis when `R` is real.
    Exhaustive,
    /// Per-metric exhaustive search over the complex set `ξ`, `M^D/2` points.
    ExhaustiveComplex,
    /// Sphere decoding with the unconstrained search shared by all bits of
    /// a group (and axis).
    SphereDecoder,
}

/// Per-axis PAM sets: `subsets[ja][b]`.
#[derive(Debug, Clone)]
struct AxisSets {
    levels: Vec<f64>,
    full: Vec<usize>,
    subsets: Vec<[Vec<usize>; 2]>,
}

impl AxisSets {
    fn new(constellation: &Constellation) -> Self {
        let pam = constellation.pam();
        AxisSets {
            levels: pam.levels.clone(),
            full: (0..pam.len()).collect(),
            subsets: (0..pam.bits).map(|ja| [pam.subset(ja, 0), pam.subset(ja, 1)]).collect(),
        }
    }
}

/// Per-channel receiver state. Immutable once built.
#[derive(Debug, Clone)]
pub struct DetectorContext {
    dim: Dimension,
    q: ComplexMatrix,
    r: ComplexMatrix,
    r_is_real: bool,
    phases: Vec<PhaseMatrix>,
    groups: Vec<Vec<(usize, usize)>>,
    constellation: Constellation,
    /// `Q^H Φ_v^H` per group.
    rotators: Vec<ComplexMatrix>,
    complex_sys: Triangular<Complex64>,
    real_sys: Option<Triangular<f64>>,
    sets: AxisSets,
}

fn check_lambda(lambda: &[f64], d: usize) -> Result<()> {
    if lambda.len() != d {
        return Err(Error::invalid("Λ length differs from the code dimension"));
    }
    if lambda.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::invalid("Λ entries must be positive and finite"));
    }
    if lambda.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid("Λ entries must be non-increasing"));
    }
    Ok(())
}

fn triangular_parts(r: &ComplexMatrix) -> (Vec<f64>, Triangular<Complex64>) {
    let d = r.rows();
    let diag: Vec<f64> = r.diagonal().iter().map(|z| z.re).collect();
    (diag.clone(), Triangular::new(d, r.as_slice().to_vec(), &diag))
}

/// Real multiplications to form `ΛG`, its QR and the `D` rotators.
pub fn preparation_mults(dim: Dimension) -> u64 {
    let d = dim.get() as u64;
    2 * d * d + 8 * d * d * (d - 1) + 4 * d * d + d * 4 * d * d
}

/// Real multiplications to rotate one group observation.
pub fn rotation_mults(dim: Dimension) -> u64 {
    let d = dim.get() as u64;
    4 * d * d
}

pub fn prepare(lambda: &[f64], params: &PstbcParams, constellation: &Constellation) -> Result<DetectorContext> {
    let dim = params.dim;
    let d = dim.get();
    check_lambda(lambda, d)?;
    let lg = ComplexMatrix::from_real_diag(lambda).matmul(&params.generator)?;
    let f = qr(&lg)?;
    let mut r = f.r;
    let r_is_real = dim.has_real_triangular_factor();
    if r_is_real {
        let worst = r.as_slice().iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if worst > REALNESS_TOLERANCE * r.frobenius_norm() {
            return Err(Error::InternalConsistency(alloc::format!(
                "triangular factor is not real for D={d}: max |Im R| = {worst:e}"
            )));
        }
        for i in 0..d {
            for j in 0..d {
                r[(i, j)].im = 0.0;
            }
        }
    }
    let phases = (0..d).map(|v| phase_matrix(params, v)).collect::<Result<Vec<_>>>()?;
    let groups = (0..d).map(|v| group_positions(dim, v)).collect::<Result<Vec<_>>>()?;
    let qh = f.q.adjoint();
    let rotators = phases.iter().map(|p| qh.matmul(&p.phi.adjoint())).collect::<Result<Vec<_>>>()?;
    let (diag, complex_sys) = triangular_parts(&r);
    let real_sys = r_is_real.then(|| Triangular::new(d, r.as_slice().iter().map(|z| z.re).collect(), &diag));
    Ok(DetectorContext {
        dim,
        q: f.q,
        r,
        r_is_real,
        phases,
        groups,
        constellation: constellation.clone(),
        rotators,
        complex_sys,
        real_sys,
        sets: AxisSets::new(constellation),
    })
}

impl DetectorContext {
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn r_is_real(&self) -> bool {
        self.r_is_real
    }

    pub fn phase(&self, v: usize) -> &PhaseMatrix {
        &self.phases[v]
    }

    pub fn group_positions(&self, v: usize) -> &[(usize, usize)] {
        &self.groups[v]
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// `ỹ_v = Q^H Φ_v^H y̆_v`.
    pub fn rotate_group(&self, y_breve: &[Complex64], v: usize) -> Result<Vec<Complex64>> {
        if v >= self.dim.get() {
            return Err(Error::invalid("group index out of range"));
        }
        if y_breve.len() != self.dim.get() {
            return Err(Error::invalid("group observation has the wrong length"));
        }
        self.rotators[v].mul_vec(y_breve)
    }

    /// Extracts and rotates every group of a received codeword.
    pub fn rotate_codeword(&self, y: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
        if y.rows() != self.dim.get() {
            return Err(Error::invalid("received codeword has the wrong dimension"));
        }
        (0..self.dim.get()).map(|v| self.rotate_group(&extract_group(y, v)?, v)).collect()
    }

    fn check_request(&self, req: &BitMetricRequest) -> Result<(usize, u8)> {
        let d = self.dim.get();
        if req.observation.len() != d || req.entry >= d || req.value > 1 {
            return Err(Error::invalid("malformed bit metric request"));
        }
        if req.bit >= self.constellation.bits_per_symbol() {
            return Err(Error::invalid("bit index out of range"));
        }
        let (axis, ja) = self.constellation.axis_of(req.bit);
        if axis != req.axis {
            return Err(Error::invalid("request axis does not match the label layout"));
        }
        Ok((ja, req.value))
    }

    /// `min over ξ_b^{n,j}` of `‖ỹ − R x‖²` by enumerating all `M^D/2`
    /// complex candidates.
    pub fn bit_metric_exhaustive(&self, req: &BitMetricRequest, counter: &mut MultCounter) -> Result<f64> {
        let (ja, b) = self.check_request(req)?;
        let layers = complex_layers(&self.sets, self.dim.get(), Some((req.entry, req.axis, ja, b)));
        counter.metrics_computed += 1;
        Ok(self.complex_sys.exhaustive(&req.observation, &self.sets.levels, &layers, counter).0)
    }

    /// Exhaustive search over the request's axis only, `(√M)^D/2`
    /// candidates. Needs a real `R`.
    pub fn bit_metric_exhaustive_axis(&self, req: &BitMetricRequest, counter: &mut MultCounter) -> Result<f64> {
        let (ja, b) = self.check_request(req)?;
        let sys = self.real_system()?;
        let y = axis_part(&req.observation, req.axis);
        let layers = real_layers(&self.sets, self.dim.get(), Some((req.entry, ja, b)));
        counter.metrics_computed += 1;
        Ok(sys.exhaustive(&y[..self.dim.get()], &self.sets.levels, &layers, counter).0)
    }

    /// Sphere-decoded bit metric: the axis metric when `R` is real, the
    /// complex one otherwise.
    pub fn bit_metric_sd(&self, req: &BitMetricRequest, counter: &mut MultCounter) -> Result<f64> {
        let (ja, b) = self.check_request(req)?;
        let d = self.dim.get();
        counter.metrics_computed += 1;
        if let Some(sys) = &self.real_sys {
            let y = axis_part(&req.observation, req.axis);
            let layers = real_layers(&self.sets, d, Some((req.entry, ja, b)));
            Ok(sys.sphere_decode(&y[..d], &self.sets.levels, &layers, counter).0)
        } else {
            let layers = complex_layers(&self.sets, d, Some((req.entry, req.axis, ja, b)));
            Ok(self.complex_sys.sphere_decode(&req.observation, &self.sets.levels, &layers, counter).0)
        }
    }

    fn real_system(&self) -> Result<&Triangular<f64>> {
        self.real_sys.as_ref().ok_or_else(|| {
            Error::UnsupportedConfiguration(alloc::format!(
                "axis-separated metrics need a real triangular factor (D={})",
                self.dim.get()
            ))
        })
    }

    /// All `2·D·log2 M` metrics of one rotated group: `out[n·q + j] =
    /// [Γ(b=0), Γ(b=1)]`.
    pub fn group_metrics(
        &self,
        y_tilde: &[Complex64],
        method: SearchMethod,
        counter: &mut MultCounter,
        out: &mut [[f64; 2]],
    ) -> Result<()> {
        let d = self.dim.get();
        let q = self.constellation.bits_per_symbol();
        if y_tilde.len() != d || out.len() != d * q {
            return Err(Error::invalid("group_metrics: wrong observation or output length"));
        }
        match (method, &self.real_sys) {
            (SearchMethod::ExhaustiveComplex, _) | (SearchMethod::Exhaustive, None) => {
                for n in 0..d {
                    for j in 0..q {
                        let (axis, ja) = self.constellation.axis_of(j);
                        for b in 0..2u8 {
                            let layers = complex_layers(&self.sets, d, Some((n, axis, ja, b)));
                            out[n * q + j][b as usize] =
                                self.complex_sys.exhaustive(y_tilde, &self.sets.levels, &layers, counter).0;
                        }
                    }
                }
                counter.metrics_computed += (2 * d * q) as u64;
            }
            (SearchMethod::Exhaustive, Some(sys)) => {
                for axis in [Axis::Real, Axis::Imag] {
                    let y = axis_part(y_tilde, axis);
                    for n in 0..d {
                        for j in 0..q {
                            let (a, ja) = self.constellation.axis_of(j);
                            if a != axis {
                                continue;
                            }
                            for b in 0..2u8 {
                                let layers = real_layers(&self.sets, d, Some((n, ja, b)));
                                out[n * q + j][b as usize] =
                                    sys.exhaustive(&y[..d], &self.sets.levels, &layers, counter).0;
                            }
                        }
                    }
                }
                counter.metrics_computed += (2 * d * q) as u64;
            }
            (SearchMethod::SphereDecoder, Some(sys)) => {
                real_sd_group(sys, &self.sets, &self.constellation, y_tilde, counter, out);
            }
            (SearchMethod::SphereDecoder, None) => {
                complex_sd_group(&self.complex_sys, &self.sets, &self.constellation, y_tilde, counter, out);
            }
        }
        Ok(())
    }
}

fn axis_part(y: &[Complex64], axis: Axis) -> [f64; MAX_D] {
    let mut out = [0.0; MAX_D];
    for (o, z) in out.iter_mut().zip(y) {
        *o = match axis {
            Axis::Real => z.re,
            Axis::Imag => z.im,
        };
    }
    out
}

/// Layer sets with entry `n` restricted to `subsets[ja][b]`.
fn real_layers(sets: &AxisSets, d: usize, constraint: Option<(usize, usize, u8)>) -> Vec<&[usize]> {
    (0..d)
        .map(|l| match constraint {
            Some((n, ja, b)) if n == l => &sets.subsets[ja][b as usize][..],
            _ => &sets.full[..],
        })
        .collect()
}

fn complex_layers(sets: &AxisSets, d: usize, constraint: Option<(usize, Axis, usize, u8)>) -> Vec<ComplexLayer<'_>> {
    (0..d)
        .map(|l| match constraint {
            Some((n, Axis::Real, ja, b)) if n == l => (&sets.subsets[ja][b as usize][..], &sets.full[..]),
            Some((n, Axis::Imag, ja, b)) if n == l => (&sets.full[..], &sets.subsets[ja][b as usize][..]),
            _ => (&sets.full[..], &sets.full[..]),
        })
        .collect()
}

fn real_sd_group(
    sys: &Triangular<f64>,
    sets: &AxisSets,
    constellation: &Constellation,
    y_tilde: &[Complex64],
    counter: &mut MultCounter,
    out: &mut [[f64; 2]],
) {
    let d = sys.d;
    let q = constellation.bits_per_symbol();
    let pam = constellation.pam();
    for axis in [Axis::Real, Axis::Imag] {
        let y = axis_part(y_tilde, axis);
        let y = &y[..d];
        let (best, arg) = sys.sphere_decode(y, &sets.levels, &real_layers(sets, d, None), counter);
        for n in 0..d {
            for j in 0..q {
                let (a, ja) = constellation.axis_of(j);
                if a != axis {
                    continue;
                }
                let ml_bit = pam.label_bit(arg[n], ja);
                let other = 1 - ml_bit;
                let layers = real_layers(sets, d, Some((n, ja, other)));
                let (m, _) = sys.sphere_decode(y, &sets.levels, &layers, counter);
                out[n * q + j][ml_bit as usize] = best;
                out[n * q + j][other as usize] = m;
            }
        }
    }
    counter.metrics_computed += (2 * d * q) as u64;
}

fn complex_sd_group(
    sys: &Triangular<Complex64>,
    sets: &AxisSets,
    constellation: &Constellation,
    y_tilde: &[Complex64],
    counter: &mut MultCounter,
    out: &mut [[f64; 2]],
) {
    let d = sys.d;
    let q = constellation.bits_per_symbol();
    let pam = constellation.pam();
    let (best, arg) = sys.sphere_decode(y_tilde, &sets.levels, &complex_layers(sets, d, None), counter);
    for n in 0..d {
        for j in 0..q {
            let (axis, ja) = constellation.axis_of(j);
            let idx = match axis {
                Axis::Real => arg[n].0,
                Axis::Imag => arg[n].1,
            };
            let ml_bit = pam.label_bit(idx, ja);
            let other = 1 - ml_bit;
            let layers = complex_layers(sets, d, Some((n, axis, ja, other)));
            let (m, _) = sys.sphere_decode(y_tilde, &sets.levels, &layers, counter);
            out[n * q + j][ml_bit as usize] = best;
            out[n * q + j][other as usize] = m;
        }
    }
    counter.metrics_computed += (2 * d * q) as u64;
}

/// Receiver for the fully precoded baseline: `r = Λ θ x + n` per channel
/// use, `ỹ = Q^H r`, complex search regardless of `R`'s realness.
#[derive(Debug, Clone)]
pub struct FpContext {
    dim: Dimension,
    q: ComplexMatrix,
    r: ComplexMatrix,
    qh: ComplexMatrix,
    sys: Triangular<Complex64>,
    constellation: Constellation,
    sets: AxisSets,
}

pub fn prepare_fp(lambda: &[f64], precoder: &ComplexMatrix, constellation: &Constellation) -> Result<FpContext> {
    let dim = Dimension::new(precoder.rows())?;
    check_lambda(lambda, dim.get())?;
    let f = qr(&ComplexMatrix::from_real_diag(lambda).matmul(precoder)?)?;
    let (_, sys) = triangular_parts(&f.r);
    Ok(FpContext {
        dim,
        qh: f.q.adjoint(),
        q: f.q,
        r: f.r,
        sys,
        constellation: constellation.clone(),
        sets: AxisSets::new(constellation),
    })
}

/// `ΛG`, its QR and `Q^H`.
pub fn fp_preparation_mults(dim: Dimension) -> u64 {
    let d = dim.get() as u64;
    2 * d * d + 8 * d * d * (d - 1) + 4 * d * d
}

impl FpContext {
    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn q(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn r(&self) -> &ComplexMatrix {
        &self.r
    }

    pub fn rotate(&self, r: &[Complex64]) -> Result<Vec<Complex64>> {
        self.qh.mul_vec(r)
    }

    /// Same layout as [`DetectorContext::group_metrics`] for one channel use.
    pub fn metrics(
        &self,
        y_tilde: &[Complex64],
        method: SearchMethod,
        counter: &mut MultCounter,
        out: &mut [[f64; 2]],
    ) -> Result<()> {
        let d = self.dim.get();
        let q = self.constellation.bits_per_symbol();
        if y_tilde.len() != d || out.len() != d * q {
            return Err(Error::invalid("fp metrics: wrong observation or output length"));
        }
        match method {
            SearchMethod::SphereDecoder => {
                complex_sd_group(&self.sys, &self.sets, &self.constellation, y_tilde, counter, out);
            }
            SearchMethod::Exhaustive | SearchMethod::ExhaustiveComplex => {
                for n in 0..d {
                    for j in 0..q {
                        let (axis, ja) = self.constellation.axis_of(j);
                        for b in 0..2u8 {
                            let layers = complex_layers(&self.sets, d, Some((n, axis, ja, b)));
                            out[n * q + j][b as usize] =
                                self.sys.exhaustive(y_tilde, &self.sets.levels, &layers, counter).0;
                        }
                    }
                }
                counter.metrics_computed += (2 * d * q) as u64;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
