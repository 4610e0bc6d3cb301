//! Closest-point searches over an upper-triangular system `‖y − R x‖²`
//! with per-layer candidate sets drawn from one PAM axis.
//!
//! Both the real (one PAM axis per layer) and complex (QAM = PAM × PAM per
//! layer) variants come as an exhaustive enumeration and a depth-first
//! sphere decoder. The sphere decoder starts with an infinite radius,
//! visits children in Schnorr–Euchner order and slices the last layer.
//!
//! Multiplication accounting:
//! - real node at layer `i`: `D-1-i` for the interference, 1 for the
//!   center, 2 per child examined (`(x-c)²` and the `R_ii²` scale);
//! - complex node: `4(D-1-i)` + 2, one square per axis level, 1 per child
//!   examined;
//! - sliced leaf: 2 (real) or 3 (complex) for its distance increment;
//! - exhaustive candidate: `D(D+1)/2 + D` (real) or `4·D(D+1)/2 + 2D`
//!   (complex).

use alloc::vec::Vec;

use num_complex::Complex64;

use super::MultCounter;

pub(crate) const MAX_D: usize = 6;

/// Level indices (ascending) allowed on one layer.
pub(crate) type LayerSet<'a> = &'a [usize];

/// Upper-triangular system with cached diagonal quantities.
#[derive(Debug, Clone)]
pub(crate) struct Triangular<T> {
    pub d: usize,
    /// Row-major `d × d`.
    pub r: Vec<T>,
    pub inv_diag: Vec<f64>,
    pub diag_sq: Vec<f64>,
}

impl<T: Copy> Triangular<T> {
    pub fn new(d: usize, r: Vec<T>, diag: &[f64]) -> Self {
        Triangular {
            d,
            r,
            inv_diag: diag.iter().map(|x| 1.0 / x).collect(),
            diag_sq: diag.iter().map(|x| x * x).collect(),
        }
    }

    #[inline]
    fn row(&self, i: usize) -> &[T] {
        &self.r[i * self.d..(i + 1) * self.d]
    }
}

/// Index into `set` of the level closest to `c`.
#[inline]
fn nearest(levels: &[f64], set: &[usize], c: f64) -> usize {
    let p = set.partition_point(|&t| levels[t] < c);
    if p == 0 {
        0
    } else if p == set.len() || c - levels[set[p - 1]] <= levels[set[p]] - c {
        p - 1
    } else {
        p
    }
}

/// Schnorr–Euchner order over a sorted set: yields indices into `set` by
/// non-decreasing distance to `c`.
struct ZigZag<'a> {
    levels: &'a [f64],
    set: &'a [usize],
    c: f64,
    lo: isize,
    hi: usize,
}

impl<'a> ZigZag<'a> {
    fn new(levels: &'a [f64], set: &'a [usize], c: f64) -> Self {
        let p = set.partition_point(|&t| levels[t] < c);
        ZigZag { levels, set, c, lo: p as isize - 1, hi: p }
    }
}

impl Iterator for ZigZag<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        let lo_ok = self.lo >= 0;
        let hi_ok = self.hi < self.set.len();
        let take_lo = match (lo_ok, hi_ok) {
            (false, false) => return None,
            (true, false) => true,
            (false, true) => false,
            (true, true) => self.c - self.levels[self.set[self.lo as usize]] <= self.levels[self.set[self.hi]] - self.c,
        };
        if take_lo {
            self.lo -= 1;
            Some((self.lo + 1) as usize)
        } else {
            self.hi += 1;
            Some(self.hi - 1)
        }
    }
}

/// Best metric and the PAM level index chosen on each layer.
pub(crate) type RealHit = (f64, [usize; MAX_D]);

/// Best metric and the `(real, imag)` PAM level indices on each layer.
pub(crate) type ComplexHit = (f64, [(usize, usize); MAX_D]);

impl Triangular<f64> {
    pub fn sphere_decode(
        &self,
        y: &[f64],
        levels: &[f64],
        sets: &[LayerSet<'_>],
        counter: &mut MultCounter,
    ) -> RealHit {
        let mut sd = RealSd {
            sys: self,
            y,
            levels,
            sets,
            x: [0.0; MAX_D],
            idx: [0; MAX_D],
            best: f64::INFINITY,
            best_idx: [0; MAX_D],
            mults: 0,
            leaves: 0,
        };
        sd.visit(self.d - 1, 0.0);
        counter.real_multiplications += sd.mults;
        counter.leaves_visited += sd.leaves;
        (sd.best, sd.best_idx)
    }

    pub fn exhaustive(&self, y: &[f64], levels: &[f64], sets: &[LayerSet<'_>], counter: &mut MultCounter) -> RealHit {
        let d = self.d;
        let mut pos = [0usize; MAX_D];
        let mut best = (f64::INFINITY, [0usize; MAX_D]);
        let mut count = 0u64;
        loop {
            let mut metric = 0.0;
            for i in 0..d {
                let row = self.row(i);
                let mut s = y[i];
                for l in i..d {
                    s -= row[l] * levels[sets[l][pos[l]]];
                }
                metric += s * s;
            }
            count += 1;
            if metric < best.0 {
                best.0 = metric;
                for l in 0..d {
                    best.1[l] = sets[l][pos[l]];
                }
            }
            if !advance(&mut pos, |l| sets[l].len(), d) {
                break;
            }
        }
        counter.candidates_enumerated += count;
        counter.real_multiplications += count * (d * (d + 1) / 2 + d) as u64;
        best
    }
}

/// Odometer over the product of `len(l)` for `l < d`.
#[inline]
fn advance(pos: &mut [usize; MAX_D], len: impl Fn(usize) -> usize, d: usize) -> bool {
    for l in 0..d {
        pos[l] += 1;
        if pos[l] < len(l) {
            return true;
        }
        pos[l] = 0;
    }
    false
}

struct RealSd<'a> {
    sys: &'a Triangular<f64>,
    y: &'a [f64],
    levels: &'a [f64],
    sets: &'a [LayerSet<'a>],
    x: [f64; MAX_D],
    idx: [usize; MAX_D],
    best: f64,
    best_idx: [usize; MAX_D],
    mults: u64,
    leaves: u64,
}

impl RealSd<'_> {
    fn visit(&mut self, i: usize, partial: f64) {
        let d = self.sys.d;
        let row = self.sys.row(i);
        let mut s = self.y[i];
        for l in (i + 1)..d {
            s -= row[l] * self.x[l];
        }
        let c = s * self.sys.inv_diag[i];
        self.mults += (d - i) as u64;
        let set = self.sets[i];
        let scale = self.sys.diag_sq[i];

        if i == 0 {
            let k = nearest(self.levels, set, c);
            let e = self.levels[set[k]] - c;
            let total = partial + e * e * scale;
            self.mults += 2;
            self.leaves += 1;
            if total < self.best {
                self.best = total;
                self.idx[0] = set[k];
                self.best_idx = self.idx;
            }
            return;
        }

        for k in ZigZag::new(self.levels, set, c) {
            let e = self.levels[set[k]] - c;
            let next = partial + e * e * scale;
            self.mults += 2;
            if next >= self.best {
                break;
            }
            self.x[i] = self.levels[set[k]];
            self.idx[i] = set[k];
            self.visit(i - 1, next);
        }
    }
}

/// Allowed `(real, imag)` level sets of one complex layer.
pub(crate) type ComplexLayer<'a> = (LayerSet<'a>, LayerSet<'a>);

impl Triangular<Complex64> {
    pub fn sphere_decode(
        &self,
        y: &[Complex64],
        levels: &[f64],
        sets: &[ComplexLayer<'_>],
        counter: &mut MultCounter,
    ) -> ComplexHit {
        let mut sd = ComplexSd {
            sys: self,
            y,
            levels,
            sets,
            x: [Complex64::new(0.0, 0.0); MAX_D],
            idx: [(0, 0); MAX_D],
            best: f64::INFINITY,
            best_idx: [(0, 0); MAX_D],
            scratch: core::array::from_fn(|_| Vec::new()),
            mults: 0,
            leaves: 0,
        };
        sd.visit(self.d - 1, 0.0);
        counter.real_multiplications += sd.mults;
        counter.leaves_visited += sd.leaves;
        (sd.best, sd.best_idx)
    }

    pub fn exhaustive(
        &self,
        y: &[Complex64],
        levels: &[f64],
        sets: &[ComplexLayer<'_>],
        counter: &mut MultCounter,
    ) -> ComplexHit {
        let d = self.d;
        // Layer l enumerates re_set × im_set as one flat index.
        let len = |l: usize| sets[l].0.len() * sets[l].1.len();
        let pick = |l: usize, p: usize| {
            let (re, im) = sets[l];
            (re[p / im.len()], im[p % im.len()])
        };
        let mut pos = [0usize; MAX_D];
        let mut best = (f64::INFINITY, [(0usize, 0usize); MAX_D]);
        let mut count = 0u64;
        loop {
            let mut metric = 0.0;
            for i in 0..d {
                let row = self.row(i);
                let mut s = y[i];
                for l in i..d {
                    let (a, b) = pick(l, pos[l]);
                    s -= row[l] * Complex64::new(levels[a], levels[b]);
                }
                metric += s.norm_sqr();
            }
            count += 1;
            if metric < best.0 {
                best.0 = metric;
                for l in 0..d {
                    best.1[l] = pick(l, pos[l]);
                }
            }
            if !advance(&mut pos, len, d) {
                break;
            }
        }
        counter.candidates_enumerated += count;
        counter.real_multiplications += count * (4 * d * (d + 1) / 2 + 2 * d) as u64;
        best
    }
}

struct ComplexSd<'a> {
    sys: &'a Triangular<Complex64>,
    y: &'a [Complex64],
    levels: &'a [f64],
    sets: &'a [ComplexLayer<'a>],
    x: [Complex64; MAX_D],
    idx: [(usize, usize); MAX_D],
    best: f64,
    best_idx: [(usize, usize); MAX_D],
    /// Per-layer child lists, reused across nodes.
    scratch: [Vec<(f64, usize, usize)>; MAX_D],
    mults: u64,
    leaves: u64,
}

impl ComplexSd<'_> {
    fn visit(&mut self, i: usize, partial: f64) {
        let d = self.sys.d;
        let row = self.sys.row(i);
        let mut s = self.y[i];
        for l in (i + 1)..d {
            s -= row[l] * self.x[l];
        }
        let c = s * self.sys.inv_diag[i];
        self.mults += (4 * (d - 1 - i) + 2) as u64;
        let (re_set, im_set) = self.sets[i];
        let scale = self.sys.diag_sq[i];

        if i == 0 {
            let a = re_set[nearest(self.levels, re_set, c.re)];
            let b = im_set[nearest(self.levels, im_set, c.im)];
            let (er, ei) = (self.levels[a] - c.re, self.levels[b] - c.im);
            let total = partial + (er * er + ei * ei) * scale;
            self.mults += 3;
            self.leaves += 1;
            if total < self.best {
                self.best = total;
                self.idx[0] = (a, b);
                self.best_idx = self.idx;
            }
            return;
        }

        let mut children = core::mem::take(&mut self.scratch[i]);
        children.clear();
        let dre: Vec<f64> = re_set.iter().map(|&a| (self.levels[a] - c.re) * (self.levels[a] - c.re)).collect();
        let dim: Vec<f64> = im_set.iter().map(|&b| (self.levels[b] - c.im) * (self.levels[b] - c.im)).collect();
        self.mults += (re_set.len() + im_set.len()) as u64;
        for (ka, &a) in re_set.iter().enumerate() {
            for (kb, &b) in im_set.iter().enumerate() {
                children.push((dre[ka] + dim[kb], a, b));
            }
        }
        children.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));

        for &(dist, a, b) in &children {
            let next = partial + dist * scale;
            self.mults += 1;
            if next >= self.best {
                break;
            }
            self.x[i] = Complex64::new(self.levels[a], self.levels[b]);
            self.idx[i] = (a, b);
            self.visit(i - 1, next);
        }
        self.scratch[i] = children;
    }
}
