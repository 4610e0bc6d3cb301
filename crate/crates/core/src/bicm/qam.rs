//! Gray-labelled square QAM built as two independent √M-PAM axes.
//!
//! A symbol label has `q = log2 M` bits. Bits `0..q/2` select the real
//! amplitude, bits `q/2..q` the imaginary one; bit 0 is the first bit taken
//! from the stream. On each axis, level `t` counted from the top amplitude
//! carries the reflected Gray code `t ^ (t >> 1)`, so all-zero labels sit in
//! the first quadrant.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    Real,
    Imag,
}

/// One √M-PAM axis, levels sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct PamAxis {
    /// Amplitudes, ascending, already scaled for unit average QAM energy.
    pub levels: Vec<f64>,
    /// Gray label (`bits` wide) of each entry in `levels`.
    pub labels: Vec<u32>,
    pub bits: usize,
}

impl PamAxis {
    #[inline]
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Bit `j` (0 = most significant) of the label of level index `i`.
    #[inline]
    pub fn label_bit(&self, i: usize, j: usize) -> u8 {
        ((self.labels[i] >> (self.bits - 1 - j)) & 1) as u8
    }

    /// Level indices whose label has bit `j` equal to `b`, ascending.
    pub fn subset(&self, j: usize, b: u8) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.label_bit(i, j) == b).collect()
    }

    /// Level index with the given label.
    pub fn index_of_label(&self, label: u32) -> usize {
        self.labels.iter().position(|&l| l == label).expect("label in range")
    }

    /// Smallest distance between adjacent levels.
    pub fn spacing(&self) -> f64 {
        self.levels[1] - self.levels[0]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    m: usize,
    bits_per_symbol: usize,
    /// Indexed by label.
    points: Vec<Complex64>,
    axis: PamAxis,
}

impl Constellation {
    /// Square Gray-mapped `M`-QAM, `M ∈ {4, 16, 64, 256}`, unit average
    /// energy.
    pub fn qam(m: usize) -> Result<Self> {
        let bits_per_symbol = match m {
            4 => 2,
            16 => 4,
            64 => 6,
            256 => 8,
            _ => return Err(Error::InvalidInput(alloc::format!("unsupported QAM size {m}"))),
        };
        let side = 1usize << (bits_per_symbol / 2);
        let half_bits = bits_per_symbol / 2;
        // Per-axis energy of {±1, ±3, …} is (side² - 1)/3; two axes.
        let scale = 1.0 / (2.0 * ((side * side - 1) as f64) / 3.0).sqrt();
        let mut levels = Vec::with_capacity(side);
        let mut labels = Vec::with_capacity(side);
        for i in 0..side {
            let t = side - 1 - i;
            levels.push((2.0 * i as f64 - (side - 1) as f64) * scale);
            labels.push((t ^ (t >> 1)) as u32);
        }
        let axis = PamAxis { levels, labels, bits: half_bits };
        let points = (0..m as u32)
            .map(|label| {
                let re = axis.levels[axis.index_of_label(label >> half_bits)];
                let im = axis.levels[axis.index_of_label(label & ((1 << half_bits) - 1))];
                Complex64::new(re, im)
            })
            .collect();
        Ok(Constellation { m, bits_per_symbol, points, axis })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m
    }

    #[inline]
    pub fn bits_per_symbol(&self) -> usize {
        self.bits_per_symbol
    }

    /// Label bits per axis.
    #[inline]
    pub fn bits_per_axis(&self) -> usize {
        self.bits_per_symbol / 2
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    #[inline]
    pub fn point(&self, label: u32) -> Complex64 {
        self.points[label as usize]
    }

    /// The PAM axis shared by real and imaginary parts.
    pub fn pam(&self) -> &PamAxis {
        &self.axis
    }

    #[inline]
    pub fn label_bit(&self, label: u32, j: usize) -> u8 {
        ((label >> (self.bits_per_symbol - 1 - j)) & 1) as u8
    }

    /// Which axis label bit `j` addresses, and its index within that axis.
    #[inline]
    pub fn axis_of(&self, j: usize) -> (Axis, usize) {
        let h = self.bits_per_axis();
        if j < h {
            (Axis::Real, j)
        } else {
            (Axis::Imag, j - h)
        }
    }

    /// Label from the two axis level indices.
    pub fn label_from_levels(&self, re_idx: usize, im_idx: usize) -> u32 {
        (self.axis.labels[re_idx] << self.bits_per_axis()) | self.axis.labels[im_idx]
    }

    /// Maps `log2 M` bits (first bit most significant) to a label.
    pub fn label_from_bits(&self, bits: &[u8]) -> u32 {
        bits.iter().fold(0u32, |acc, &b| (acc << 1) | (b & 1) as u32)
    }

    /// Minimum distance between two points.
    pub fn min_distance(&self) -> f64 {
        self.axis.spacing()
    }

    pub fn average_energy(&self) -> f64 {
        self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / self.m as f64
    }
}
