//! Symbol mapping and the per-frame transmit/receive bookkeeping.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{conv_encode, viterbi_decode, Axis, Constellation, ConvCodeSpec, InterleaverPerm};
use crate::pstbc::{Dimension, SymbolBlock};
use crate::{Error, Result};

/// Where a coded bit ends up: codeword `block`, column `group` (`x_v`),
/// row `entry` within that column, label bit `bit` and the PAM axis that
/// bit drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitLocation {
    pub block: usize,
    pub group: usize,
    pub entry: usize,
    pub bit: usize,
    pub axis: Axis,
}

/// Stream position of a bit: `((block·D + group)·D + entry)·q + bit`.
#[inline]
pub(crate) fn stream_index(d: usize, q: usize, block: usize, group: usize, entry: usize, bit: usize) -> usize {
    ((block * d + group) * d + entry) * q + bit
}

/// Groups bits into `log2 M`-bit labels and `D²` consecutive symbols into
/// one block, filling `x_1` first. Returns the blocks and, per input bit,
/// its location.
pub fn map_symbols(
    constellation: &Constellation,
    bits: &[u8],
    dim: Dimension,
) -> Result<(Vec<SymbolBlock>, Vec<BitLocation>)> {
    let d = dim.get();
    let q = constellation.bits_per_symbol();
    let per_block = d * d * q;
    if bits.is_empty() || !bits.len().is_multiple_of(per_block) {
        return Err(Error::InvalidInput(alloc::format!(
            "bit count {} is not a positive multiple of D²·log2(M) = {per_block}",
            bits.len()
        )));
    }
    let mut blocks = Vec::with_capacity(bits.len() / per_block);
    let mut locations = Vec::with_capacity(bits.len());
    for (k, chunk) in bits.chunks_exact(per_block).enumerate() {
        let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(d);
        for v in 0..d {
            let mut col = Vec::with_capacity(d);
            for n in 0..d {
                let s = (v * d + n) * q;
                col.push(constellation.point(constellation.label_from_bits(&chunk[s..s + q])));
                for j in 0..q {
                    locations.push(BitLocation {
                        block: k,
                        group: v,
                        entry: n,
                        bit: j,
                        axis: constellation.axis_of(j).0,
                    });
                }
            }
            columns.push(col);
        }
        blocks.push(SymbolBlock::new(dim, columns)?);
    }
    Ok((blocks, locations))
}

/// Everything produced for one frame on the transmit side.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedFrame {
    pub info_bits: Vec<u8>,
    pub coded_bits: Vec<u8>,
    /// Interleaved coded bits followed by zero filler up to a whole number
    /// of codewords.
    pub interleaved_bits: Vec<u8>,
    pub symbol_blocks: Vec<SymbolBlock>,
    /// `location_map[k']` is where coded bit `c_{k'}` was placed.
    pub location_map: Vec<BitLocation>,
}

/// Fixed per-run frame geometry: code, interleaver, constellation,
/// dimension and frame length.
#[derive(Debug, Clone)]
pub struct FrameLayout {
    code: ConvCodeSpec,
    interleaver: InterleaverPerm,
    constellation: Constellation,
    dim: Dimension,
    info_len: usize,
    blocks: usize,
}

impl FrameLayout {
    pub fn new(
        code: ConvCodeSpec,
        constellation: Constellation,
        dim: Dimension,
        info_len: usize,
        interleaver_seed: u64,
    ) -> Result<Self> {
        if info_len == 0 {
            return Err(Error::invalid("frame needs at least one information bit"));
        }
        let coded_len = code.coded_len(info_len);
        let per_block = dim.get() * dim.get() * constellation.bits_per_symbol();
        let blocks = coded_len.div_ceil(per_block);
        let interleaver = InterleaverPerm::random(coded_len, interleaver_seed);
        Ok(FrameLayout { code, interleaver, constellation, dim, info_len, blocks })
    }

    /// Same geometry with a caller-supplied permutation.
    pub fn with_interleaver(mut self, interleaver: InterleaverPerm) -> Result<Self> {
        if interleaver.len() != self.coded_len() {
            return Err(Error::invalid("interleaver length differs from coded length"));
        }
        self.interleaver = interleaver;
        Ok(self)
    }

    pub fn code(&self) -> &ConvCodeSpec {
        &self.code
    }

    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    pub fn interleaver(&self) -> &InterleaverPerm {
        &self.interleaver
    }

    pub fn dim(&self) -> Dimension {
        self.dim
    }

    pub fn info_len(&self) -> usize {
        self.info_len
    }

    pub fn coded_len(&self) -> usize {
        self.interleaver.len()
    }

    /// PSTBC codewords per frame.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    /// Bits carried by the symbol stream, filler included.
    pub fn stream_len(&self) -> usize {
        let d = self.dim.get();
        self.blocks * d * d * self.constellation.bits_per_symbol()
    }

    /// Position in the symbol bit stream of `(block, group, entry, bit)`.
    pub fn stream_position(&self, loc: &BitLocation) -> usize {
        stream_index(self.dim.get(), self.constellation.bits_per_symbol(), loc.block, loc.group, loc.entry, loc.bit)
    }

    pub fn encode(&self, info_bits: &[u8]) -> Result<CodedFrame> {
        if info_bits.len() != self.info_len {
            return Err(Error::invalid("frame: wrong number of information bits"));
        }
        let coded_bits = conv_encode(&self.code, info_bits)?;
        let mut interleaved_bits = self.interleaver.interleave(&coded_bits)?;
        interleaved_bits.resize(self.stream_len(), 0);
        let (symbol_blocks, stream_locations) = map_symbols(&self.constellation, &interleaved_bits, self.dim)?;
        let mut location_map = alloc::vec![stream_locations[0]; coded_bits.len()];
        for (i, &k) in self.interleaver.as_slice().iter().enumerate() {
            location_map[k] = stream_locations[i];
        }
        Ok(CodedFrame { info_bits: info_bits.to_vec(), coded_bits, interleaved_bits, symbol_blocks, location_map })
    }

    /// Deinterleaves per-stream-position metric pairs (filler included) and
    /// runs the Viterbi decoder.
    pub fn decode(&self, stream_metrics: &[[f64; 2]]) -> Result<Vec<u8>> {
        if stream_metrics.len() != self.stream_len() {
            return Err(Error::invalid("decode: metric count differs from stream length"));
        }
        let coded = self.interleaver.deinterleave(&stream_metrics[..self.coded_len()])?;
        viterbi_decode(&self.code, &coded)
    }
}
