//! Seeded random bit interleaver.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// A permutation of `0..length`: output position `i` carries input bit
/// `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterleaverPerm {
    perm: Vec<usize>,
    /// `None` for hand-built permutations.
    seed: Option<u64>,
}

impl InterleaverPerm {
    /// Uniform random permutation: Fisher–Yates driven by ChaCha8 seeded
    /// with `seed`.
    pub fn random(length: usize, seed: u64) -> Self {
        let mut perm: Vec<usize> = (0..length).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        InterleaverPerm { perm, seed: Some(seed) }
    }

    pub fn identity(length: usize) -> Self {
        InterleaverPerm { perm: (0..length).collect(), seed: None }
    }

    pub fn from_permutation(perm: Vec<usize>) -> Result<Self> {
        let mut seen = alloc::vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || core::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        Ok(InterleaverPerm { perm, seed: None })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.perm.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.perm
    }

    pub fn interleave<T: Copy>(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.len() {
            return Err(Error::invalid("interleave: length mismatch"));
        }
        Ok(self.perm.iter().map(|&p| input[p]).collect())
    }

    pub fn deinterleave<T: Copy + Default>(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.len() {
            return Err(Error::invalid("deinterleave: length mismatch"));
        }
        let mut out = alloc::vec![T::default(); self.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = input[i];
        }
        Ok(out)
    }
}
