//! Bit-interleaved coded multiple beamforming with perfect space-time block
//! codes.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the whole signal
//! chain as pure functions:
//!
//! - [`linalg`]: tiny dense complex matrices, SVD and QR.
//! - [`pstbc`]: perfect-code generators, codeword construction and the
//!   group/phase decomposition of the received codeword.
//! - [`bicm`]: convolutional code with puncturing, bit interleaver, Gray
//!   mapped square QAM and the soft-input Viterbi decoder.
//! - [`channel`]: Rayleigh channel draws reduced to the diagonal
//!   beamformed model, plus AWGN.
//! - [`detector`]: bit metrics by exhaustive search and sphere decoding,
//!   with real multiplication accounting.
//! - [`diversity`]: the per-subchannel weights of an error event.
//!
//! File formats, configuration and the Monte Carlo driver live in the
//! `bicmb-sim` crate.

#![no_std]
#![warn(missing_debug_implementations)]
#![allow(clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bicm;
pub mod channel;
pub mod detector;
pub mod diversity;
mod error;
pub mod linalg;
pub mod pstbc;

pub use error::{Error, Result};
pub use num_complex::Complex64;
