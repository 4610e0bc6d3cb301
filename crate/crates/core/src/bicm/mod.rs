//! The outer bit-interleaved coded modulation chain.

mod conv;
mod frame;
mod interleave;
mod qam;

pub use conv::{conv_encode, depuncture, viterbi_decode, CodeRate, ConvCodeSpec, PuncturePattern};
pub use frame::{map_symbols, BitLocation, CodedFrame, FrameLayout};
pub use interleave::InterleaverPerm;
pub use qam::{Axis, Constellation, PamAxis};
