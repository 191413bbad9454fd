//! Contourlet-domain image compression and blind watermarking.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is a pure
//! function over in-memory rasters and coefficient bands; file formats, the
//! bitstream container and the command-line driver live in the `ctwm` crate.
//!
//! Pipeline overview:
//!
//! * [`lp`] builds a Laplacian pyramid with 9-7 biorthogonal filters.
//! * [`dfb`] splits every bandpass level into `2^k` directional subbands with
//!   a binary tree of quincunx fan filter banks.
//! * [`contourlet`] composes the two and fixes a stable band order.
//! * [`lowpass_codec`] codes the coarse lowpass band losslessly (spiral
//!   re-ordering followed by West prediction).
//! * [`quantizer`] assigns energy-driven divisors and estimates the bit cost.
//! * [`watermark`] embeds a binary logo into the lowpass band by mod-Q
//!   scalar quantization.
//! * [`attacks`] and [`jpeg`] carry the robustness battery and the block-DCT
//!   baseline coder, [`metrics`] the scalar quality measures.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod attacks;
pub mod band;
pub mod contourlet;
pub mod dfb;
mod error;
pub mod filters;
pub mod image;
pub mod jpeg;
pub mod lowpass_codec;
pub mod lp;
pub mod metrics;
pub mod quantizer;
pub mod watermark;

pub use band::Band;
pub use contourlet::{ContourletPyramid, CtConfig};
pub use error::{Error, Result};
pub use filters::FilterSet;
pub use image::{GrayImage, WatermarkBits};

/// Rounds half away from zero. Every place that turns a real value into an
/// integer symbol or an 8-bit sample goes through this.
#[inline]
pub fn round_half_away(v: f64) -> f64 {
    libm::round(v)
}
