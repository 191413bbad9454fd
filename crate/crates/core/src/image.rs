//! The grayscale raster and binary logo types used throughout the crate.

use alloc::vec::Vec;

use crate::{round_half_away, Band, Error, Result};

/// A grayscale raster with nominal range `[0, 255]`.
///
/// Samples are stored as `f64` in row-major order so that intermediate
/// results (a reconstruction before 8-bit materialization, say) can be kept
/// without loss. [`GrayImage::materialize`] applies the one rounding rule used
/// everywhere: round half away from zero, then clamp to `[0, 255]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Empty);
        }
        if data.len() != width * height {
            return Err(Error::Structure(alloc::format!(
                "{} samples for a {}x{} image",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_u8(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    /// Builds an image from `f(row, col)`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0);
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn pixel_count(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.data[row * self.width + col] = v;
    }

    /// Rounded and clamped 8-bit samples.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| to_byte(v)).collect()
    }

    /// The 8-bit image a file write would produce, kept as `GrayImage`.
    pub fn materialize(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f64::from(to_byte(v))).collect(),
        }
    }

    pub fn to_band(&self) -> Band {
        Band::new(self.height, self.width, self.data.clone()).expect("image is never empty")
    }

    /// Wraps a band as an image without rounding.
    pub fn from_band(band: &Band) -> GrayImage {
        GrayImage {
            width: band.cols(),
            height: band.rows(),
            data: band.values().to_vec(),
        }
    }

    pub fn same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::DimensionMismatch {
                expected_rows: self.height,
                expected_cols: self.width,
                rows: other.height,
                cols: other.width,
            });
        }
        Ok(())
    }
}

#[inline]
fn to_byte(v: f64) -> u8 {
    let r = round_half_away(v);
    if r.is_nan() || r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// A binary logo. Every entry is exactly 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkBits {
    width: usize,
    height: usize,
    bits: Vec<u8>,
}

impl WatermarkBits {
    pub fn new(width: usize, height: usize, bits: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Empty);
        }
        if bits.len() != width * height {
            return Err(Error::Structure(alloc::format!(
                "{} bits for a {}x{} logo",
                bits.len(),
                width,
                height
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Structure("logo entries must be 0 or 1".into()));
        }
        Ok(Self {
            width,
            height,
            bits,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self::new(width, height, alloc::vec![0; width * height]).expect("non-empty")
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Row-major 0/1 entries.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.width + col]
    }

    pub fn complement(&self) -> Self {
        Self {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().map(|&b| 1 - b).collect(),
        }
    }
}
