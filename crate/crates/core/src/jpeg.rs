//! Block-DCT baseline coder in the style of baseline JPEG.
//!
//! 8x8 blocks are level shifted by -128, transformed by the orthonormal
//! DCT-II, divided by the quality-scaled luminance table and rounded. The bit
//! cost is the zigzag coefficient stream length times its empirical entropy;
//! no Huffman stage is modelled.

use alloc::vec::Vec;

use crate::metrics::entropy_i64;
use crate::{round_half_away, Error, GrayImage, Result};

/// Standard luminance quantization table, row-major.
pub const LUMINANCE_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Row-major index of the `k`th coefficient in zigzag order.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20,
    13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59,
    52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];

/// Quantization table for a quality index in `0..=100` (0 behaves like 1).
pub fn quality_table(quality: u8) -> Result<[f64; 64]> {
    if quality > 100 {
        return Err(Error::InvalidConfig(alloc::format!(
            "JPEG quality {quality} is outside 0..=100"
        )));
    }
    let q = u32::from(quality.max(1));
    let scale = if q < 50 { 5000 / q } else { 200 - 2 * q };
    let mut table = [0.0; 64];
    for (t, &base) in table.iter_mut().zip(&LUMINANCE_TABLE) {
        *t = ((u32::from(base) * scale + 50) / 100).clamp(1, 255) as f64;
    }
    Ok(table)
}

fn dct_matrix() -> [[f64; 8]; 8] {
    let mut m = [[0.0; 8]; 8];
    for (u, row) in m.iter_mut().enumerate() {
        let a = if u == 0 { libm::sqrt(0.125) } else { 0.5 };
        for (x, v) in row.iter_mut().enumerate() {
            *v = a * libm::cos((2 * x + 1) as f64 * u as f64 * core::f64::consts::PI / 16.0);
        }
    }
    m
}

/// `m * b * m^T` (forward) or `m^T * b * m` (inverse) on a row-major block.
fn transform(m: &[[f64; 8]; 8], block: &[f64; 64], inverse: bool) -> [f64; 64] {
    let at = |i: usize, j: usize| if inverse { m[j][i] } else { m[i][j] };
    let mut tmp = [0.0; 64];
    for i in 0..8 {
        for j in 0..8 {
            tmp[i * 8 + j] = (0..8).map(|k| at(i, k) * block[k * 8 + j]).sum();
        }
    }
    let mut out = [0.0; 64];
    for i in 0..8 {
        for j in 0..8 {
            out[i * 8 + j] = (0..8).map(|k| tmp[i * 8 + k] * at(j, k)).sum();
        }
    }
    out
}

pub fn forward_dct(block: &[f64; 64]) -> [f64; 64] {
    transform(&dct_matrix(), block, false)
}

pub fn inverse_dct(coeffs: &[f64; 64]) -> [f64; 64] {
    transform(&dct_matrix(), coeffs, true)
}

/// Output of [`jpeg_baseline_encode`].
#[derive(Debug, Clone)]
pub struct JpegResult {
    pub reconstructed: GrayImage,
    pub bits: f64,
    /// Quantized coefficients of all blocks in raster block order, each
    /// block in zigzag order.
    pub zigzag: Vec<i64>,
}

pub fn jpeg_baseline_encode(img: &GrayImage, quality: u8) -> Result<JpegResult> {
    let (w, h) = (img.width(), img.height());
    if w % 8 != 0 || h % 8 != 0 {
        return Err(Error::NotDivisible {
            rows: h,
            cols: w,
            divisor: 8,
        });
    }
    let table = quality_table(quality)?;
    let m = dct_matrix();
    let mut reconstructed = GrayImage::filled(w, h, 0.0);
    let mut zigzag = Vec::with_capacity(w * h);
    for br in (0..h).step_by(8) {
        for bc in (0..w).step_by(8) {
            let mut block = [0.0; 64];
            for (i, v) in block.iter_mut().enumerate() {
                *v = img.get(br + i / 8, bc + i % 8) - 128.0;
            }
            let coeffs = transform(&m, &block, false);
            let mut q = [0i64; 64];
            let mut deq = [0.0; 64];
            for i in 0..64 {
                q[i] = round_half_away(coeffs[i] / table[i]) as i64;
                deq[i] = q[i] as f64 * table[i];
            }
            zigzag.extend(ZIGZAG.iter().map(|&i| q[i]));
            let pixels = transform(&m, &deq, true);
            for (i, v) in pixels.iter().enumerate() {
                reconstructed.set(br + i / 8, bc + i % 8, v + 128.0);
            }
        }
    }
    let bits = zigzag.len() as f64 * entropy_i64(&zigzag);
    Ok(JpegResult {
        reconstructed: reconstructed.materialize(),
        bits,
        zigzag,
    })
}
