//! Scalar measures: empirical entropy, compression ratio, MSE, PSNR and the
//! no-reference blockiness score.

use alloc::vec::Vec;

use crate::{Error, GrayImage, Result};

/// Empirical entropy in bits per symbol, `-sum p log2 p`. Values are
/// compared exactly, so callers pass integer-valued data. Zero for an empty
/// slice.
pub fn entropy(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    entropy_of_sorted(&sorted, |a, b| a.to_bits() == b.to_bits())
}

/// [`entropy`] for integer symbols.
pub fn entropy_i64(values: &[i64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    entropy_of_sorted(&sorted, |a, b| a == b)
}

fn entropy_of_sorted<T>(sorted: &[T], same: impl Fn(&T, &T) -> bool) -> f64 {
    let n = sorted.len() as f64;
    if sorted.is_empty() {
        return 0.0;
    }
    let mut h = 0.0;
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || !same(&sorted[i], &sorted[start]) {
            let p = (i - start) as f64 / n;
            h -= p * libm::log2(p);
            start = i;
        }
    }
    // Exact zero instead of -0.0 for single-symbol data.
    h + 0.0
}

pub fn compression_ratio(n1_bits: f64, n2_bits: f64) -> Result<f64> {
    if n2_bits.is_nan() || n2_bits <= 0.0 {
        return Err(Error::ZeroBits);
    }
    Ok(n1_bits / n2_bits)
}

pub fn mse(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.same_dims(b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.pixel_count() as f64)
}

/// Peak signal-to-noise ratio for 8-bit images, `+inf` for identical inputs.
pub fn psnr(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    let m = mse(a, b)?;
    Ok(psnr_from_mse(m))
}

pub fn psnr_from_mse(m: f64) -> f64 {
    if m == 0.0 {
        f64::INFINITY
    } else {
        10.0 * libm::log10(255.0 * 255.0 / m)
    }
}

/// Parameters of `S = alpha + beta * B^g1 * A^g2 * Z^g3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreModel {
    pub alpha: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

impl Default for ScoreModel {
    fn default() -> Self {
        Self {
            alpha: -245.9,
            beta: 261.9,
            gamma1: -0.0240,
            gamma2: 0.0160,
            gamma3: 0.0064,
        }
    }
}

/// Blockiness `b`, activity `a` and zero-crossing rate `z` of an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreFeatures {
    pub b: f64,
    pub a: f64,
    pub z: f64,
}

const BLOCK: usize = 8;

#[derive(Default)]
struct Directional {
    b: f64,
    a: f64,
    z: f64,
}

/// Features from the first differences of each line. `b` averages the
/// absolute differences across the 8-aligned block boundaries; `a` is
/// `(8 * mean |d| - b) / 7`; `z` is the rate of sign changes between
/// consecutive differences that both lie inside one block.
fn line_features(lines: usize, len: usize, at: impl Fn(usize, usize) -> f64) -> Directional {
    let mut boundary_sum = 0.0;
    let mut boundary_count = 0usize;
    let mut total = 0.0;
    let mut crossings = 0usize;
    let mut pairs = 0usize;
    let mut diffs = Vec::with_capacity(len.saturating_sub(1));
    for line in 0..lines {
        diffs.clear();
        diffs.extend((0..len - 1).map(|n| at(line, n + 1) - at(line, n)));
        for (n, d) in diffs.iter().enumerate() {
            total += d.abs();
            if n % BLOCK == BLOCK - 1 {
                boundary_sum += d.abs();
                boundary_count += 1;
            }
        }
        for n in 0..diffs.len().saturating_sub(1) {
            if n % BLOCK < BLOCK - 2 {
                pairs += 1;
                if diffs[n] * diffs[n + 1] < 0.0 {
                    crossings += 1;
                }
            }
        }
    }
    let b = boundary_sum / boundary_count as f64;
    let mean = total / (lines * (len - 1)) as f64;
    Directional {
        b,
        a: (BLOCK as f64 * mean - b) / (BLOCK - 1) as f64,
        z: crossings as f64 / pairs as f64,
    }
}

pub fn score_features(img: &GrayImage) -> Result<ScoreFeatures> {
    let (w, h) = (img.width(), img.height());
    if w <= BLOCK || h <= BLOCK {
        return Err(Error::InvalidConfig(alloc::format!(
            "score needs at least {}x{} pixels, got {w}x{h}",
            BLOCK + 1,
            BLOCK + 1
        )));
    }
    let horizontal = line_features(h, w, |r, c| img.get(r, c));
    let vertical = line_features(w, h, |c, r| img.get(r, c));
    Ok(ScoreFeatures {
        b: (horizontal.b + vertical.b) / 2.0,
        a: (horizontal.a + vertical.a) / 2.0,
        z: (horizontal.z + vertical.z) / 2.0,
    })
}

impl ScoreModel {
    /// Score of precomputed features, clamped to `[0, 10]`. Any non-positive
    /// feature gives 10.
    pub fn evaluate(&self, f: ScoreFeatures) -> f64 {
        if !(f.b > 0.0 && f.a > 0.0 && f.z > 0.0) {
            return 10.0;
        }
        let s = self.alpha
            + self.beta
                * libm::pow(f.b, self.gamma1)
                * libm::pow(f.a, self.gamma2)
                * libm::pow(f.z, self.gamma3);
        s.clamp(0.0, 10.0)
    }
}

pub fn score(img: &GrayImage, model: &ScoreModel) -> Result<f64> {
    Ok(model.evaluate(score_features(img)?))
}
