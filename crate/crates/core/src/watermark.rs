//! Blind watermarking of the contourlet lowpass band by mod-Q scalar
//! quantization.
//!
//! Each watermark bit is bound to one lowpass coefficient chosen by a keyed
//! pseudo-random permutation. A coefficient carries bit 1 when
//! `mod(f, Q) >= Q/2` and bit 0 otherwise (floored modulo, result in
//! `[0, Q)`). Extraction needs only the marked image and the key.
//!
//! The contourlet lowpass band is the Laplacian pyramid lowpass band, and the
//! directional bands are left untouched, so both directions work on the
//! pyramid alone.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::contourlet::CtConfig;
use crate::lp::{lp_analyze, lp_synthesize};
use crate::{Band, Error, FilterSet, GrayImage, Result, WatermarkBits};

/// How a coefficient is moved to encode a bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbedRule {
    /// Move to the nearest point of `k Q + Q/4` (bit 0) or `k Q + 3Q/4`
    /// (bit 1), ties upwards. Every carried bit then has a margin of `Q/4`
    /// against perturbations.
    #[default]
    Centered,
    /// Shift by `+-Q/2` only when `mod(f, Q)` lies in the wrong half, leave
    /// it alone otherwise.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedConfig {
    /// Quantization step `Q`.
    pub q: f64,
    /// Key of the position permutation.
    pub seed: u64,
    pub ct_config: CtConfig,
    pub rule: EmbedRule,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            q: 16.0,
            seed: 0,
            ct_config: CtConfig::default(),
            rule: EmbedRule::Centered,
        }
    }
}

impl EmbedConfig {
    fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::InvalidConfig(alloc::format!(
                "Q = {} is not positive",
                self.q
            )));
        }
        Ok(())
    }
}

/// Floored modulo, always in `[0, q)`.
pub fn floored_mod(v: f64, q: f64) -> f64 {
    let m = v - q * libm::floor(v / q);
    if m >= q {
        0.0
    } else {
        m
    }
}

/// New coefficient value carrying `bit`.
pub fn embed_value(f: f64, bit: u8, q: f64, rule: EmbedRule) -> f64 {
    embed_value_within(f, bit, q, rule, f64::NEG_INFINITY, f64::INFINITY)
}

/// [`embed_value`] for coefficients confined to `[lo, hi]`. The centered rule
/// picks the other neighbouring target when the nearest one leaves the range.
pub fn embed_value_within(f: f64, bit: u8, q: f64, rule: EmbedRule, lo: f64, hi: f64) -> f64 {
    let z = floored_mod(f, q);
    let upper = z >= q / 2.0;
    match rule {
        EmbedRule::Literal => match (bit, upper) {
            (0, true) => f - q / 2.0,
            (1, false) => f + q / 2.0,
            _ => f,
        },
        EmbedRule::Centered => {
            let offset = if bit == 0 { q / 4.0 } else { 3.0 * q / 4.0 };
            let k = libm::floor((f - offset) / q);
            let below = k * q + offset;
            let above = below + q;
            if (f - below < above - f && below >= lo) || above > hi {
                below
            } else {
                above
            }
        }
    }
}

pub fn extract_value(f: f64, q: f64) -> u8 {
    u8::from(floored_mod(f, q) >= q / 2.0)
}

/// The first `count` entries of a keyed permutation of `0..len`.
pub fn bit_positions(len: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count > len {
        return Err(Error::Capacity {
            bits: count,
            capacity: len,
        });
    }
    let mut idx: Vec<usize> = (0..len).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    idx.truncate(count);
    Ok(idx)
}

/// Embeds `wm` into a lowpass band in place.
pub fn embed_coefficients(lowpass: &mut Band, wm: &WatermarkBits, cfg: &EmbedConfig) -> Result<()> {
    embed_coefficients_within(lowpass, wm, cfg, f64::NEG_INFINITY, f64::INFINITY)
}

fn embed_coefficients_within(
    lowpass: &mut Band,
    wm: &WatermarkBits,
    cfg: &EmbedConfig,
    lo: f64,
    hi: f64,
) -> Result<()> {
    cfg.validate()?;
    let positions = bit_positions(lowpass.len(), wm.len(), cfg.seed)?;
    let values = lowpass.values_mut();
    for (&p, &bit) in positions.iter().zip(wm.bits()) {
        values[p] = embed_value_within(values[p], bit, cfg.q, cfg.rule, lo, hi);
    }
    Ok(())
}

/// Lowpass value of a constant full-scale (255) image.
fn lowpass_peak(filters: &FilterSet, levels: usize) -> f64 {
    let dc: f64 = filters.analysis_lowpass.iter().sum();
    255.0 * libm::pow(dc * dc, levels as f64)
}

/// Reads a `width x height` watermark from a lowpass band.
pub fn extract_coefficients(
    lowpass: &Band,
    cfg: &EmbedConfig,
    width: usize,
    height: usize,
) -> Result<WatermarkBits> {
    cfg.validate()?;
    let positions = bit_positions(lowpass.len(), width * height, cfg.seed)?;
    let bits = positions
        .iter()
        .map(|&p| extract_value(lowpass.values()[p], cfg.q))
        .collect();
    WatermarkBits::new(width, height, bits)
}

/// Lowpass band of an image under `cfg`.
pub fn lowpass_of(img: &GrayImage, cfg: &CtConfig) -> Result<Band> {
    cfg.check_dims(img.height(), img.width())?;
    Ok(lp_analyze(&img.to_band(), cfg.lp_levels(), &FilterSet::cdf97())?.lowpass)
}

/// Watermarked 8-bit image.
pub fn embed(cover: &GrayImage, wm: &WatermarkBits, cfg: &EmbedConfig) -> Result<GrayImage> {
    cfg.validate()?;
    cfg.ct_config.check_dims(cover.height(), cover.width())?;
    let filters = FilterSet::cdf97();
    let levels = cfg.ct_config.lp_levels();
    let mut pyr = lp_analyze(&cover.to_band(), levels, &filters)?;
    let positions = bit_positions(pyr.lowpass.len(), wm.len(), cfg.seed)?;
    embed_coefficients_within(
        &mut pyr.lowpass,
        wm,
        cfg,
        0.0,
        lowpass_peak(&filters, levels),
    )?;
    let targets: Vec<f64> = positions.iter().map(|&p| pyr.lowpass.values()[p]).collect();
    let mut marked = GrayImage::from_band(&lp_synthesize(&pyr, &filters)?).materialize();
    for _ in 0..REFINE_PASSES {
        let got = lowpass_of(&marked, &cfg.ct_config)?;
        let mut clean = true;
        for ((&p, &t), &bit) in positions.iter().zip(&targets).zip(wm.bits()) {
            let miss = t - got.values()[p];
            if miss.abs() > TARGET_TOLERANCE || extract_value(got.values()[p], cfg.q) != bit {
                clean = false;
                pyr.lowpass.values_mut()[p] += miss;
            }
        }
        if clean {
            break;
        }
        marked = GrayImage::from_band(&lp_synthesize(&pyr, &filters)?).materialize();
    }
    Ok(marked)
}

/// The pixel change of a single mark is mostly below half a grey level, so
/// rounding to 8 bits (and clipping in dark or saturated regions) moves
/// marked coefficients off their targets. Each pass adds the shortfall of
/// every coefficient that reads the wrong bit or lies further than
/// `TARGET_TOLERANCE` from its target back onto the lowpass band.
const REFINE_PASSES: usize = 16;
const TARGET_TOLERANCE: f64 = 1.0;

pub fn extract(
    img: &GrayImage,
    cfg: &EmbedConfig,
    width: usize,
    height: usize,
) -> Result<WatermarkBits> {
    extract_coefficients(&lowpass_of(img, &cfg.ct_config)?, cfg, width, height)
}

/// `sum(a b) / sum(a^2)` over the bit matrices. With an all-zero reference
/// the result is 1 for identical inputs and 0 otherwise.
pub fn ncc(a: &WatermarkBits, b: &WatermarkBits) -> Result<f64> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch {
            expected_rows: a.height(),
            expected_cols: a.width(),
            rows: b.height(),
            cols: b.width(),
        });
    }
    let aa: u64 = a.bits().iter().map(|&x| u64::from(x)).sum();
    if aa == 0 {
        return Ok(if a == b { 1.0 } else { 0.0 });
    }
    let ab: u64 = a
        .bits()
        .iter()
        .zip(b.bits())
        .map(|(&x, &y)| u64::from(x & y))
        .sum();
    Ok(ab as f64 / aa as f64)
}
