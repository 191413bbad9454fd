//! Laplacian pyramid analysis and synthesis.
//!
//! One level: separable 9-7 lowpass filtering with whole-sample symmetric
//! extension, dyadic downsampling (even samples kept), then interpolation of
//! the coarse band back to full size (zeros at odd positions, synthesis
//! lowpass) to form the prediction. The bandpass image is the prediction
//! error. Reconstruction adds the prediction back, so it is exact for any
//! filter pair.

use alloc::vec;
use alloc::vec::Vec;

use crate::filters::{convolve_at, reflect};
use crate::{Band, Error, FilterSet, Result};

/// A Laplacian pyramid. `bandpass[0]` is the finest level and has the shape
/// of the input; `bandpass[j]` has the shape of the signal entering level `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpPyramid {
    pub lowpass: Band,
    pub bandpass: Vec<Band>,
}

impl LpPyramid {
    pub fn levels(&self) -> usize {
        self.bandpass.len()
    }
}

/// Checks that `rows x cols` supports `levels` dyadic reductions.
pub fn check_dims(rows: usize, cols: usize, levels: usize) -> Result<()> {
    if levels >= usize::BITS as usize {
        return Err(Error::TooManyLevels { levels, rows, cols });
    }
    let divisor = 1usize << levels;
    if !rows.is_multiple_of(divisor) || !cols.is_multiple_of(divisor) {
        return Err(Error::NotDivisible {
            rows,
            cols,
            divisor,
        });
    }
    if levels > 0 && (rows / divisor < 2 || cols / divisor < 2) {
        return Err(Error::TooManyLevels { levels, rows, cols });
    }
    Ok(())
}

pub fn lp_analyze(input: &Band, levels: usize, filters: &FilterSet) -> Result<LpPyramid> {
    check_dims(input.rows(), input.cols(), levels)?;
    let mut current = input.clone();
    let mut bandpass = Vec::with_capacity(levels);
    for _ in 0..levels {
        let coarse = reduce(&current, &filters.analysis_lowpass);
        let prediction = expand(
            &coarse,
            &filters.synthesis_lowpass,
            current.rows(),
            current.cols(),
        );
        bandpass.push(current.sub(&prediction)?);
        current = coarse;
    }
    Ok(LpPyramid {
        lowpass: current,
        bandpass,
    })
}

pub fn lp_synthesize(pyr: &LpPyramid, filters: &FilterSet) -> Result<Band> {
    let mut current = pyr.lowpass.clone();
    for band in pyr.bandpass.iter().rev() {
        if band.rows() != 2 * current.rows() || band.cols() != 2 * current.cols() {
            return Err(Error::Structure(alloc::format!(
                "bandpass level of {}x{} above a {}x{} coarse band",
                band.rows(),
                band.cols(),
                current.rows(),
                current.cols()
            )));
        }
        let prediction = expand(
            &current,
            &filters.synthesis_lowpass,
            band.rows(),
            band.cols(),
        );
        current = prediction.add(band)?;
    }
    Ok(current)
}

/// Separable lowpass filtering followed by 2x downsampling in each axis.
pub fn reduce(x: &Band, taps: &[f64]) -> Band {
    let (rows, cols) = x.shape();
    let half_cols = cols / 2;
    let mut tmp = Vec::with_capacity(rows * half_cols);
    for r in 0..rows {
        let row = x.row(r);
        tmp.extend((0..half_cols).map(|n| convolve_at(row, taps, 2 * n as i64)));
    }
    let half_rows = rows / 2;
    let mut out = vec![0.0; half_rows * half_cols];
    let mut column = vec![0.0; rows];
    for c in 0..half_cols {
        for r in 0..rows {
            column[r] = tmp[r * half_cols + c];
        }
        for n in 0..half_rows {
            out[n * half_cols + c] = convolve_at(&column, taps, 2 * n as i64);
        }
    }
    Band::new(half_rows, half_cols, out).expect("shape is consistent")
}

/// Zero-insertion upsampling to `rows x cols` followed by separable
/// interpolation with `taps`.
pub fn expand(x: &Band, taps: &[f64], rows: usize, cols: usize) -> Band {
    let in_rows = x.rows();
    let mut tmp = Vec::with_capacity(in_rows * cols);
    for r in 0..in_rows {
        let row = x.row(r);
        tmp.extend((0..cols).map(|m| interpolate_at(row, taps, m as i64, cols)));
    }
    let mut out = vec![0.0; rows * cols];
    let mut column = vec![0.0; in_rows];
    for c in 0..cols {
        for r in 0..in_rows {
            column[r] = tmp[r * cols + c];
        }
        for m in 0..rows {
            out[m * cols + c] = interpolate_at(&column, taps, m as i64, rows);
        }
    }
    Band::new(rows, cols, out).expect("shape is consistent")
}

/// Value at `pos` of `taps * up(coarse)`, where `up` places `coarse[i]` at
/// `2i`, zeros at odd indices, and is symmetrically extended over `0..len`.
#[inline]
fn interpolate_at(coarse: &[f64], taps: &[f64], pos: i64, len: usize) -> f64 {
    let r = (taps.len() / 2) as i64;
    let mut acc = 0.0;
    for (idx, &t) in taps.iter().enumerate() {
        let i = reflect(pos - (idx as i64 - r), len);
        if i.is_multiple_of(2) {
            acc += t * coarse[i / 2];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_band(rows: usize, cols: usize, seed: u64) -> Band {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        Band::from_fn(rows, cols, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 255.0
        })
    }

    #[test]
    fn constant_input_has_zero_bandpass() {
        let f = FilterSet::cdf97();
        let x = Band::filled(32, 32, 117.0);
        let pyr = lp_analyze(&x, 3, &f).unwrap();
        for band in &pyr.bandpass {
            assert!(band.values().iter().all(|v| v.abs() < 1e-9));
        }
        // DC gain 2 per level in 2-D.
        assert!(pyr
            .lowpass
            .values()
            .iter()
            .all(|v| (v - 117.0 * 8.0).abs() < 1e-9));
    }

    #[test]
    fn shapes_follow_levels() {
        let f = FilterSet::cdf97();
        let pyr = lp_analyze(&Band::zeros(512, 512), 3, &f).unwrap();
        assert_eq!(pyr.lowpass.shape(), (64, 64));
        let shapes: Vec<_> = pyr.bandpass.iter().map(Band::shape).collect();
        assert_eq!(shapes, [(512, 512), (256, 256), (128, 128)]);
    }

    #[test]
    fn zero_levels_is_identity() {
        let f = FilterSet::cdf97();
        let x = random_band(6, 10, 3);
        let pyr = lp_analyze(&x, 0, &f).unwrap();
        assert!(pyr.bandpass.is_empty());
        assert_eq!(pyr.lowpass, x);
        assert_eq!(lp_synthesize(&pyr, &f).unwrap(), x);
    }

    #[test]
    fn rejects_bad_dims() {
        let f = FilterSet::cdf97();
        assert!(matches!(
            lp_analyze(&Band::zeros(12, 16), 3, &f),
            Err(Error::NotDivisible { divisor: 8, .. })
        ));
        assert!(matches!(
            lp_analyze(&Band::zeros(8, 8), 3, &f),
            Err(Error::TooManyLevels { .. })
        ));
    }

    #[test]
    fn constant_lowpass_only_pyramid_synthesizes_constant() {
        let f = FilterSet::cdf97();
        let pyr = LpPyramid {
            lowpass: Band::filled(4, 4, 8.0),
            bandpass: vec![Band::zeros(16, 16), Band::zeros(8, 8)],
        };
        let out = lp_synthesize(&pyr, &f).unwrap();
        assert!(out.values().iter().all(|v| (v - 2.0).abs() < 1e-9));
    }

    #[test]
    fn synthesis_rejects_inconsistent_levels() {
        let f = FilterSet::cdf97();
        let pyr = LpPyramid {
            lowpass: Band::zeros(4, 4),
            bandpass: vec![Band::zeros(10, 8)],
        };
        assert!(lp_synthesize(&pyr, &f).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn perfect_reconstruction(seed in any::<u64>(), levels in 0usize..4, rk in 1usize..3, ck in 1usize..3) {
            let f = FilterSet::cdf97();
            let rows = 16 * rk;
            let cols = 16 * ck;
            let x = random_band(rows, cols, seed);
            let pyr = lp_analyze(&x, levels, &f).unwrap();
            prop_assert_eq!(pyr.levels(), levels);
            let y = lp_synthesize(&pyr, &f).unwrap();
            prop_assert!(y.max_abs_diff(&x) < 1e-8);
        }

        #[test]
        fn linearity(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let f = FilterSet::cdf97();
            let x = random_band(32, 32, seed);
            let y = random_band(32, 32, seed ^ 0xdead_beef);
            let combo = Band::from_fn(32, 32, |r, c| a * x[(r, c)] + b * y[(r, c)]);
            let px = lp_analyze(&x, 2, &f).unwrap();
            let py = lp_analyze(&y, 2, &f).unwrap();
            let pc = lp_analyze(&combo, 2, &f).unwrap();
            let bands = |p: &LpPyramid| -> Vec<Band> {
                let mut v = p.bandpass.clone();
                v.push(p.lowpass.clone());
                v
            };
            for ((bx, by), bc) in bands(&px).iter().zip(bands(&py)).zip(bands(&pc)) {
                let expected = Band::from_fn(bx.rows(), bx.cols(), |r, c| a * bx[(r, c)] + b * by[(r, c)]);
                prop_assert!(expected.max_abs_diff(&bc) < 1e-9);
            }
        }
    }
}
