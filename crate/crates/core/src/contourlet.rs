//! Contourlet transform: a Laplacian pyramid whose bandpass levels are each
//! split by a directional filter bank.
//!
//! Bands are addressed by a dense id. Id 0 is the lowpass band, followed by
//! the directional bands of the coarsest level through the finest, each level
//! in the angular order produced by [`crate::dfb`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dfb::{self, DfbDecomposition, MAX_DEPTH};
use crate::lp::{self, LpPyramid};
use crate::{Band, Error, FilterSet, GrayImage, Result};

/// Pyramid depth and per-level directional depths.
///
/// `dfb_depths[j]` is the DFB depth of LP level `j`, finest level first. The
/// number of LP levels is the length of that list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CtConfig {
    dfb_depths: Vec<usize>,
}

impl CtConfig {
    pub fn new(dfb_depths: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = dfb_depths.iter().find(|&&k| k > MAX_DEPTH) {
            return Err(Error::UnsupportedDepth(bad));
        }
        Ok(Self { dfb_depths })
    }

    /// No decomposition at all: the lowpass band is the image.
    pub fn identity() -> Self {
        Self {
            dfb_depths: Vec::new(),
        }
    }

    /// Three LP levels with 4, 2 and 4 directions (11 bands in total).
    pub fn default_three_level() -> Self {
        Self {
            dfb_depths: alloc::vec![2, 1, 2],
        }
    }

    /// Three LP levels with 4, 4 and 1 directions, finest first (ten bands).
    pub fn ten_band() -> Self {
        Self {
            dfb_depths: alloc::vec![2, 2, 0],
        }
    }

    pub fn lp_levels(&self) -> usize {
        self.dfb_depths.len()
    }

    pub fn dfb_depths(&self) -> &[usize] {
        &self.dfb_depths
    }

    /// Lowpass plus `sum 2^k` directional bands.
    pub fn band_count(&self) -> usize {
        1 + self.dfb_depths.iter().map(|&k| 1usize << k).sum::<usize>()
    }

    /// Checks that a `rows x cols` image can be decomposed with this config.
    pub fn check_dims(&self, rows: usize, cols: usize) -> Result<()> {
        lp::check_dims(rows, cols, self.lp_levels())?;
        for (j, &k) in self.dfb_depths.iter().enumerate() {
            dfb::check_shape(rows >> j, cols >> j, k)?;
        }
        Ok(())
    }

    /// Shapes of all bands, in band-id order.
    pub fn band_shapes(&self, rows: usize, cols: usize) -> Result<Vec<(usize, usize)>> {
        self.check_dims(rows, cols)?;
        let n = self.lp_levels();
        let mut shapes = Vec::with_capacity(self.band_count());
        shapes.push((rows >> n, cols >> n));
        for j in (0..n).rev() {
            shapes.extend(dfb::subband_shapes(
                rows >> j,
                cols >> j,
                self.dfb_depths[j],
            )?);
        }
        Ok(shapes)
    }

    /// Labels of all bands, in band-id order.
    pub fn band_labels(&self) -> Vec<BandLabel> {
        let mut labels = Vec::with_capacity(self.band_count());
        labels.push(BandLabel::Lowpass);
        for level in (0..self.lp_levels()).rev() {
            for direction in 0..1usize << self.dfb_depths[level] {
                labels.push(BandLabel::Directional { level, direction });
            }
        }
        labels
    }
}

impl Default for CtConfig {
    fn default() -> Self {
        Self::default_three_level()
    }
}

impl fmt::Display for CtConfig {
    /// Comma-separated DFB depths, finest level first; `-` for no levels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dfb_depths.is_empty() {
            return f.write_str("-");
        }
        for (i, k) in self.dfb_depths.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

impl FromStr for CtConfig {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `2,1,2` or `-`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Self::identity());
        }
        let depths = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidConfig(alloc::format!("bad DFB depth {p:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(depths)
    }
}

/// What a band id refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BandLabel {
    Lowpass,
    /// `level` 0 is the finest LP level.
    Directional {
        level: usize,
        direction: usize,
    },
}

impl fmt::Display for BandLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BandLabel::Lowpass => f.write_str("lowpass"),
            BandLabel::Directional { level, direction } => write!(f, "L{level}D{direction}"),
        }
    }
}

/// Contourlet coefficients of one image.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourletPyramid {
    pub config: CtConfig,
    /// Image size.
    pub rows: usize,
    pub cols: usize,
    pub lowpass: Band,
    /// `directional[j]` holds the `2^dfb_depths[j]` subbands of LP level `j`.
    pub directional: Vec<Vec<Band>>,
}

impl ContourletPyramid {
    /// Reassembles a pyramid from bands in band-id order.
    pub fn from_bands(
        config: CtConfig,
        rows: usize,
        cols: usize,
        bands: Vec<Band>,
    ) -> Result<Self> {
        let shapes = config.band_shapes(rows, cols)?;
        if bands.len() != shapes.len() {
            return Err(Error::Structure(alloc::format!(
                "expected {} bands, got {}",
                shapes.len(),
                bands.len()
            )));
        }
        for (band, &(r, c)) in bands.iter().zip(&shapes) {
            band.expect_shape(r, c)?;
        }
        let n = config.lp_levels();
        let mut it = bands.into_iter();
        let lowpass = it.next().ok_or(Error::Empty)?;
        let mut directional: Vec<Vec<Band>> = alloc::vec![Vec::new(); n];
        for j in (0..n).rev() {
            directional[j] = it.by_ref().take(1 << config.dfb_depths[j]).collect();
        }
        Ok(Self {
            config,
            rows,
            cols,
            lowpass,
            directional,
        })
    }

    pub fn band_count(&self) -> usize {
        1 + self.directional.iter().map(Vec::len).sum::<usize>()
    }

    /// Total number of coefficients over all bands.
    pub fn coefficient_count(&self) -> usize {
        self.bands().map(|(_, b)| b.len()).sum()
    }

    /// `(band_id, band)` pairs in band-id order.
    pub fn bands(&self) -> impl Iterator<Item = (usize, &Band)> + '_ {
        core::iter::once(&self.lowpass)
            .chain(self.directional.iter().rev().flatten())
            .enumerate()
    }

    pub fn bands_mut(&mut self) -> impl Iterator<Item = (usize, &mut Band)> + '_ {
        core::iter::once(&mut self.lowpass)
            .chain(self.directional.iter_mut().rev().flatten())
            .enumerate()
    }

    pub fn into_bands(self) -> Vec<Band> {
        let mut out = Vec::with_capacity(self.band_count());
        out.push(self.lowpass);
        out.extend(self.directional.into_iter().rev().flatten());
        out
    }

    /// Applies `f` to every band, keeping the structure.
    pub fn map_bands(&self, mut f: impl FnMut(usize, &Band) -> Band) -> Result<Self> {
        let bands = self.bands().map(|(id, b)| f(id, b)).collect();
        Self::from_bands(self.config.clone(), self.rows, self.cols, bands)
    }

    pub fn labels(&self) -> Vec<BandLabel> {
        self.config.band_labels()
    }
}

/// `(band_id, band)` pairs in band-id order.
pub fn band_iter(pyr: &ContourletPyramid) -> impl Iterator<Item = (usize, &Band)> + '_ {
    pyr.bands()
}

pub fn ct_forward(img: &GrayImage, cfg: &CtConfig) -> Result<ContourletPyramid> {
    ct_forward_with(&img.to_band(), cfg, &FilterSet::cdf97())
}

pub fn ct_forward_with(
    input: &Band,
    cfg: &CtConfig,
    filters: &FilterSet,
) -> Result<ContourletPyramid> {
    cfg.check_dims(input.rows(), input.cols())?;
    let LpPyramid { lowpass, bandpass } = lp::lp_analyze(input, cfg.lp_levels(), filters)?;
    let directional = bandpass
        .iter()
        .zip(cfg.dfb_depths())
        .map(|(b, &k)| dfb::dfb_analyze_with(b, k, filters).map(|d| d.subbands))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContourletPyramid {
        config: cfg.clone(),
        rows: input.rows(),
        cols: input.cols(),
        lowpass,
        directional,
    })
}

/// Inverse transform. The result is real-valued; rounding to 8 bits happens
/// only in [`GrayImage::materialize`].
pub fn ct_inverse(pyr: &ContourletPyramid) -> Result<GrayImage> {
    ct_inverse_with(pyr, &FilterSet::cdf97()).map(|b| GrayImage::from_band(&b))
}

pub fn ct_inverse_with(pyr: &ContourletPyramid, filters: &FilterSet) -> Result<Band> {
    let cfg = &pyr.config;
    if pyr.directional.len() != cfg.lp_levels() {
        return Err(Error::Structure(alloc::format!(
            "{} directional levels for a {}-level config",
            pyr.directional.len(),
            cfg.lp_levels()
        )));
    }
    let n = cfg.lp_levels();
    cfg.check_dims(pyr.rows, pyr.cols)?;
    pyr.lowpass.expect_shape(pyr.rows >> n, pyr.cols >> n)?;
    let bandpass = pyr
        .directional
        .iter()
        .enumerate()
        .map(|(j, subbands)| {
            dfb::dfb_synthesize_with(
                &DfbDecomposition {
                    depth: cfg.dfb_depths()[j],
                    rows: pyr.rows >> j,
                    cols: pyr.cols >> j,
                    subbands: subbands.clone(),
                },
                filters,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    lp::lp_synthesize(
        &LpPyramid {
            lowpass: pyr.lowpass.clone(),
            bandpass,
        },
        filters,
    )
}

/// Human-readable band summary, one `id label rows x cols` line per band.
pub fn describe(cfg: &CtConfig, rows: usize, cols: usize) -> Result<String> {
    use core::fmt::Write;
    let mut out = String::new();
    for (id, (label, (r, c))) in cfg
        .band_labels()
        .into_iter()
        .zip(cfg.band_shapes(rows, cols)?)
        .enumerate()
    {
        let _ = writeln!(out, "{id} {label} {r}x{c}");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(rows: usize, cols: usize, seed: u64) -> Band {
        let mut s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
        Band::from_fn(rows, cols, |_, _| {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 * 255.0
        })
    }

    #[test]
    fn config_parsing_roundtrip() {
        for s in ["2,1,2", "0", "-", "4,3,2,1"] {
            let cfg: CtConfig = s.parse().unwrap();
            assert_eq!(cfg.to_string(), s);
        }
        assert_eq!("5".parse::<CtConfig>(), Err(Error::UnsupportedDepth(5)));
        assert!("2,x".parse::<CtConfig>().is_err());
    }

    #[test]
    fn band_counts() {
        assert_eq!(CtConfig::default().band_count(), 11);
        assert_eq!(CtConfig::ten_band().band_count(), 10);
        assert_eq!(CtConfig::identity().band_count(), 1);
    }

    #[test]
    fn identity_config_keeps_the_image() {
        let x = noise(8, 8, 1);
        let pyr = ct_forward_with(&x, &CtConfig::identity(), &FilterSet::cdf97()).unwrap();
        assert_eq!(pyr.lowpass, x);
        assert!(pyr.directional.is_empty());
        assert_eq!(pyr.bands().count(), 1);
    }

    #[test]
    fn shapes_for_512() {
        let shapes = CtConfig::default().band_shapes(512, 512).unwrap();
        assert_eq!(shapes.len(), 11);
        assert_eq!(shapes[0], (64, 64));
        assert_eq!(&shapes[1..5], &[(64, 64); 4]);
        assert_eq!(&shapes[5..7], &[(128, 256); 2]);
        assert_eq!(&shapes[7..], &[(256, 256); 4]);
    }

    #[test]
    fn bands_roundtrip_through_from_bands() {
        let x = noise(32, 32, 3);
        let pyr = ct_forward_with(&x, &CtConfig::default(), &FilterSet::cdf97()).unwrap();
        let ids: Vec<usize> = pyr.bands().map(|(id, _)| id).collect();
        assert_eq!(ids, (0..11).collect::<Vec<_>>());
        let rebuilt =
            ContourletPyramid::from_bands(pyr.config.clone(), 32, 32, pyr.clone().into_bands())
                .unwrap();
        assert_eq!(rebuilt, pyr);
    }

    #[test]
    fn perfect_reconstruction() {
        for cfg in ["1", "1,2", "2,1,2", "2,2,0", "3,4"] {
            let cfg: CtConfig = cfg.parse().unwrap();
            let x = noise(64, 64, 7);
            let pyr = ct_forward_with(&x, &cfg, &FilterSet::cdf97()).unwrap();
            let y = ct_inverse_with(&pyr, &FilterSet::cdf97()).unwrap();
            assert!(y.max_abs_diff(&x) < 1e-8, "{cfg}");
        }
    }

    #[test]
    fn rejects_bad_structure() {
        let x = noise(32, 32, 5);
        let mut pyr = ct_forward_with(&x, &CtConfig::default(), &FilterSet::cdf97()).unwrap();
        pyr.directional[1].pop();
        assert!(ct_inverse(&pyr).is_err());
        assert!(CtConfig::default().check_dims(36, 36).is_err());
    }
}
