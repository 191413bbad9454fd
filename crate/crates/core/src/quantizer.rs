//! Energy-driven scalar quantization of contourlet bands and the entropy
//! based bit accounting of the compressed image.

use alloc::vec::Vec;

use crate::contourlet::{ct_forward, ct_inverse, ContourletPyramid, CtConfig};
use crate::lowpass_codec;
use crate::metrics::{compression_ratio, entropy_i64};
use crate::{round_half_away, Band, Error, GrayImage, Result};

/// Sum of squared coefficients.
pub fn band_energy(band: &Band) -> f64 {
    band.values().iter().map(|v| v * v).sum()
}

/// One divisor per band id.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantSpec {
    pub divisors: Vec<f64>,
}

impl QuantSpec {
    pub fn new(divisors: Vec<f64>) -> Result<Self> {
        if divisors.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(d) = divisors.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
            return Err(Error::InvalidConfig(alloc::format!(
                "divisor {d} is not positive"
            )));
        }
        Ok(Self { divisors })
    }

    /// The same divisor for every band.
    pub fn uniform(bands: usize, divisor: f64) -> Result<Self> {
        Self::new(alloc::vec![divisor; bands])
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.divisors.iter().map(|d| d * factor).collect())
    }
}

/// Divisors used by [`assign_divisors`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisorRule {
    pub lowpass: f64,
    /// For directional bands at or above the median energy.
    pub high_energy: f64,
    /// For directional bands below the median energy.
    pub low_energy: f64,
}

impl Default for DivisorRule {
    fn default() -> Self {
        Self {
            lowpass: 2.0,
            high_energy: 4.0,
            low_energy: 8.0,
        }
    }
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// `energies[0]` is the lowpass band. Directional bands whose energy is at
/// least the median directional energy get the smaller divisor.
pub fn assign_divisors(energies: &[f64]) -> Result<QuantSpec> {
    assign_divisors_with(energies, &DivisorRule::default())
}

pub fn assign_divisors_with(energies: &[f64], rule: &DivisorRule) -> Result<QuantSpec> {
    let (_, directional) = energies.split_first().ok_or(Error::Empty)?;
    let mut divisors = Vec::with_capacity(energies.len());
    divisors.push(rule.lowpass);
    if !directional.is_empty() {
        let m = median(directional);
        divisors.extend(directional.iter().map(|&e| {
            if e >= m {
                rule.high_energy
            } else {
                rule.low_energy
            }
        }));
    }
    QuantSpec::new(divisors)
}

/// An integer band.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantBand {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<i32>,
}

impl QuantBand {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_band(&self) -> Band {
        Band::from_fn(self.rows, self.cols, |r, c| {
            self.values[r * self.cols + c] as f64
        })
    }
}

/// Quantization indices of every band, in band-id order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedPyramid {
    pub config: CtConfig,
    pub rows: usize,
    pub cols: usize,
    pub bands: Vec<QuantBand>,
}

impl QuantizedPyramid {
    /// Checks band count and shapes against the config and image size.
    pub fn validate(&self) -> Result<()> {
        let shapes = self.config.band_shapes(self.rows, self.cols)?;
        if shapes.len() != self.bands.len() {
            return Err(Error::Structure(alloc::format!(
                "expected {} bands, got {}",
                shapes.len(),
                self.bands.len()
            )));
        }
        for (b, &(r, c)) in self.bands.iter().zip(&shapes) {
            if (b.rows, b.cols) != (r, c) || b.values.len() != r * c {
                return Err(Error::DimensionMismatch {
                    expected_rows: r,
                    expected_cols: c,
                    rows: b.rows,
                    cols: b.cols,
                });
            }
        }
        Ok(())
    }
}

fn check_spec(count: usize, spec: &QuantSpec) -> Result<()> {
    if spec.divisors.len() != count {
        return Err(Error::Structure(alloc::format!(
            "{} divisors for {} bands",
            spec.divisors.len(),
            count
        )));
    }
    if let Some(d) = spec.divisors.iter().find(|d| d.is_nan() || **d <= 0.0) {
        return Err(Error::InvalidConfig(alloc::format!(
            "divisor {d} is not positive"
        )));
    }
    Ok(())
}

/// Divides every coefficient by its band divisor and rounds half away from
/// zero.
pub fn quantize(pyr: &ContourletPyramid, spec: &QuantSpec) -> Result<QuantizedPyramid> {
    check_spec(pyr.band_count(), spec)?;
    let bands = pyr
        .bands()
        .map(|(id, b)| {
            let d = spec.divisors[id];
            let values = b
                .values()
                .iter()
                .map(|&v| {
                    let q = round_half_away(v / d);
                    if q.abs() > i32::MAX as f64 {
                        return Err(Error::InvalidConfig(alloc::format!(
                            "quantized value {q} does not fit 32 bits"
                        )));
                    }
                    Ok(q as i32)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(QuantBand {
                rows: b.rows(),
                cols: b.cols(),
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QuantizedPyramid {
        config: pyr.config.clone(),
        rows: pyr.rows,
        cols: pyr.cols,
        bands,
    })
}

pub fn dequantize(q: &QuantizedPyramid, spec: &QuantSpec) -> Result<ContourletPyramid> {
    q.validate()?;
    check_spec(q.bands.len(), spec)?;
    let bands = q
        .bands
        .iter()
        .zip(&spec.divisors)
        .map(|(b, &d)| b.to_band().map(|v| v * d))
        .collect();
    ContourletPyramid::from_bands(q.config.clone(), q.rows, q.cols, bands)
}

/// Bit cost per band in band-id order: coefficient count times empirical
/// entropy. The lowpass band is measured on its prediction residuals.
pub fn band_bits(q: &QuantizedPyramid) -> Result<Vec<f64>> {
    q.bands
        .iter()
        .enumerate()
        .map(|(id, b)| {
            let symbols: Vec<i64> = if id == 0 {
                lowpass_codec::encode(&b.to_band())?.values
            } else {
                b.values.iter().map(|&v| v as i64).collect()
            };
            Ok(b.len() as f64 * entropy_i64(&symbols))
        })
        .collect()
}

pub fn estimate_bits(q: &QuantizedPyramid) -> Result<f64> {
    Ok(band_bits(q)?.iter().sum())
}

/// Everything the codec produces for one image.
#[derive(Debug, Clone)]
pub struct Compressed {
    pub quantized: QuantizedPyramid,
    pub spec: QuantSpec,
    pub energies: Vec<f64>,
    pub bits: f64,
}

impl Compressed {
    /// Ratio of 8 bits per pixel to the estimated bit cost.
    pub fn compression_ratio(&self) -> Result<f64> {
        let n1 = 8.0 * (self.quantized.rows * self.quantized.cols) as f64;
        compression_ratio(n1, self.bits)
    }
}

/// Forward transform, energy-based divisors (or `spec` when given),
/// quantization and bit estimation.
pub fn compress(img: &GrayImage, cfg: &CtConfig, spec: Option<&QuantSpec>) -> Result<Compressed> {
    let pyr = ct_forward(img, cfg)?;
    let energies: Vec<f64> = pyr.bands().map(|(_, b)| band_energy(b)).collect();
    let spec = match spec {
        Some(s) => s.clone(),
        None => assign_divisors(&energies)?,
    };
    let quantized = quantize(&pyr, &spec)?;
    let bits = estimate_bits(&quantized)?;
    Ok(Compressed {
        quantized,
        spec,
        energies,
        bits,
    })
}

/// Dequantization, inverse transform and 8-bit materialization.
pub fn decompress(q: &QuantizedPyramid, spec: &QuantSpec) -> Result<GrayImage> {
    Ok(ct_inverse(&dequantize(q, spec)?)?.materialize())
}
