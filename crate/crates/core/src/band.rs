//! Real-valued coefficient matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// A dense row-major matrix of real coefficients: an image, a lowpass or
/// bandpass pyramid level, or a directional subband.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl Band {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if values.len() != rows * cols {
            return Err(Error::Structure(alloc::format!(
                "{} values for a {}x{} band",
                values.len(),
                rows,
                cols
            )));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        assert!(rows > 0 && cols > 0, "bands are never empty");
        Self {
            rows,
            cols,
            values: vec![value; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(r, c));
            }
        }
        Self { rows, cols, values }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Element-wise `self - other`.
    pub fn sub(&self, other: &Band) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Element-wise `self + other`.
    pub fn add(&self, other: &Band) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Band, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.expect_shape(other.rows, other.cols)?;
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn expect_shape(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows != rows || self.cols != cols {
            return Err(Error::DimensionMismatch {
                expected_rows: rows,
                expected_cols: cols,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Band) -> f64 {
        assert_eq!(self.shape(), other.shape());
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| f64::max(m, libm::fabs(a - b)))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }
}

impl Index<(usize, usize)> for Band {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.values[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Band {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.values[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length() {
        assert!(Band::new(2, 2, vec![0.0; 3]).is_err());
        assert_eq!(Band::new(0, 2, vec![]), Err(Error::Empty));
    }

    #[test]
    fn transpose_swaps_axes() {
        let b = Band::from_fn(2, 3, |r, c| (r * 3 + c) as f64);
        let t = b.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t[(2, 1)], b[(1, 2)]);
    }
}
