//! Lossless coding of the lowpass band.
//!
//! The band is re-ordered along a clockwise inward square spiral starting at
//! the top-left corner, the spiral sequence is written back in row-major
//! order, and the result is coded by West prediction along one continuous
//! raster path: the first residual is the value itself, every later residual
//! is the difference to the previously scanned value (across row ends too).

use alloc::vec::Vec;

use crate::metrics::entropy_i64;
use crate::{Band, Error, Result};

/// Prediction residuals in raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualMatrix {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<i64>,
}

/// Visiting order of the clockwise inward spiral over an `n x n` grid, as
/// row-major indices.
pub fn spiral_order(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n * n);
    let (mut top, mut left) = (0usize, 0usize);
    let (mut bottom, mut right) = (n, n);
    while top < bottom && left < right {
        order.extend((left..right).map(|c| top * n + c));
        top += 1;
        order.extend((top..bottom).map(|r| r * n + right - 1));
        right -= 1;
        if top < bottom {
            order.extend((left..right).rev().map(|c| (bottom - 1) * n + c));
            bottom -= 1;
        }
        if left < right {
            order.extend((top..bottom).rev().map(|r| r * n + left));
            left += 1;
        }
    }
    order
}

fn square_side(band: &Band) -> Result<usize> {
    if band.rows() != band.cols() {
        return Err(Error::NotSquare {
            rows: band.rows(),
            cols: band.cols(),
        });
    }
    Ok(band.rows())
}

pub fn reorder(band: &Band) -> Result<Band> {
    let n = square_side(band)?;
    let v = band.values();
    Band::new(n, n, spiral_order(n).into_iter().map(|i| v[i]).collect())
}

pub fn inverse_reorder(band: &Band) -> Result<Band> {
    let n = square_side(band)?;
    let mut out = alloc::vec![0.0; n * n];
    for (&dst, &v) in spiral_order(n).iter().zip(band.values()) {
        out[dst] = v;
    }
    Band::new(n, n, out)
}

fn to_integer(v: f64) -> Result<i64> {
    if !v.is_finite() || libm::trunc(v) != v || v.abs() > (1u64 << 53) as f64 {
        return Err(Error::NonInteger(v));
    }
    Ok(v as i64)
}

/// West prediction over the raster path of an integer-valued band.
pub fn predict_encode(band: &Band) -> Result<ResidualMatrix> {
    let mut previous = 0i64;
    let values = band
        .values()
        .iter()
        .map(|&v| {
            let p = to_integer(v)?;
            let r = p - previous;
            previous = p;
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ResidualMatrix {
        rows: band.rows(),
        cols: band.cols(),
        values,
    })
}

/// Prefix sum along the raster path; exact inverse of [`predict_encode`].
pub fn predict_decode(res: &ResidualMatrix) -> Result<Band> {
    let mut acc = 0i64;
    let values = res
        .values
        .iter()
        .map(|&r| {
            acc += r;
            acc as f64
        })
        .collect();
    Band::new(res.rows, res.cols, values)
}

/// Spiral re-ordering followed by West prediction.
pub fn encode(band: &Band) -> Result<ResidualMatrix> {
    predict_encode(&reorder(band)?)
}

/// Inverse of [`encode`].
pub fn decode(res: &ResidualMatrix) -> Result<Band> {
    inverse_reorder(&predict_decode(res)?)
}

/// Empirical entropy of the residuals in bits per coefficient.
pub fn residual_entropy(res: &ResidualMatrix) -> Result<f64> {
    if res.values.is_empty() {
        return Err(Error::Empty);
    }
    Ok(entropy_i64(&res.values))
}
