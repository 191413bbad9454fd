//! The `CTC1` compressed-image container.
//!
//! All integers are little-endian.
//!
//! | field            | type                 |
//! |------------------|----------------------|
//! | magic            | `b"CTC1"`            |
//! | width, height    | `u32`, `u32`         |
//! | LP level count   | `u8`                 |
//! | DFB depths       | `u8` per level, finest first |
//! | divisors         | `f32` per band       |
//! | payload          | `i32` per coefficient, band by band in band-id order |
//! | checksum         | `u32` CRC-32 of all preceding bytes |
//!
//! The lowpass payload holds the spiral/West prediction residuals of its
//! quantization indices; the directional payloads hold the indices in
//! row-major order. Band shapes follow from the image size and the depths.

use ctwm_core::contourlet::CtConfig;
use ctwm_core::lowpass_codec::{self, ResidualMatrix};
use ctwm_core::quantizer::{QuantBand, QuantSpec, QuantizedPyramid};

pub const MAGIC: [u8; 4] = *b"CTC1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContainerError {
    #[error("not a CTC container")]
    BadMagic,
    #[error("unsupported container version {0:?}")]
    UnsupportedVersion(char),
    #[error("container truncated")]
    Truncated,
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("{0} unexpected bytes after the payload")]
    TrailingBytes(usize),
    #[error("invalid container: {0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, ContainerError>;

fn invalid(e: impl std::fmt::Display) -> ContainerError {
    ContainerError::Invalid(e.to_string())
}

fn to_i32(v: i64) -> Result<i32> {
    i32::try_from(v).map_err(|_| invalid(format!("value {v} does not fit 32 bits")))
}

pub fn encode(q: &QuantizedPyramid, spec: &QuantSpec) -> Result<Vec<u8>> {
    q.validate().map_err(invalid)?;
    if spec.divisors.len() != q.bands.len() {
        return Err(invalid(format!(
            "{} divisors for {} bands",
            spec.divisors.len(),
            q.bands.len()
        )));
    }
    let depths = q.config.dfb_depths();
    let mut out = Vec::with_capacity(16 + 4 * q.bands.iter().map(QuantBand::len).sum::<usize>());
    out.extend_from_slice(&MAGIC);
    for dim in [q.cols, q.rows] {
        let dim = u32::try_from(dim).map_err(|_| invalid("image too large"))?;
        out.extend_from_slice(&dim.to_le_bytes());
    }
    out.push(u8::try_from(depths.len()).map_err(|_| invalid("too many levels"))?);
    out.extend(depths.iter().map(|&k| k as u8));
    for &d in &spec.divisors {
        let f = d as f32;
        if f64::from(f) != d {
            return Err(invalid(format!("divisor {d} is not representable as f32")));
        }
        out.extend_from_slice(&f.to_le_bytes());
    }
    for (id, band) in q.bands.iter().enumerate() {
        if id == 0 {
            let residuals = lowpass_codec::encode(&band.to_band()).map_err(invalid)?;
            for v in residuals.values {
                out.extend_from_slice(&to_i32(v)?.to_le_bytes());
            }
        } else {
            for &v in &band.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos.checked_add(N).ok_or(ContainerError::Truncated)?;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or(ContainerError::Truncated)?;
        self.pos = end;
        Ok(chunk.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn i32(&mut self) -> Result<i32> {
        Ok(i32::from_le_bytes(self.take()?))
    }

    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take()?))
    }
}

pub fn decode(bytes: &[u8]) -> Result<(QuantizedPyramid, QuantSpec)> {
    if bytes.len() < 4 || bytes[..3] != MAGIC[..3] {
        return Err(ContainerError::BadMagic);
    }
    if bytes[3] != MAGIC[3] {
        return Err(ContainerError::UnsupportedVersion(char::from(bytes[3])));
    }
    if bytes.len() < MAGIC.len() + 4 {
        return Err(ContainerError::Truncated);
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().expect("four bytes"));
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(ContainerError::Checksum { stored, computed });
    }

    let mut r = Reader {
        bytes: body,
        pos: MAGIC.len(),
    };
    let cols = r.u32()? as usize;
    let rows = r.u32()? as usize;
    let levels = r.u8()? as usize;
    let depths = (0..levels)
        .map(|_| r.u8().map(usize::from))
        .collect::<Result<Vec<_>>>()?;
    let config = CtConfig::new(depths).map_err(invalid)?;
    let shapes = config.band_shapes(rows, cols).map_err(invalid)?;
    let divisors = (0..shapes.len())
        .map(|_| r.f32().map(f64::from))
        .collect::<Result<Vec<_>>>()?;
    let spec = QuantSpec::new(divisors).map_err(invalid)?;
    let payload: usize = shapes.iter().map(|(h, w)| h * w).sum();
    if body.len() - r.pos < 4 * payload {
        return Err(ContainerError::Truncated);
    }
    let mut bands = Vec::with_capacity(shapes.len());
    for (id, &(h, w)) in shapes.iter().enumerate() {
        let raw = (0..h * w).map(|_| r.i32()).collect::<Result<Vec<_>>>()?;
        let values = if id == 0 {
            let res = ResidualMatrix {
                rows: h,
                cols: w,
                values: raw.into_iter().map(i64::from).collect(),
            };
            lowpass_codec::decode(&res)
                .map_err(invalid)?
                .values()
                .iter()
                .map(|&v| to_i32(v as i64))
                .collect::<Result<Vec<_>>>()?
        } else {
            raw
        };
        bands.push(QuantBand {
            rows: h,
            cols: w,
            values,
        });
    }
    if r.pos != body.len() {
        return Err(ContainerError::TrailingBytes(body.len() - r.pos));
    }
    Ok((
        QuantizedPyramid {
            config,
            rows,
            cols,
            bands,
        },
        spec,
    ))
}
