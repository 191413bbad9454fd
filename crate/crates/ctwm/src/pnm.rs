//! 8-bit PGM images and PBM watermark logos.

use std::io::Cursor;
use std::path::Path;

use ctwm_core::{GrayImage, WatermarkBits};
use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{CliError, CliResult};
use crate::fsutil::{read_file, write_atomic};

fn decode(bytes: &[u8], what: &str) -> CliResult<image::DynamicImage> {
    ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| CliError::Format(format!("{what}: {e}")))?
        .decode()
        .map_err(|e| CliError::Format(format!("{what}: {e}")))
}

/// Parses an 8-bit grayscale PGM (P2 or P5).
pub fn parse_pgm(bytes: &[u8]) -> CliResult<GrayImage> {
    let img = decode(bytes, "PGM")?;
    if img.color() != ColorType::L8 {
        return Err(CliError::Format(format!(
            "expected an 8-bit grayscale image, found {:?}",
            img.color()
        )));
    }
    let luma = img.into_luma8();
    let (w, h) = luma.dimensions();
    Ok(GrayImage::from_u8(w as usize, h as usize, luma.as_raw())?)
}

/// Binary (P5) PGM bytes of an image, after 8-bit materialization.
pub fn encode_pgm(img: &GrayImage) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Graymap(SampleEncoding::Binary))
        .write_image(
            &img.to_u8(),
            img.width() as u32,
            img.height() as u32,
            ExtendedColorType::L8,
        )
        .map_err(|e| CliError::Format(format!("PGM encoding: {e}")))?;
    Ok(out)
}

/// Parses a PBM (P1 or P4). Black pixels (PBM value 1) are watermark bit 1.
pub fn parse_pbm(bytes: &[u8]) -> CliResult<WatermarkBits> {
    if !(bytes.starts_with(b"P1") || bytes.starts_with(b"P4")) {
        return Err(CliError::Format("expected a PBM bitmap (P1 or P4)".into()));
    }
    let luma = decode(bytes, "PBM")?.into_luma8();
    let (w, h) = luma.dimensions();
    let bits = luma.as_raw().iter().map(|&v| u8::from(v == 0)).collect();
    Ok(WatermarkBits::new(w as usize, h as usize, bits)?)
}

/// Binary (P4) PBM bytes of a watermark.
pub fn encode_pbm(wm: &WatermarkBits) -> CliResult<Vec<u8>> {
    let samples: Vec<u8> = wm.bits().iter().map(|&b| 1 - b).collect();
    let mut out = Vec::new();
    PnmEncoder::new(&mut out)
        .with_subtype(PnmSubtype::Bitmap(SampleEncoding::Binary))
        .write_image(
            &samples,
            wm.width() as u32,
            wm.height() as u32,
            ExtendedColorType::L8,
        )
        .map_err(|e| CliError::Format(format!("PBM encoding: {e}")))?;
    Ok(out)
}

pub fn read_pgm(path: &Path) -> CliResult<GrayImage> {
    parse_pgm(&read_file(path)?).map_err(|e| e.with_path(path))
}

pub fn write_pgm(path: &Path, img: &GrayImage) -> CliResult<()> {
    write_atomic(path, &encode_pgm(img)?)
}

pub fn read_pbm(path: &Path) -> CliResult<WatermarkBits> {
    parse_pbm(&read_file(path)?).map_err(|e| e.with_path(path))
}

pub fn write_pbm(path: &Path, wm: &WatermarkBits) -> CliResult<()> {
    write_atomic(path, &encode_pbm(wm)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_roundtrip() {
        let img = GrayImage::from_fn(5, 3, |r, c| (r * 40 + c * 7) as f64);
        let back = parse_pgm(&encode_pgm(&img).unwrap()).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn ascii_pgm() {
        let img = parse_pgm(b"P2\n2 2\n255\n0 10\n200 255\n").unwrap();
        assert_eq!(img.to_u8(), [0, 10, 200, 255]);
    }

    #[test]
    fn pbm_roundtrip_and_polarity() {
        let wm = WatermarkBits::new(3, 2, vec![1, 0, 0, 1, 1, 0]).unwrap();
        let bytes = encode_pbm(&wm).unwrap();
        assert!(bytes.starts_with(b"P4"));
        assert_eq!(parse_pbm(&bytes).unwrap(), wm);
        let ascii = parse_pbm(b"P1\n3 1\n1 0 1\n").unwrap();
        assert_eq!(ascii.bits(), &[1, 0, 1]);
    }

    #[test]
    fn rejects_wrong_kinds() {
        assert!(matches!(
            parse_pgm(b"not an image"),
            Err(CliError::Format(_))
        ));
        assert!(matches!(
            parse_pbm(b"P5\n1 1\n255\n\x00"),
            Err(CliError::Format(_))
        ));
        assert!(matches!(
            parse_pgm(b"P6\n1 1\n255\n\x00\x00\x00"),
            Err(CliError::Format(_))
        ));
    }
}
