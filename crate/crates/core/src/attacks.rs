//! Attack battery for watermark robustness experiments.
//!
//! Every attack returns an 8-bit image (integer samples in `[0, 255]`) of the
//! input's dimensions. Specs have a compact text form used on the command
//! line: `rotate:5`, `lpf`, `median`, `resize:0.5`, `jpeg:75`,
//! `sp:0.001:seed=7`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jpeg::jpeg_baseline_encode;
use crate::{Error, GrayImage, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttackSpec {
    /// Bilinear rotation by `degrees` and back.
    Rotation {
        degrees: f64,
    },
    /// 3x3 mean filter.
    LowPass,
    /// 3x3 median filter.
    Median,
    /// Bicubic downscale by `scale` and back to the original size.
    Resize {
        scale: f64,
    },
    Jpeg {
        quality: u8,
    },
    /// Each pixel independently becomes 0 or 255 with probability `density`.
    SaltPepper {
        density: f64,
        seed: u64,
    },
}

impl AttackSpec {
    /// The six attacks of the standard battery.
    pub fn battery() -> [AttackSpec; 6] {
        [
            AttackSpec::Rotation { degrees: 5.0 },
            AttackSpec::Resize { scale: 0.5 },
            AttackSpec::LowPass,
            AttackSpec::Jpeg { quality: 75 },
            AttackSpec::Median,
            AttackSpec::SaltPepper {
                density: 0.001,
                seed: 0,
            },
        ]
    }

    /// Short human-readable name.
    pub fn name(&self) -> &'static str {
        match self {
            AttackSpec::Rotation { .. } => "rotation",
            AttackSpec::LowPass => "lpf",
            AttackSpec::Median => "median",
            AttackSpec::Resize { .. } => "resize",
            AttackSpec::Jpeg { .. } => "jpeg",
            AttackSpec::SaltPepper { .. } => "salt_pepper",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidAttack(msg));
        match *self {
            AttackSpec::Rotation { degrees }
                if !(degrees.is_finite() && degrees.abs() <= 360.0) =>
            {
                bad(alloc::format!(
                    "rotation angle {degrees} outside [-360, 360]"
                ))
            }
            AttackSpec::Resize { scale } if !(scale > 0.0 && scale <= 1.0) => {
                bad(alloc::format!("resize scale {scale} outside (0, 1]"))
            }
            AttackSpec::Jpeg { quality } if quality > 100 => {
                bad(alloc::format!("JPEG quality {quality} outside 0..=100"))
            }
            AttackSpec::SaltPepper { density, .. } if !(0.0..=1.0).contains(&density) => {
                bad(alloc::format!("noise density {density} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for AttackSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttackSpec::Rotation { degrees } => write!(f, "rotate:{degrees}"),
            AttackSpec::LowPass => f.write_str("lpf"),
            AttackSpec::Median => f.write_str("median"),
            AttackSpec::Resize { scale } => write!(f, "resize:{scale}"),
            AttackSpec::Jpeg { quality } => write!(f, "jpeg:{quality}"),
            AttackSpec::SaltPepper { density, seed } => write!(f, "sp:{density}:seed={seed}"),
        }
    }
}

impl FromStr for AttackSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidAttack(String::from(s));
        let mut parts = s.trim().split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let args: Vec<&str> = parts.collect();
        let num = |i: usize| -> Result<f64> {
            args.get(i)
                .ok_or_else(bad)?
                .trim()
                .parse::<f64>()
                .map_err(|_| bad())
        };
        let spec = match (kind, args.len()) {
            ("rotate" | "rotation", 1) => AttackSpec::Rotation { degrees: num(0)? },
            ("lpf" | "mean", 0) => AttackSpec::LowPass,
            ("median", 0) => AttackSpec::Median,
            ("resize", 1) => AttackSpec::Resize { scale: num(0)? },
            ("jpeg", 1) => AttackSpec::Jpeg {
                quality: args[0].trim().parse().map_err(|_| bad())?,
            },
            ("sp" | "salt_pepper", 1 | 2) => {
                let seed = match args.get(1) {
                    None => 0,
                    Some(a) => a
                        .trim()
                        .strip_prefix("seed=")
                        .ok_or_else(bad)?
                        .parse()
                        .map_err(|_| bad())?,
                };
                AttackSpec::SaltPepper {
                    density: num(0)?,
                    seed,
                }
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }
}

pub fn attack(img: &GrayImage, spec: &AttackSpec) -> Result<GrayImage> {
    spec.validate()?;
    if img.pixel_count() == 0 {
        return Err(Error::Empty);
    }
    let src = img.materialize();
    Ok(match *spec {
        AttackSpec::Rotation { degrees } => {
            let there = rotate_bilinear(&src, degrees.to_radians()).materialize();
            rotate_bilinear(&there, -degrees.to_radians()).materialize()
        }
        AttackSpec::LowPass => neighbourhood(&src, |w| w.iter().sum::<f64>() / 9.0),
        AttackSpec::Median => neighbourhood(&src, |w| {
            let mut w = *w;
            w.sort_unstable_by(f64::total_cmp);
            w[4]
        }),
        AttackSpec::Resize { scale } => {
            let (w, h) = (src.width(), src.height());
            let sw = ((w as f64 * scale) as usize).max(1);
            let sh = ((h as f64 * scale) as usize).max(1);
            let small = resize_bicubic(&src, sw, sh).materialize();
            resize_bicubic(&small, w, h).materialize()
        }
        AttackSpec::Jpeg { quality } => jpeg_baseline_encode(&src, quality)?.reconstructed,
        AttackSpec::SaltPepper { density, seed } => salt_and_pepper(&src, density, seed),
    })
}

fn clamped(img: &GrayImage, r: isize, c: isize) -> f64 {
    let r = r.clamp(0, img.height() as isize - 1) as usize;
    let c = c.clamp(0, img.width() as isize - 1) as usize;
    img.get(r, c)
}

/// 3x3 neighbourhood operator with replicated borders.
fn neighbourhood(img: &GrayImage, f: impl Fn(&[f64; 9]) -> f64) -> GrayImage {
    GrayImage::from_fn(img.width(), img.height(), |r, c| {
        let mut w = [0.0; 9];
        for (i, v) in w.iter_mut().enumerate() {
            *v = clamped(
                img,
                r as isize + i as isize / 3 - 1,
                c as isize + i as isize % 3 - 1,
            );
        }
        f(&w)
    })
    .materialize()
}

/// Rotation about the image centre, counter-clockwise for positive angles,
/// sampled bilinearly. Positions outside the frame take the nearest edge
/// sample.
pub fn rotate_bilinear(img: &GrayImage, radians: f64) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let (cy, cx) = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);
    let (s, co) = (libm::sin(radians), libm::cos(radians));
    GrayImage::from_fn(w, h, |r, c| {
        let (y, x) = (r as f64 - cy, c as f64 - cx);
        // Inverse mapping: source = R(-theta) * destination. Rows grow
        // downwards, so counter-clockwise on screen flips the sign of y.
        let sx = co * x - s * y;
        let sy = s * x + co * y;
        bilinear(img, sy + cy, sx + cx)
    })
}

fn bilinear(img: &GrayImage, y: f64, x: f64) -> f64 {
    let y = y.clamp(0.0, img.height() as f64 - 1.0);
    let x = x.clamp(0.0, img.width() as f64 - 1.0);
    let (y0, x0) = (libm::floor(y), libm::floor(x));
    let (fy, fx) = (y - y0, x - x0);
    let (r, c) = (y0 as isize, x0 as isize);
    let p = |dr, dc| clamped(img, r + dr, c + dc);
    (1.0 - fy) * ((1.0 - fx) * p(0, 0) + fx * p(0, 1)) + fy * ((1.0 - fx) * p(1, 0) + fx * p(1, 1))
}

/// Keys cubic convolution kernel with `a = -0.5`.
fn cubic(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        (1.5 * x - 2.5) * x * x + 1.0
    } else if x < 2.0 {
        ((-0.5 * x + 2.5) * x - 4.0) * x + 2.0
    } else {
        0.0
    }
}

/// Contributions of the input samples to every output sample along one
/// axis. Pixel centres are aligned; when shrinking, the kernel is widened by
/// the inverse scale to antialias.
fn weights(in_len: usize, out_len: usize) -> Vec<Vec<(usize, f64)>> {
    let scale = out_len as f64 / in_len as f64;
    let stretch = if scale < 1.0 { 1.0 / scale } else { 1.0 };
    let support = 2.0 * stretch;
    (0..out_len)
        .map(|o| {
            let centre = (o as f64 + 0.5) / scale - 0.5;
            let first = libm::floor(centre - support) as isize;
            let last = libm::ceil(centre + support) as isize;
            let mut taps: Vec<(usize, f64)> = Vec::new();
            for i in first..=last {
                let wgt = cubic((centre - i as f64) / stretch);
                if wgt != 0.0 {
                    let idx = i.clamp(0, in_len as isize - 1) as usize;
                    taps.push((idx, wgt));
                }
            }
            let total: f64 = taps.iter().map(|t| t.1).sum();
            for t in &mut taps {
                t.1 /= total;
            }
            taps
        })
        .collect()
}

pub fn resize_bicubic(img: &GrayImage, width: usize, height: usize) -> GrayImage {
    let wc = weights(img.width(), width);
    let wr = weights(img.height(), height);
    let rows_done = GrayImage::from_fn(width, img.height(), |r, c| {
        wc[c].iter().map(|&(i, w)| w * img.get(r, i)).sum()
    });
    GrayImage::from_fn(width, height, |r, c| {
        wr[r].iter().map(|&(i, w)| w * rows_done.get(i, c)).sum()
    })
}

fn salt_and_pepper(img: &GrayImage, density: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for v in out.data_mut() {
        let hit = rng.gen::<f64>() < density;
        let salt = rng.gen::<bool>();
        if hit {
            *v = if salt { 255.0 } else { 0.0 };
        }
    }
    out
}
