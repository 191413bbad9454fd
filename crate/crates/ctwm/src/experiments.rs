//! Corpus handling and the two experiment tables.
//!
//! Table 1 compares the contourlet codec with the block-DCT baseline at a
//! matched compression ratio. Table 2 runs the attack battery against a
//! watermarked image and measures how much of the logo survives.

use std::path::{Path, PathBuf};

use ctwm_core::attacks::{attack, AttackSpec};
use ctwm_core::contourlet::CtConfig;
use ctwm_core::jpeg::{jpeg_baseline_encode, JpegResult};
use ctwm_core::metrics::{compression_ratio, psnr, score, ScoreModel};
use ctwm_core::quantizer::{compress, decompress, Compressed, QuantSpec};
use ctwm_core::watermark::{extract, ncc, EmbedConfig};
use ctwm_core::{GrayImage, WatermarkBits};
use serde::Deserialize;

use crate::error::{CliError, CliResult};
use crate::fsutil::read_file;
use crate::pnm::read_pgm;
use crate::report::Row;

/// Environment variable naming the default corpus directory.
pub const CORPUS_ENV: &str = "CTWM_CORPUS";

/// `flag`, else `$CTWM_CORPUS`.
pub fn corpus_dir(flag: Option<&Path>) -> CliResult<PathBuf> {
    match flag {
        Some(p) => Ok(p.to_path_buf()),
        None => std::env::var_os(CORPUS_ENV)
            .map(PathBuf::from)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "no corpus directory: pass --corpus or set {CORPUS_ENV}"
                ))
            }),
    }
}

/// All `*.pgm` files of a directory, sorted by file stem.
pub fn load_corpus(dir: &Path) -> CliResult<Vec<(String, GrayImage)>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        {
            paths.push(path);
        }
    }
    paths.sort();
    let images: Vec<(String, GrayImage)> = paths
        .iter()
        .map(|p| Ok((image_name(p), read_pgm(p)?)))
        .collect::<CliResult<_>>()?;
    if images.is_empty() {
        return Err(CliError::Usage(format!(
            "no .pgm images in {}",
            dir.display()
        )));
    }
    Ok(images)
}

pub fn image_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Optional overrides of the score model, read from a TOML file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScoreModelFile {
    alpha: Option<f64>,
    beta: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    gamma3: Option<f64>,
}

pub fn parse_score_model(text: &str) -> CliResult<ScoreModel> {
    let f: ScoreModelFile =
        toml::from_str(text).map_err(|e| CliError::Format(format!("score model: {e}")))?;
    let d = ScoreModel::default();
    let m = ScoreModel {
        alpha: f.alpha.unwrap_or(d.alpha),
        beta: f.beta.unwrap_or(d.beta),
        gamma1: f.gamma1.unwrap_or(d.gamma1),
        gamma2: f.gamma2.unwrap_or(d.gamma2),
        gamma3: f.gamma3.unwrap_or(d.gamma3),
    };
    let all = [m.alpha, m.beta, m.gamma1, m.gamma2, m.gamma3];
    if !all.iter().all(|v| v.is_finite()) {
        return Err(CliError::Format(
            "score model parameters must be finite".into(),
        ));
    }
    Ok(m)
}

pub fn load_score_model(path: Option<&Path>) -> CliResult<ScoreModel> {
    match path {
        None => Ok(ScoreModel::default()),
        Some(p) => {
            let bytes = read_file(p)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| CliError::Format(format!("{}: not UTF-8", p.display())))?;
            parse_score_model(&text).map_err(|e| e.with_path(p))
        }
    }
}

/// A contourlet codec run.
#[derive(Debug, Clone)]
pub struct CtRun {
    pub compressed: Compressed,
    pub reconstructed: GrayImage,
    pub cr: f64,
    pub psnr: f64,
    pub score: f64,
}

pub fn run_contourlet(
    img: &GrayImage,
    cfg: &CtConfig,
    spec: Option<&QuantSpec>,
    model: &ScoreModel,
) -> CliResult<CtRun> {
    let compressed = compress(img, cfg, spec)?;
    let reconstructed = decompress(&compressed.quantized, &compressed.spec)?;
    Ok(CtRun {
        cr: compressed.compression_ratio()?,
        psnr: psnr(img, &reconstructed)?,
        score: score(&reconstructed, model)?,
        compressed,
        reconstructed,
    })
}

/// Divisors stored in the container are `f32`.
pub fn f32_spec(spec: &QuantSpec) -> CliResult<QuantSpec> {
    Ok(QuantSpec::new(
        spec.divisors.iter().map(|&d| f64::from(d as f32)).collect(),
    )?)
}

/// Scales the energy-assigned divisors until the compression ratio matches
/// `target` (bisection on the log scale factor).
pub fn run_contourlet_at_ratio(
    img: &GrayImage,
    cfg: &CtConfig,
    target: f64,
    model: &ScoreModel,
) -> CliResult<CtRun> {
    let base = compress(img, cfg, None)?.spec;
    let run_at = |log_f: f64| -> CliResult<CtRun> {
        let spec = f32_spec(&base.scaled(log_f.exp())?)?;
        run_contourlet(img, cfg, Some(&spec), model)
    };
    let (mut lo, mut hi) = ((0.01f64).ln(), (1000.0f64).ln());
    let mut best = run_at(0.0)?;
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        let run = run_at(mid)?;
        if (run.cr - target).abs() < (best.cr - target).abs() {
            best = run.clone();
        }
        if run.cr < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// A baseline run at a given quality.
#[derive(Debug, Clone)]
pub struct JpegRun {
    pub quality: u8,
    pub result: JpegResult,
    pub cr: f64,
    pub psnr: f64,
    pub score: f64,
}

pub fn run_jpeg(img: &GrayImage, quality: u8, model: &ScoreModel) -> CliResult<JpegRun> {
    let result = jpeg_baseline_encode(img, quality)?;
    let n1 = 8.0 * img.pixel_count() as f64;
    Ok(JpegRun {
        quality,
        cr: compression_ratio(n1, result.bits)?,
        psnr: psnr(img, &result.reconstructed)?,
        score: score(&result.reconstructed, model)?,
        result,
    })
}

/// The quality in `1..=100` whose compression ratio is closest to `target`
/// (lowest quality on ties).
pub fn jpeg_matching_ratio(img: &GrayImage, target: f64, model: &ScoreModel) -> CliResult<JpegRun> {
    let n1 = 8.0 * img.pixel_count() as f64;
    let mut best: Option<(f64, u8)> = None;
    for q in 1..=100u8 {
        let bits = jpeg_baseline_encode(img, q)?.bits;
        let gap = if bits > 0.0 {
            (n1 / bits - target).abs()
        } else {
            f64::INFINITY
        };
        if best.is_none_or(|(g, _)| gap < g) {
            best = Some((gap, q));
        }
    }
    let (_, q) = best.expect("at least one quality");
    run_jpeg(img, q, model)
}

/// One Table 1 entry: the contourlet codec (default divisors, or divisors
/// scaled to `target_ratio`) against the baseline at the closest ratio.
#[derive(Debug, Clone)]
pub struct Table1Entry {
    pub image: String,
    pub contourlet: CtRun,
    pub jpeg: JpegRun,
}

impl Table1Entry {
    pub fn rows(&self) -> [Row; 2] {
        let mut ct = Row::new(&self.image, "contourlet");
        ct.cr = Some(self.contourlet.cr);
        ct.psnr = Some(self.contourlet.psnr);
        ct.score = Some(self.contourlet.score);
        let mut jp = Row::new(&self.image, format!("jpeg-q{}", self.jpeg.quality));
        jp.cr = Some(self.jpeg.cr);
        jp.psnr = Some(self.jpeg.psnr);
        jp.score = Some(self.jpeg.score);
        [ct, jp]
    }
}

pub fn table1_entry(
    name: &str,
    img: &GrayImage,
    cfg: &CtConfig,
    target_ratio: Option<f64>,
    model: &ScoreModel,
) -> CliResult<Table1Entry> {
    let contourlet = match target_ratio {
        None => run_contourlet(img, cfg, None, model)?,
        Some(t) => run_contourlet_at_ratio(img, cfg, t, model)?,
    };
    let jpeg = jpeg_matching_ratio(img, contourlet.cr, model)?;
    Ok(Table1Entry {
        image: name.to_string(),
        contourlet,
        jpeg,
    })
}

pub fn table1(
    images: &[(String, GrayImage)],
    cfg: &CtConfig,
    target_ratio: Option<f64>,
    model: &ScoreModel,
) -> CliResult<Vec<Table1Entry>> {
    let mut sorted: Vec<&(String, GrayImage)> = images.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    sorted
        .into_iter()
        .map(|(name, img)| table1_entry(name, img, cfg, target_ratio, model))
        .collect()
}

/// Result of one attack on a watermarked image.
#[derive(Debug, Clone)]
pub struct Table2Entry {
    pub attack: AttackSpec,
    pub attacked: GrayImage,
    pub extracted: WatermarkBits,
    /// PSNR of the attacked image against the watermarked one.
    pub psnr: f64,
    pub ncc: f64,
}

impl Table2Entry {
    pub fn row(&self, image: &str) -> Row {
        let mut r = Row::new(image, self.attack.to_string());
        r.psnr = Some(self.psnr);
        r.ncc = Some(self.ncc);
        r
    }
}

/// The default battery with the rotation replaced by one entry per angle.
pub fn battery_with_rotations(angles: &[f64]) -> Vec<AttackSpec> {
    let mut out = Vec::new();
    for spec in AttackSpec::battery() {
        match spec {
            AttackSpec::Rotation { .. } => out.extend(
                angles
                    .iter()
                    .map(|&degrees| AttackSpec::Rotation { degrees }),
            ),
            other => out.push(other),
        }
    }
    out
}

pub fn table2(
    marked: &GrayImage,
    logo: &WatermarkBits,
    cfg: &EmbedConfig,
    attacks: &[AttackSpec],
) -> CliResult<Vec<Table2Entry>> {
    attacks
        .iter()
        .map(|spec| {
            let attacked = attack(marked, spec)?;
            let extracted = extract(&attacked, cfg, logo.width(), logo.height())?;
            Ok(Table2Entry {
                attack: *spec,
                psnr: psnr(marked, &attacked)?,
                ncc: ncc(logo, &extracted)?,
                attacked,
                extracted,
            })
        })
        .collect()
}
