use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ctwm_core::attacks::{attack, AttackSpec};
use ctwm_core::contourlet::{describe, CtConfig};
use ctwm_core::metrics::{psnr, score};
use ctwm_core::quantizer::{decompress, QuantSpec};
use ctwm_core::watermark::{embed, extract, ncc, EmbedConfig, EmbedRule};
use ctwm_core::FilterSet;

use ctwm::container;
use ctwm::error::{CliError, CliResult};
use ctwm::experiments::{
    battery_with_rotations, corpus_dir, f32_spec, image_name, load_corpus, load_score_model,
    run_contourlet, table1, table2,
};
use ctwm::fsutil::{read_file, remove_outputs, write_atomic};
use ctwm::manifest::Manifest;
use ctwm::pnm::{read_pbm, read_pgm, write_pbm, write_pgm};
use ctwm::report::{pretty, to_csv, Row};

#[derive(Parser)]
#[command(
    name = "ctwm",
    version,
    about = "Contourlet image codec and lowpass watermarking toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress a PGM image into a CTC1 container.
    Compress(CompressArgs),
    /// Reconstruct a PGM image from a CTC1 container.
    Decompress(DecompressArgs),
    /// Embed a PBM logo into a PGM image.
    Embed(EmbedArgs),
    /// Extract a logo from a (possibly attacked) PGM image.
    Extract(ExtractArgs),
    /// Apply one attack to a PGM image.
    Attack(AttackArgs),
    /// Contourlet codec against the block-DCT baseline over a corpus.
    Table1(Table1Args),
    /// Attack battery against a watermarked image.
    Table2(Table2Args),
    /// Blockiness score of a PGM image.
    Score(ScoreArgs),
    /// Print the filter taps and the band layout of a configuration.
    Filters(FiltersArgs),
}

#[derive(Args)]
struct Report {
    /// Write the CSV report to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print an aligned table instead of CSV.
    #[arg(long)]
    pretty: bool,
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    output: PathBuf,
    /// DFB depth per pyramid level, finest first (`-` for no DFB).
    #[arg(long, default_value_t = CtConfig::default())]
    config: CtConfig,
    /// Comma-separated divisor per band, band-id order.
    #[arg(long, value_delimiter = ',', conflicts_with = "divisor_scale")]
    divisors: Option<Vec<f64>>,
    /// Multiply the energy-assigned divisors by this factor.
    #[arg(long)]
    divisor_scale: Option<f64>,
    /// TOML file overriding the score model parameters.
    #[arg(long)]
    score_model: Option<PathBuf>,
    #[command(flatten)]
    report: Report,
}

#[derive(Args)]
struct DecompressArgs {
    input: PathBuf,
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Centered,
    Literal,
}

#[derive(Args)]
struct KeyArgs {
    /// Quantization step.
    #[arg(long = "q", visible_alias = "Q", default_value_t = 16.0)]
    q: f64,
    /// Key of the coefficient permutation.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = RuleArg::Centered)]
    rule: RuleArg,
    #[arg(long, default_value_t = CtConfig::default())]
    config: CtConfig,
}

impl KeyArgs {
    fn embed_config(&self) -> EmbedConfig {
        EmbedConfig {
            q: self.q,
            seed: self.seed,
            ct_config: self.config.clone(),
            rule: match self.rule {
                RuleArg::Centered => EmbedRule::Centered,
                RuleArg::Literal => EmbedRule::Literal,
            },
        }
    }

    fn record(&self, m: &mut Manifest) {
        m.set("q", self.q)
            .set("seed", self.seed)
            .set("config", &self.config)
            .set(
                "rule",
                match self.rule {
                    RuleArg::Centered => "centered",
                    RuleArg::Literal => "literal",
                },
            );
    }
}

#[derive(Args)]
struct EmbedArgs {
    cover: PathBuf,
    logo: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    key: KeyArgs,
    #[command(flatten)]
    report: Report,
}

#[derive(Args)]
struct ExtractArgs {
    input: PathBuf,
    output: PathBuf,
    #[command(flatten)]
    key: KeyArgs,
    /// Original logo; fixes the logo size and adds the NCC to the report.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long, required_unless_present = "reference")]
    width: Option<usize>,
    #[arg(long, required_unless_present = "reference")]
    height: Option<usize>,
    #[command(flatten)]
    report: Report,
}

#[derive(Args)]
struct AttackArgs {
    input: PathBuf,
    output: PathBuf,
    /// e.g. `rotate:5`, `resize:0.5`, `lpf`, `median`, `jpeg:75`, `sp:0.001:seed=7`.
    #[arg(long)]
    attack: AttackSpec,
}

#[derive(Args)]
struct Table1Args {
    /// Corpus directory of PGM images, or a single PGM file
    /// [default: $CTWM_CORPUS].
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long, default_value_t = CtConfig::default())]
    config: CtConfig,
    /// Scale the contourlet divisors to reach this compression ratio.
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    score_model: Option<PathBuf>,
    #[command(flatten)]
    report: Report,
}

#[derive(Args)]
struct Table2Args {
    marked: PathBuf,
    logo: PathBuf,
    #[command(flatten)]
    key: KeyArgs,
    /// Rotation angles in degrees used in place of the single 5 degree entry.
    #[arg(long, value_delimiter = ',', default_value = "5")]
    rotations: Vec<f64>,
    /// Directory receiving the extracted logos.
    #[arg(long, default_value = "table2-logos")]
    logo_dir: PathBuf,
    #[command(flatten)]
    report: Report,
}

#[derive(Args)]
struct ScoreArgs {
    input: PathBuf,
    #[arg(long)]
    score_model: Option<PathBuf>,
    #[command(flatten)]
    report: Report,
}

#[derive(Args)]
struct FiltersArgs {
    #[arg(long, default_value_t = CtConfig::default())]
    config: CtConfig,
    /// Image side used for the band layout.
    #[arg(long, default_value_t = 512)]
    size: usize,
}

/// Files written so far, removed again if the command fails.
#[derive(Default)]
struct Outputs {
    written: Vec<PathBuf>,
}

impl Outputs {
    fn write(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        write_atomic(path, bytes)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn write_pgm(&mut self, path: &Path, img: &ctwm_core::GrayImage) -> CliResult<()> {
        write_pgm(path, img)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn write_pbm(&mut self, path: &Path, wm: &ctwm_core::WatermarkBits) -> CliResult<()> {
        write_pbm(path, wm)?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn manifest(&mut self, m: &Manifest, next_to: &Path) -> CliResult<()> {
        let path = m.write_next_to(next_to)?;
        self.written.push(path);
        Ok(())
    }

    fn report(&mut self, rows: &[Row], report: &Report) -> CliResult<()> {
        let text = if report.pretty {
            pretty(rows)
        } else {
            to_csv(rows)?
        };
        match &report.out {
            Some(path) => self.write(path, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn cmd_compress(a: &CompressArgs, out: &mut Outputs) -> CliResult<()> {
    let img = read_pgm(&a.input)?;
    let model = load_score_model(a.score_model.as_deref())?;
    let spec = match (&a.divisors, a.divisor_scale) {
        (Some(d), _) => Some(QuantSpec::new(d.clone())?),
        (None, Some(f)) => {
            let base = ctwm_core::quantizer::compress(&img, &a.config, None)?.spec;
            Some(base.scaled(f)?)
        }
        (None, None) => None,
    };
    let spec = spec.as_ref().map(f32_spec).transpose()?;
    let run = run_contourlet(&img, &a.config, spec.as_ref(), &model)?;
    let bytes = container::encode(&run.compressed.quantized, &run.compressed.spec)?;
    out.write(&a.output, &bytes)?;

    let mut m = Manifest::new("compress");
    m.set_path("input", &a.input)
        .set_path("output", &a.output)
        .set("config", &a.config)
        .set("divisors", join(&run.compressed.spec.divisors));
    if let Some(p) = &a.score_model {
        m.set_path("score_model", p);
    }
    out.manifest(&m, &a.output)?;

    let mut row = Row::new(image_name(&a.input), "contourlet");
    row.cr = Some(run.cr);
    row.psnr = Some(run.psnr);
    row.score = Some(run.score);
    out.report(&[row], &a.report)
}

fn cmd_decompress(a: &DecompressArgs, out: &mut Outputs) -> CliResult<()> {
    let bytes = read_file(&a.input)?;
    let (q, spec) = container::decode(&bytes)?;
    let img = decompress(&q, &spec)?;
    out.write_pgm(&a.output, &img)?;
    let mut m = Manifest::new("decompress");
    m.set_path("input", &a.input).set_path("output", &a.output);
    out.manifest(&m, &a.output)
}

fn cmd_embed(a: &EmbedArgs, out: &mut Outputs) -> CliResult<()> {
    let cover = read_pgm(&a.cover)?;
    let logo = read_pbm(&a.logo)?;
    let cfg = a.key.embed_config();
    let marked = embed(&cover, &logo, &cfg)?;
    out.write_pgm(&a.output, &marked)?;
    let mut m = Manifest::new("embed");
    m.set_path("cover", &a.cover)
        .set_path("logo", &a.logo)
        .set_path("output", &a.output);
    a.key.record(&mut m);
    out.manifest(&m, &a.output)?;
    let mut row = Row::new(image_name(&a.cover), "watermark");
    row.psnr = Some(psnr(&cover, &marked)?);
    out.report(&[row], &a.report)
}

fn cmd_extract(a: &ExtractArgs, out: &mut Outputs) -> CliResult<()> {
    let img = read_pgm(&a.input)?;
    let reference = a.reference.as_deref().map(read_pbm).transpose()?;
    let (w, h) = match (&reference, a.width, a.height) {
        (Some(r), None, None) => (r.width(), r.height()),
        (Some(r), w, h) => {
            let dims = (w.unwrap_or(r.width()), h.unwrap_or(r.height()));
            if dims != (r.width(), r.height()) {
                return Err(CliError::Usage(format!(
                    "--width/--height {}x{} disagree with the reference logo {}x{}",
                    dims.0,
                    dims.1,
                    r.width(),
                    r.height()
                )));
            }
            dims
        }
        (None, Some(w), Some(h)) => (w, h),
        (None, _, _) => return Err(CliError::Usage("logo size unknown".into())),
    };
    let cfg = a.key.embed_config();
    let logo = extract(&img, &cfg, w, h)?;
    out.write_pbm(&a.output, &logo)?;
    let mut m = Manifest::new("extract");
    m.set_path("input", &a.input)
        .set_path("output", &a.output)
        .set("width", w)
        .set("height", h);
    if let Some(p) = &a.reference {
        m.set_path("reference", p);
    }
    a.key.record(&mut m);
    out.manifest(&m, &a.output)?;
    let mut row = Row::new(image_name(&a.input), "extract");
    row.ncc = reference.map(|r| ncc(&r, &logo)).transpose()?;
    out.report(&[row], &a.report)
}

fn cmd_attack(a: &AttackArgs, out: &mut Outputs) -> CliResult<()> {
    let img = read_pgm(&a.input)?;
    let attacked = attack(&img, &a.attack)?;
    out.write_pgm(&a.output, &attacked)?;
    let mut m = Manifest::new("attack");
    m.set_path("input", &a.input)
        .set_path("output", &a.output)
        .set("attack", a.attack);
    out.manifest(&m, &a.output)
}

fn cmd_table1(a: &Table1Args, out: &mut Outputs) -> CliResult<()> {
    let model = load_score_model(a.score_model.as_deref())?;
    let source = corpus_dir(a.corpus.as_deref())?;
    let images = if source.is_file() {
        vec![(image_name(&source), read_pgm(&source)?)]
    } else {
        load_corpus(&source)?
    };
    let entries = table1(&images, &a.config, a.ratio, &model)?;
    let rows: Vec<Row> = entries.iter().flat_map(|e| e.rows()).collect();
    if let Some(path) = &a.report.out {
        let mut m = Manifest::new("table1");
        m.set_path("corpus", &source)
            .set_path("output", path)
            .set("config", &a.config);
        if let Some(r) = a.ratio {
            m.set("ratio", r);
        }
        if let Some(p) = &a.score_model {
            m.set_path("score_model", p);
        }
        out.manifest(&m, path)?;
    }
    out.report(&rows, &a.report)
}

fn cmd_table2(a: &Table2Args, out: &mut Outputs) -> CliResult<()> {
    let marked = read_pgm(&a.marked)?;
    let logo = read_pbm(&a.logo)?;
    let cfg = a.key.embed_config();
    let attacks = battery_with_rotations(&a.rotations);
    let entries = table2(&marked, &logo, &cfg, &attacks)?;
    std::fs::create_dir_all(&a.logo_dir).map_err(|e| CliError::io(&a.logo_dir, e))?;
    let name = image_name(&a.marked);
    let mut rows = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let file = format!(
            "{i:02}-{}.pbm",
            e.attack.to_string().replace([':', '='], "_")
        );
        out.write_pbm(&a.logo_dir.join(file), &e.extracted)?;
        rows.push(e.row(&name));
    }
    let mut m = Manifest::new("table2");
    m.set_path("marked", &a.marked)
        .set_path("logo", &a.logo)
        .set_path("logo_dir", &a.logo_dir)
        .set("rotations", join(&a.rotations));
    a.key.record(&mut m);
    let anchor = a
        .report
        .out
        .clone()
        .unwrap_or_else(|| a.logo_dir.join("table2"));
    out.manifest(&m, &anchor)?;
    out.report(&rows, &a.report)
}

fn cmd_score(a: &ScoreArgs, out: &mut Outputs) -> CliResult<()> {
    let img = read_pgm(&a.input)?;
    let model = load_score_model(a.score_model.as_deref())?;
    let mut row = Row::new(image_name(&a.input), "input");
    row.score = Some(score(&img, &model)?);
    out.report(&[row], &a.report)
}

fn cmd_filters(a: &FiltersArgs) -> CliResult<()> {
    let f = FilterSet::cdf97();
    println!("analysis_lowpass  {}", join(&f.analysis_lowpass));
    println!("analysis_highpass {}", join(&f.analysis_highpass));
    println!("synthesis_lowpass  {}", join(&f.synthesis_lowpass));
    println!("synthesis_highpass {}", join(&f.synthesis_highpass));
    println!(
        "config {} ({} bands at {}x{})",
        a.config,
        a.config.band_count(),
        a.size,
        a.size
    );
    print!("{}", describe(&a.config, a.size, a.size)?);
    Ok(())
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn run(cli: &Cli, out: &mut Outputs) -> CliResult<()> {
    match &cli.command {
        Command::Compress(a) => cmd_compress(a, out),
        Command::Decompress(a) => cmd_decompress(a, out),
        Command::Embed(a) => cmd_embed(a, out),
        Command::Extract(a) => cmd_extract(a, out),
        Command::Attack(a) => cmd_attack(a, out),
        Command::Table1(a) => cmd_table1(a, out),
        Command::Table2(a) => cmd_table2(a, out),
        Command::Score(a) => cmd_score(a, out),
        Command::Filters(a) => cmd_filters(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Outputs::default();
    match run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            remove_outputs(&out.written);
            eprintln!("ctwm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
