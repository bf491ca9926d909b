//! `gridlock`: wired-table extraction from PDFs and page images.
//!
//! Exit codes: 0 success, 1 some input or page failed (the rest are still
//! written), 2 usage or configuration error.

mod evaluate;
mod extract;
mod inputs;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridlock_core::config::Config;

#[derive(Parser)]
#[command(name = "gridlock", version, about = "Extract ruled tables from PDFs and page images")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect tables and write one output file per page.
    Extract(ExtractArgs),
    /// Score predicted tables against ground truth, pairing files by stem.
    Evaluate(EvaluateArgs),
    /// Generate synthetic tables with ground truth.
    Synth(SynthArgs),
    /// Print the page interchange form (PIF) of one page.
    PifDump(PifDumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Html,
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Html => "html",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args)]
pub struct Common {
    /// Key = value settings overriding any default (see README).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Rasterization resolution for PDF pages and assumed resolution of images.
    #[arg(long)]
    dpi: Option<f64>,
}

#[derive(Args)]
pub struct ExtractArgs {
    /// PDF, PNG, PGM or PIF files, or directories of them.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "html")]
    format: Format,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Skip skew estimation and correction on raster pages.
    #[arg(long)]
    no_deskew: bool,
    /// Worker threads, also the cap on concurrent rasterizer processes.
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Teds,
    TedsStruct,
    Prf,
    All,
}

#[derive(Args)]
pub struct EvaluateArgs {
    pred_dir: PathBuf,
    gt_dir: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    metric: MetricArg,
    /// Score ground truth without a prediction as an empty prediction
    /// instead of failing.
    #[arg(long)]
    allow_missing: bool,
    /// IoU needed to pair tables when both sides carry boxes.
    #[arg(long)]
    iou_thresh: Option<f64>,
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Seed of the first item; item i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    max_rows: Option<usize>,
    #[arg(long)]
    max_cols: Option<usize>,
    #[arg(long)]
    merge_prob: Option<f64>,
    /// Skew of the rendered page in degrees.
    #[arg(long)]
    skew: Option<f64>,
    #[arg(long)]
    noise_sigma: Option<f64>,
    #[arg(long)]
    no_text: bool,
    #[arg(long)]
    page_width: Option<f64>,
    #[arg(long)]
    page_height: Option<f64>,
    #[arg(long)]
    margin: Option<f64>,
    #[arg(long)]
    min_cell: Option<f64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
pub struct PifDumpArgs {
    input: PathBuf,
    /// 0-based page index.
    #[arg(long, default_value_t = 0)]
    page: usize,
    #[command(flatten)]
    common: Common,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1; details were already reported.
    Partial,
}

/// Defaults, then `--config`, then `--dpi`.
pub fn load_config(common: &Common) -> Result<Config, Failure> {
    let mut cfg = Config::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
        cfg.apply_text(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    if let Some(dpi) = common.dpi {
        cfg.dpi = dpi;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(a) => extract::run(&a),
        Command::Evaluate(a) => evaluate::run(&a),
        Command::Synth(a) => synth::run(&a),
        Command::PifDump(a) => extract::pif_dump(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Partial) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
