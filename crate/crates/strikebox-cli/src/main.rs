//! Command-line front end for the S-box construction pipeline.

mod commands;
mod manifest;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BitsFormat {
    /// Lines of '0'/'1' characters.
    Ascii,
    /// Raw bytes, 8 bits each, most significant first.
    Packed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    /// `key value` lines.
    Text,
    /// One CSV header plus one data row.
    Csv,
}

/// Parses "X,Y" pairs for coordinate-style flags.
fn parse_pair<T: std::str::FromStr>(s: &str) -> Result<(T, T), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<T>().map_err(|_| format!("bad number {v:?}"));
    Ok((parse(a)?, parse(b)?))
}

#[derive(Debug, Parser)]
#[command(name = "strikebox", version, about = "S-boxes from lightning: extract, generate, optimize, evaluate, encrypt")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
pub struct ExtractArgs {
    /// LDAR text file, 8 numeric fields per line.
    #[arg(long)]
    pub input: PathBuf,
    /// Output bit file.
    #[arg(long)]
    pub out: PathBuf,
    /// Fail on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Run the Von Neumann extractor over the raw bits.
    #[arg(long)]
    pub whiten: bool,
    /// Output encoding.
    #[arg(long, value_enum, default_value = "ascii")]
    pub format: BitsFormat,
    /// Where to write the statistical report (default: <out>.report.txt).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct GenArgs {
    /// Input bit file.
    #[arg(long)]
    pub bits: PathBuf,
    /// Encoding of the input bit file.
    #[arg(long, value_enum, default_value = "ascii")]
    pub bits_format: BitsFormat,
    /// Number of S-boxes to construct.
    #[arg(long)]
    pub total: usize,
    /// Output directory for grid16 files and index.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Grid side override (default: derived from the stream size).
    #[arg(long)]
    pub grid_side: Option<usize>,
    /// Per-walk step budget.
    #[arg(long, default_value_t = strikebox::walker::DEFAULT_STEP_BUDGET)]
    pub step_budget: usize,
    /// Fail when the walks outrun the stream instead of rereading it.
    #[arg(long)]
    pub strict_bits: bool,
}

#[derive(Debug, clap::Args)]
pub struct EvalArgs {
    /// S-box file (grid16 or hex line).
    #[arg(long)]
    pub sbox: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also dump the 256x256 difference distribution table as CSV.
    #[arg(long)]
    pub dp_table: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct OptimizeArgs {
    /// Directory of sbox*.txt grid16 files.
    #[arg(long)]
    pub in_dir: PathBuf,
    /// Output directory for the evolved population.
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 4)]
    pub islands: usize,
    #[arg(long, default_value_t = 50)]
    pub generations: usize,
    /// Population kept per island.
    #[arg(long, default_value_t = 100)]
    pub pop: usize,
    /// Inclusive fitness band for the initial selection, as LO,HI.
    #[arg(long, value_parser = parse_pair::<u32>, default_value = "100,106")]
    pub range: (u32, u32),
    #[arg(long, default_value_t = 10)]
    pub migration_interval: usize,
    #[arg(long, default_value_t = 2)]
    pub migration_count: usize,
    #[arg(long, default_value_t = 128)]
    pub crossover_point: usize,
    /// RNG seed; identical seeds reproduce identical runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, clap::Args)]
pub struct MaterialArgs {
    /// Input bit file feeding keys, permutations and (optionally) S-boxes.
    #[arg(long)]
    pub bits: PathBuf,
    #[arg(long, value_enum, default_value = "ascii")]
    pub bits_format: BitsFormat,
    /// Channel length in bytes the material is bound to.
    #[arg(long)]
    pub channel_len: Option<usize>,
    /// Take the channel length from this image instead.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Directory of optimized S-boxes to fill the 16 rounds (cycled).
    #[arg(long)]
    pub sbox_dir: Option<PathBuf>,
    /// Output material file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct EncryptArgs {
    /// Input image (binary pixmap, P6).
    #[arg(long)]
    pub image: PathBuf,
    /// Material file from `strikebox material`.
    #[arg(long)]
    pub material: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct DecryptArgs {
    /// Input image (binary pixmap, P6).
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub material: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct SensitivityArgs {
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub material: PathBuf,
    /// Pixel to perturb, as X,Y.
    #[arg(long, value_parser = parse_pair::<usize>, default_value = "0,0")]
    pub pixel: (usize, usize),
    /// Also write the NPCR/UACI table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct TraceArgs {
    /// Input bit file.
    #[arg(long)]
    pub bits: PathBuf,
    #[arg(long, value_enum, default_value = "ascii")]
    pub bits_format: BitsFormat,
    /// Output CSV: step,row,col,value,collected.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub grid_side: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse LDAR records and extract (optionally whitened) random bits.
    Extract(ExtractArgs),
    /// Construct S-boxes from a bit file by random walks.
    Gen(GenArgs),
    /// Score one S-box on all security criteria.
    Eval(EvalArgs),
    /// Evolve a directory of S-boxes with the genetic algorithm.
    Optimize(OptimizeArgs),
    /// Derive SPN round material from a bit file.
    Material(MaterialArgs),
    /// Encrypt an image under a material file.
    Encrypt(EncryptArgs),
    /// Decrypt an image under a material file.
    Decrypt(DecryptArgs),
    /// NPCR/UACI of a one-pixel perturbation under fixed material.
    Sensitivity(SensitivityArgs),
    /// Emit one walk as CSV for plotting.
    Trace(TraceArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Extract(args) => commands::extract(args),
        Command::Gen(args) => commands::gen(args),
        Command::Eval(args) => commands::eval(args),
        Command::Optimize(args) => commands::optimize(args),
        Command::Material(args) => commands::material(args),
        Command::Encrypt(args) => commands::encrypt(args),
        Command::Decrypt(args) => commands::decrypt(args),
        Command::Sensitivity(args) => commands::sensitivity(args),
        Command::Trace(args) => commands::trace(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}