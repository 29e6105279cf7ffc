//! Command-line surface. Every argument struct serialises, so reports can
//! echo the exact invocation that produced them.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "byzfit", version, about = "Polynomial reconstruction from noisy and Byzantine samples")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for every random choice; defaults to 0 unless --strict.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Refuse to run without an explicit --seed.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Worker threads.
    #[arg(long, global = true, env = "BYZFIT_JOBS")]
    pub jobs: Option<usize>,

    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Write a synthetic dataset.
    Gen(GenArgs),
    /// Fit a polynomial to a dataset.
    Fit(FitArgs),
    /// Run the square-neighbourhood filter and write the kept rows.
    Filter(FilterArgs),
    /// Partition, fit each cell and merge the cell models.
    Aggregate(AggregateArgs),
    /// Evaluate a model at points.
    Eval(EvalArgs),
    /// Re-check a report against raw data.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct GenArgs {
    /// Truth polynomial, e.g. "x^2 + 3/4*x*y - 0.5".
    #[arg(long)]
    pub truth: String,
    /// Number of variables; by default the highest one the truth mentions.
    #[arg(long)]
    pub vars: Option<usize>,
    #[arg(long)]
    pub n: usize,
    /// rational, float or gf:Q.
    #[arg(long, default_value = "float")]
    pub field: String,
    /// none, uniform:DELTA or alphabet:o1,o2,...
    #[arg(long, default_value = "none")]
    pub noise: String,
    /// Fraction of corrupted rows, in [0, 1).
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    /// uniform, constant:V or adversarial:OFFSET.
    #[arg(long, default_value = "uniform")]
    pub corruption: String,
    /// Sampling box, one value for every axis or one per axis.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lo: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub hi: Vec<f64>,
    /// Range for uniform corruption and for keeping adversarial values in.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub value_range: Vec<f64>,
    /// CSV path; the manifest goes next to it. Without it the CSV is printed.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[command(subcommand)]
    pub method: FitMethod,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    /// Univariate Welch-Berlekamp with noise enumeration.
    Wb1d(WbArgs),
    /// Multivariate Welch-Berlekamp with noise enumeration.
    Wbmv(WbArgs),
    /// Chebyshev l-infinity fit by linear programming.
    Lp(LpArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Field of a CSV without a manifest: rational, float or gf:Q.
    #[arg(long, default_value = "rational")]
    pub field: String,
}

#[derive(Debug, Args, Serialize)]
pub struct OutArgs {
    /// Report path (JSON).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Truth polynomial for the sup-norm comparison; the manifest's truth
    /// is used when absent.
    #[arg(long)]
    pub truth: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct WbArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Degree bound.
    #[arg(long)]
    pub d: Option<u32>,
    /// Search the smallest degree up to this bound (wb1d only).
    #[arg(long, conflicts_with = "d")]
    pub d_max: Option<u32>,
    /// Decode all rows directly with this corruption bound, no enumeration.
    #[arg(long)]
    pub t: Option<usize>,
    /// Fraction of rows assumed clean.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Integer noise offsets in enumeration order; must contain 0.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with = "delta")]
    pub alphabet: Vec<i64>,
    /// Shorthand for the alphabet -DELTA..=DELTA.
    #[arg(long)]
    pub delta: Option<u32>,
    /// Maximum number of decoder calls.
    #[arg(long, default_value_t = byzfit::wb::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Override for the decoding subset size.
    #[arg(long)]
    pub subset_size: Option<usize>,
    /// Pick the decoding subset after a seeded shuffle.
    #[arg(long)]
    pub shuffle: bool,
    /// Locator axis, 1-based (wbmv only).
    #[arg(long, default_value_t = 1)]
    pub axis: usize,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterOpts {
    /// Half side of each square; delta / d^3 when unset.
    #[arg(long)]
    pub halfwidth: Option<f64>,
    /// Stop after this many kept rows; ceil(d^2 / delta) when unset.
    #[arg(long)]
    pub target: Option<usize>,
    /// Squares holding fewer rows are skipped.
    #[arg(long, default_value_t = 3)]
    pub min_square: usize,
    #[arg(long, value_enum, default_value_t = Center::Median)]
    pub center: Center,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Center {
    Median,
    Mean,
}

#[derive(Debug, Args, Serialize)]
pub struct LpArgs {
    #[command(flatten)]
    pub input: DataArgs,
    /// Chebyshev degree per axis.
    #[arg(long)]
    pub d: usize,
    /// Noise half-width; the band of the agreement statistics and the
    /// filter.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fraction of rows assumed clean.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Grid points per axis for the boundedness rows; 0 for none.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Value interval mapped onto [-1, 1] (`lo,hi`). Defaults to the
    /// sample range; widen it when the truth leaves that range between
    /// samples, since the model is bounded by 1 on the grid.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub value_range: Vec<f64>,
    /// Run the Byzantine filter before fitting (needs --delta).
    #[arg(long)]
    pub filter: bool,
    #[command(flatten)]
    pub filter_opts: FilterOpts,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FilterArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long)]
    pub delta: f64,
    /// Degree the square size and target derive from.
    #[arg(long)]
    pub d: u32,
    #[arg(long, default_value_t = 0.8)]
    pub rho: f64,
    #[command(flatten)]
    pub filter_opts: FilterOpts,
    /// Kept rows, with original indices in the manifest.
    #[arg(long)]
    pub out: PathBuf,
    /// Report path (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitterKind {
    Lp,
    Wb,
}

#[derive(Debug, Args, Serialize)]
pub struct AggregateArgs {
    #[command(flatten)]
    pub input: DataArgs,
    #[arg(long, default_value_t = 4)]
    pub cells: usize,
    #[arg(long, value_enum)]
    pub fitter: FitterKind,
    /// Degree: per axis for lp, total for wb.
    #[arg(long)]
    pub d: usize,
    /// Grid points per axis for lp fits.
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    /// Halton samples drawn per child at each merge; 4x the fitter's
    /// minimum when unset.
    #[arg(long)]
    pub resample: Option<usize>,
    /// Clean fraction for wb fits.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    /// Integer noise offsets for wb fits.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alphabet: Vec<i64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct EvalArgs {
    /// Model JSON, or a report holding one.
    #[arg(long)]
    pub model: PathBuf,
    /// Point as comma-separated coordinates; repeatable.
    #[arg(long, required = true, allow_hyphen_values = true)]
    pub at: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[command(flatten)]
    pub input: DataArgs,
    /// Truth polynomial to measure the sup-norm distance against.
    #[arg(long)]
    pub truth: Option<String>,
    /// Fail when the sup-norm distance to the truth exceeds this.
    #[arg(long, requires = "truth")]
    pub tol: Option<f64>,
    /// Override the report's band half-width.
    #[arg(long)]
    pub delta: Option<String>,
    /// Override the report's clean fraction.
    #[arg(long)]
    pub rho: Option<f64>,
}
