use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "deltashell", version, about = "Gap spectrum of the spherical delta-shell Dirac operator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gap eigenvalues of every mode up to --j-max for a shell of strength --lambda.
    Spectrum(SpectrumArgs),
    /// The eigenvalue curve a -> lambda(a) of one mode.
    Curve(CurveArgs),
    /// Gap eigenvalues of the squeezed potential mu/(2 eps) on 1-eps < r < 1+eps.
    Approx(ApproxArgs),
    /// Squeezed eigenvalues against eps, converging to the shell with strength 2 tan(mu/2).
    Converge(ConvergeArgs),
    /// Checks the Bessel-product inequalities and writes a JSON report.
    Conjecture(ConjectureArgs),
    /// Samples the radial eigenfunction (r, f, g) at a gap eigenvalue.
    Eigenfun(EigenfunArgs),
    /// Point sets of the squeezed (1) or shell (2) dispersion relation in (a, lambda).
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Mass m > 0.
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; all cores when absent, 1 for serial runs.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModeArgs {
    /// Total angular momentum, e.g. 1/2, 3/2 or 1.5.
    #[arg(long, default_value = "1/2")]
    pub j: String,
    /// Sign s of k = s (j + 1/2): +1 or -1.
    #[arg(long, default_value = "+1", allow_hyphen_values = true)]
    pub sign: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value = "21/2")]
    pub j_max: String,
    /// Points of the bracketing grid over the gap.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Number of energies, placed at the midpoints of equal cells of the gap.
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    /// Annulus half-width, a number or 2^-k.
    #[arg(long, default_value = "2^-10")]
    pub eps: String,
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mode: ModeArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    /// Comma-separated annulus half-widths, each a number or 2^-k.
    #[arg(long, default_value = "2^-6,2^-7,2^-8,2^-9,2^-10,2^-11,2^-12,2^-13,2^-14")]
    pub eps_list: String,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    /// d_n d_{n-1} < d_0 d_1 and d_n < d_{n-2}.
    Conjecture,
    /// The sharp inequality, mode by mode.
    Inequality,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConjectureArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = ReportKind::Conjecture)]
    pub kind: ReportKind,
    #[arg(long, default_value_t = 50)]
    pub n_max: u32,
    /// Number of decay constants M on a log grid over [--m-min, --m-max].
    #[arg(long, default_value_t = 100)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.05)]
    pub m_min: f64,
    #[arg(long, default_value_t = 20.0)]
    pub m_max: f64,
    /// Modes checked by --kind inequality.
    #[arg(long, default_value = "21/2")]
    pub j_max: String,
    /// Shell strengths checked by --kind inequality.
    #[arg(long, default_value = "0.5,1.0926049796875809,5")]
    pub lambda_list: String,
    /// Energies checked by --kind inequality.
    #[arg(long, default_value = "-0.5,0,0.5", allow_hyphen_values = true)]
    pub a_list: String,
    /// Gaps below -tol count as violations.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EigenfunArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub mode: ModeArgs,
    /// Shell strength; give this or --mu.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// Squeezed potential strength; give this or --lambda.
    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    #[arg(long, default_value = "2^-10")]
    pub eps: String,
    /// Which gap eigenvalue of the mode, counted from the bottom.
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    /// Number of sample radii on (0, --r-max].
    #[arg(long, default_value_t = 400)]
    pub grid: usize,
    #[arg(long, default_value_t = 4.0)]
    pub r_max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FiguresArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub figure: u8,
    /// Grid points per axis.
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
    /// Largest accepted |D| at an emitted point.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}
