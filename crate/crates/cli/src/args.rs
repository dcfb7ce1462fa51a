use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "gabordual", version, about = "Gabor dual and tight windows, frame bounds, decay and OFDM studies")]
pub struct Cli {
    /// Read the subcommand and its flags from a JSON file instead of the command line.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Finite-section duals: convergence, conditioning and Wexler-Raz residuals.
    DualApprox(DualApproxArgs),
    /// Laurent-symbol frame bounds, dual, tight window or decay table.
    Laurent(LaurentArgs),
    /// Weighted-norm decay table for g, its dual and its tight window.
    Decay(DecayArgs),
    /// OFDM/BFDM transceiver run over a delay-Doppler channel.
    Ofdm(OfdmArgs),
    /// Frame-bound ratio and localisation across time-frequency products.
    TfSweep(TfSweepArgs),
    /// Every acceptance artifact in one directory.
    ReproduceAll(ReproduceArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WindowArgs {
    /// Window spec JSON; defaults to the unit gaussian on [-12, 12) with dt = 1/32.
    #[arg(long, value_name = "FILE")]
    pub window: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeArgs {
    /// Numerator of ab = p/q.
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Denominator of ab = p/q.
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Base unit u in seconds (a = p·u, 1/b = q·u), or `balanced` for a ≈ b.
    #[arg(long, default_value = "1")]
    pub unit: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DualApproxArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Section radii: `lo:hi` or a comma list.
    #[arg(long, default_value = "1:8")]
    pub n_list: String,
    /// Reference radius for the error column.
    #[arg(long, default_value_t = 12)]
    pub n_ref: usize,
    /// Study CSV `n,error_l2,cond,wr_residual`.
    #[arg(long)]
    pub out: PathBuf,
    /// Also dump the Gram section of the largest radius as `k,l,kp,lp,re,im`.
    #[arg(long, value_name = "FILE")]
    pub gram_dump: Option<PathBuf>,
    /// Also write the dual of the largest radius as `t,re,im`.
    #[arg(long, value_name = "FILE")]
    pub dual_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Emit {
    Bounds,
    Dual,
    Tight,
    Decay,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LaurentArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Symbol half-bandwidth.
    #[arg(long = "K", visible_alias = "band", default_value_t = 8)]
    #[serde(rename = "K")]
    pub band: usize,
    #[arg(long, value_enum)]
    pub emit: Emit,
    /// Normalise the tight window to unit norm.
    #[arg(long)]
    pub unit_norm: bool,
    /// Weight list JSON for `--emit decay`; defaults to the built-in catalogue.
    #[arg(long, value_name = "FILE")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecayArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    #[arg(long = "K", visible_alias = "band", default_value_t = 8)]
    #[serde(rename = "K")]
    pub band: usize,
    /// Weight list JSON; defaults to the built-in catalogue.
    #[arg(long, value_name = "FILE")]
    pub weights: Option<PathBuf>,
    /// Decay table CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Exponential envelope fits of g, dual and tight window as JSON.
    #[arg(long, value_name = "FILE")]
    pub fits_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    /// Orthonormal system from the unit-norm tight window.
    Tight,
    /// Biorthogonal system: g on transmit, scaled dual on receive.
    Bfdm,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OfdmArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long, default_value_t = 2)]
    pub q: u32,
    /// Base unit u in seconds, or `balanced`.
    #[arg(long, default_value = "balanced")]
    pub unit: String,
    #[arg(long = "K", visible_alias = "band", default_value_t = 12)]
    #[serde(rename = "K")]
    pub band: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Tight)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 16)]
    pub carriers: usize,
    #[arg(long, default_value_t = 8)]
    pub symbols: usize,
    /// Channel JSON; defaults to the noiseless identity channel.
    #[arg(long, value_name = "FILE")]
    pub channel: Option<PathBuf>,
    #[arg(long, default_value_t = 100)]
    pub frames: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Run JSON with metrics, system description and the resolved config.
    #[arg(long)]
    pub out: PathBuf,
    /// Leakage table `k,l,re,im`.
    #[arg(long, value_name = "FILE")]
    pub leakage_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TfSweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub window: WindowArgs,
    /// Comma list of `p/q` pairs.
    #[arg(long, default_value = "1/2,2/3,10/13,10/11")]
    pub tf_list: String,
    #[arg(long = "K", visible_alias = "band", default_value_t = 16)]
    #[serde(rename = "K")]
    pub band: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReproduceArgs {
    /// Output directory; defaults to `reproduce-<unix time>` in the working directory.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Monte Carlo frames for the BER artifact.
    #[arg(long, default_value_t = 50)]
    pub frames: usize,
}
