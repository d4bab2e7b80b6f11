use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "nda-snr", version, about = "Blind SNR estimation for QPSK in AWGN")]
pub struct Cli {
    /// Key-value config file (`key = value` per line, keys named like the
    /// flags). Command-line flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the SNR of one frame, generated or read from a file.
    #[command(args_override_self = true)]
    Estimate(EstimateArgs),
    /// Run a Monte Carlo sweep and write one CSV row per cell and estimator.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Difference-form fourth moment against SNR (same as `sweep --figure m4curve`).
    #[command(args_override_self = true)]
    M4curve(SweepArgs),
    /// Time moment computation plus each estimator against frame length.
    #[command(args_override_self = true)]
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct EstimatorArgs {
    /// Comma-separated subset of svr, modified, m2m4.
    #[arg(long, value_name = "LIST")]
    pub estimators: Option<String>,
    /// Root selection for the modified estimator: m4 or oracle.
    #[arg(long, value_name = "MODE")]
    pub threshold_mode: Option<String>,
    /// |m4_diff| at or above which the modified estimator takes the positive root.
    #[arg(long, value_name = "X")]
    pub m4_threshold: Option<f64>,
    /// True SNR (dB) at or below which oracle mode takes the positive root.
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub oracle_cutoff_db: Option<f64>,
    /// Linear signal power S.
    #[arg(long, value_name = "S")]
    pub signal_power: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    /// Text file of I/Q samples, one `re im` pair per line.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// True SNR of the generated frame; also the oracle SNR.
    #[arg(long, value_name = "DB", allow_negative_numbers = true)]
    pub snr_db: Option<f64>,
    /// Generated frame length.
    #[arg(long, default_value_t = 1024)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub estimators: EstimatorArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SweepArgs {
    /// Preset: fig2 ... fig8 or m4curve.
    #[arg(long, value_name = "TAG")]
    pub figure: Option<String>,
    /// Single true SNR in dB.
    #[arg(long, value_name = "DB", allow_negative_numbers = true, conflicts_with = "snr_grid")]
    pub snr_db: Option<f64>,
    /// Inclusive SNR grid `start:step:stop` in dB.
    #[arg(long, value_name = "START:STEP:STOP", allow_hyphen_values = true)]
    pub snr_grid: Option<String>,
    /// Single frame length.
    #[arg(long, conflicts_with = "k_grid")]
    pub k: Option<usize>,
    /// Comma-separated frame lengths.
    #[arg(long, value_name = "LIST")]
    pub k_grid: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Reduction of per-trial estimates: magnitude or signed.
    #[arg(long, value_name = "MODE")]
    pub aggregation: Option<String>,
    #[command(flatten)]
    pub estimators: EstimatorArgs,
    /// Output CSV path; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads, 0 for one per core.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Omit the timestamp header line so output is byte-reproducible.
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Comma-separated frame lengths.
    #[arg(long, value_name = "LIST", default_value = "256,1024,4096")]
    pub k_grid: String,
    /// Timed repetitions per frame length; the median is reported.
    #[arg(long, default_value_t = 15)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}
