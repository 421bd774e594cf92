use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sugeno_hh::convexity::{DEFAULT_SAMPLES, DEFAULT_SEED};
use sugeno_hh::measure::DEFAULT_GRID;

#[derive(Debug, Parser)]
#[command(
    name = "sugeno-hh",
    version,
    about = "Sugeno integrals and fuzzy Hermite-Hadamard bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sugeno integral of f over [a, a + eta-len].
    #[command(allow_negative_numbers = true)]
    Integrate(Common),
    /// Sample-check invexity and a preinvexity hypothesis for f.
    #[command(allow_negative_numbers = true)]
    Check(Common),
    /// Fuzzy Hermite-Hadamard bound for f and the integral it caps.
    #[command(allow_negative_numbers = true)]
    Bound(BoundArgs),
    /// Rerun a worked example (or `all`) against its golden values.
    Reproduce(ReproduceArgs),
    /// Tabulate integral and bound across one parameter as CSV.
    #[command(allow_negative_numbers = true)]
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Fixedpoint,
    Supmin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    R,
    Alpha,
    M,
    EtaLen,
    P,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Function of x, e.g. "x^4/2" or "sin(pi*x)".
    #[arg(short = 'f', long = "function")]
    pub expr: String,
    #[arg(short = 'a', default_value_t = 0.0)]
    pub a: f64,
    #[arg(short = 'b', default_value_t = 1.0)]
    pub b: f64,
    /// Length eta(b, a) of the interval; defaults to b - a.
    #[arg(long)]
    pub eta_len: Option<f64>,
    #[arg(long, conflicts_with_all = ["alpha", "m"])]
    pub r: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    /// Evaluation domain of f as lo:hi, when wider than the interval.
    #[arg(long, value_parser = parse_span)]
    pub fdomain: Option<(f64, f64)>,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// affine or scaled:k
    #[arg(long, default_value = "affine")]
    pub eta: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: Common,
    /// Also sample-check the hypothesis; a violation fails the run.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReproduceArgs {
    /// Example id, or `all`.
    pub id: String,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub param: Param,
    /// Comma-separated values.
    #[arg(long, conflicts_with = "range", allow_hyphen_values = true)]
    pub values: Option<String>,
    /// start:stop:step, stop inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
}

pub fn parse_span(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad hi: {e}"))?;
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(format!("need finite lo <= hi, got {s:?}"));
    }
    Ok((lo, hi))
}

pub fn parse_values(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| format!("bad value {t:?}: {e}"))
        })
        .collect()
}

/// `start:stop:step` with `step > 0`; empty when `stop < start`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let [start, stop, step] = parts[..] else {
        return Err(format!("expected start:stop:step, got {s:?}"));
    };
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|e| format!("bad number {t:?}: {e}"))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err("need finite start and stop and step > 0".to_string());
    }
    if stop < start {
        return Ok(Vec::new());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| start + i as f64 * step).collect())
}
