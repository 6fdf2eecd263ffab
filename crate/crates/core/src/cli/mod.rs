// Copyright 2026 The qutrit-assign Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.
//!
//! `sweep` evaluates the assigned `x8` over a grid of average values and
//! writes one CSV or JSON row per point; `validate` runs the symmetry and
//! consistency checks and reports pass/fail with the measured margins.
//!
//! Exit codes: 0 success, 2 configuration error, 3 integration or
//! validation failure, 4 I/O error.

mod sweep;
mod validate;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assignment::AverageRegion;
use crate::error::Error;
use crate::integrator::{IntegratorConfig, Sequence};
use crate::prior::PriorSpec;
use crate::qutrit::Bloch;

pub use sweep::{run_sweep, SweepRow, CSV_HEADER};
pub use validate::{run_validate, Check, ValidationReport};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "QUTRIT_ASSIGN_THREADS";

/// Version of the JSON output layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "qutrit-assign", version, about = "Bayesian qutrit state assignment from average-value data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assign states over a grid of average values and write curve data.
    Sweep(RunArgs),
    /// Run the symmetry and consistency checks.
    Validate(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorKind {
    Constant,
    Gaussian,
    Slater,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    LargeN,
    LargeNRegion,
    FiniteN,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceArg {
    Pseudo,
    Lowdisc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "constant")]
    pub prior: PriorKind,
    /// Gaussian centre: pure1, pure0 or custom:<x1,...,x8>.
    #[arg(long, default_value = "pure1", allow_hyphen_values = true)]
    pub center: String,
    /// Gaussian breadth.
    #[arg(long = "s", default_value_t = 0.25)]
    pub breadth: f64,
    #[arg(long, default_value_t = crate::prior::DEFAULT_SLATER_EXPONENT)]
    pub slater_exponent: u32,
    /// Average-value grid as start:stop:step (inclusive).
    #[arg(long, default_value = "0:1:0.1", allow_hyphen_values = true)]
    pub grid: String,
    /// Data region a,b (repeatable; the union is used).
    #[arg(long, allow_hyphen_values = true)]
    pub region: Vec<String>,
    #[arg(long, value_enum, default_value = "large-n")]
    pub method: MethodArg,
    /// Number of measurement repetitions for the finite-N method.
    #[arg(long = "N")]
    pub n_outcomes: Option<u32>,
    /// Initial Monte Carlo sample count per grid point.
    #[arg(long, default_value_t = 1 << 20)]
    pub samples: u64,
    /// Largest acceptable standard error; default 0.01 for the constant
    /// prior and 0.02 otherwise.
    #[arg(long)]
    pub target_stderr: Option<f64>,
    /// Use exactly --samples without adaptive refinement.
    #[arg(long)]
    pub fixed_budget: bool,
    #[arg(long, default_value_t = 1 << 32)]
    pub max_samples: u64,
    #[arg(long, default_value_t = 1 << 14)]
    pub chunk_size: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "pseudo")]
    pub sequence: SequenceArg,
    #[arg(long)]
    pub compare_maxent: bool,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Integrate every grid point directly instead of deriving negative
    /// average values from their mirror images.
    #[arg(long)]
    pub no_mirror: bool,
    /// Record wall-clock time per row (output is then not reproducible).
    #[arg(long)]
    pub timings: bool,
    /// Negate one Gell-Mann generator before validating (negative control).
    #[arg(long, hide = true)]
    pub corrupt_basis: bool,
}

/// Fully resolved run description, embedded in JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub prior: PriorSpec<f64>,
    pub method: MethodArg,
    pub mbar_grid: Vec<f64>,
    pub region: Option<AverageRegion>,
    pub n_outcomes: Option<u32>,
    pub integrator: IntegratorConfig,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub format: Format,
    pub compare_maxent: bool,
    pub mirror: bool,
    #[serde(skip)]
    pub timings: bool,
    #[serde(skip)]
    pub corrupt_basis: bool,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Integration(Error),
    Validation(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) | CliError::Validation(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Integration(e) => write!(f, "integration failure: {e}"),
            CliError::Validation(m) => write!(f, "validation failed: {m}"),
            CliError::Io(e) => write!(f, "I/O error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io),
            Error::InvalidArgument(m) => CliError::Config(m),
            Error::OutOfBox { .. } => CliError::Config(e.to_string()),
            other => CliError::Integration(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Parses `start:stop:step` into an inclusive grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Config(format!("grid must be start:stop:step, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !step.is_finite() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count)
        .map(|k| {
            let v = start + k as f64 * step;
            (v * 1e12).round() / 1e12
        })
        .collect();
    if grid.iter().any(|v| v.abs() > 1.0) {
        return Err(CliError::Config(format!(
            "grid {spec:?} leaves [-1, 1]"
        )));
    }
    Ok(grid)
}

/// Parses `pure1`, `pure0`, `pure-1` or `custom:<8 comma-separated floats>`.
pub fn parse_center(spec: &str) -> Result<Bloch<f64>, CliError> {
    match spec {
        "pure1" => Ok(Bloch::pure_plus()),
        "pure0" => Ok(Bloch::pure_zero()),
        "pure-1" => Ok(Bloch::pure_minus()),
        _ => {
            let body = spec.strip_prefix("custom:").ok_or_else(|| {
                CliError::Config(format!("unknown centre {spec:?}"))
            })?;
            let vals: Vec<f64> = body
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Config(format!("centre coordinates: {e}")))?;
            let coords: [f64; 8] = vals
                .try_into()
                .map_err(|_| CliError::Config("custom centre needs 8 coordinates".into()))?;
            Ok(Bloch(coords))
        }
    }
}

fn parse_region(specs: &[String]) -> Result<AverageRegion, CliError> {
    let mut intervals = Vec::new();
    for s in specs {
        let vals: Vec<f64> = s
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Config(format!("region {s:?}: {e}")))?;
        match vals[..] {
            [a] => intervals.push((a, a)),
            [a, b] => intervals.push((a, b)),
            _ => return Err(CliError::Config(format!("region must be a,b; got {s:?}"))),
        }
    }
    Ok(AverageRegion::new(intervals)?)
}

/// Worker-thread cap from [`THREADS_ENV`].
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            let k: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v:?} is not a count")))?;
            if k == 0 {
                return Err(CliError::Config(format!("{THREADS_ENV} must be positive")));
            }
            Ok(Some(k))
        }
        _ => Ok(None),
    }
}

impl RunArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let prior = match self.prior {
            PriorKind::Constant => PriorSpec::Constant,
            PriorKind::Slater => PriorSpec::slater(self.slater_exponent),
            PriorKind::Gaussian => PriorSpec::gaussian(parse_center(&self.center)?, self.breadth)?,
        };
        let target = if self.fixed_budget {
            None
        } else {
            Some(self.target_stderr.unwrap_or(match self.prior {
                PriorKind::Constant => 0.01,
                _ => 0.02,
            }))
        };
        let integrator = IntegratorConfig {
            n_samples: self.samples,
            seed: self.seed,
            sequence: match self.sequence {
                SequenceArg::Pseudo => Sequence::PseudoRandom,
                SequenceArg::Lowdisc => Sequence::LowDiscrepancy,
            },
            target_stderr: target,
            max_samples: self.max_samples.max(self.samples),
            chunk_size: self.chunk_size,
            threads: threads_from_env()?,
        };
        integrator.validate()?;
        let region = if self.region.is_empty() {
            None
        } else {
            Some(parse_region(&self.region)?)
        };
        match self.method {
            MethodArg::LargeN => {}
            MethodArg::LargeNRegion if region.is_none() => {
                return Err(CliError::Config("--method large-n-region needs --region".into()))
            }
            MethodArg::FiniteN if region.is_none() || self.n_outcomes.is_none() => {
                return Err(CliError::Config("--method finite-n needs --region and --N".into()))
            }
            _ => {}
        }
        Ok(RunConfig {
            prior,
            method: self.method,
            mbar_grid: parse_grid(&self.grid)?,
            region,
            n_outcomes: self.n_outcomes,
            integrator,
            output: self.output.clone(),
            format: self.format,
            compare_maxent: self.compare_maxent,
            mirror: !self.no_mirror,
            timings: self.timings,
            corrupt_basis: self.corrupt_basis,
        })
    }
}

fn write_output(cfg: &RunConfig, bytes: &[u8]) -> Result<(), CliError> {
    use std::io::Write;
    match &cfg.output {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = args.resolve()?;
            let bytes = run_sweep(&cfg)?;
            write_output(&cfg, &bytes)
        }
        Command::Validate(args) => {
            let cfg = args.resolve()?;
            let report = run_validate(&cfg)?;
            write_output(&cfg, report.to_string().as_bytes())?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Validation(report.failures().join(", ")))
            }
        }
    }
}

/// Entry point used by the binary.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qutrit-assign: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0:1:0.1").unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g[3], 0.3);
        assert_eq!(g[10], 1.0);
        assert_eq!(parse_grid("-0.5:0.5:0.5").unwrap(), vec![-0.5, 0.0, 0.5]);
        assert!(parse_grid("0:2:0.5").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("1:0:0.1").is_err());
    }

    #[test]
    fn center_parsing() {
        assert_eq!(parse_center("pure1").unwrap(), Bloch::pure_plus());
        assert_eq!(parse_center("pure0").unwrap(), Bloch::pure_zero());
        let c = parse_center("custom:0,0,0.5,0,0,0,0,0.1").unwrap();
        assert_eq!(c.0[2], 0.5);
        assert!(parse_center("custom:1,2").is_err());
        assert!(parse_center("mixed").is_err());
    }

    #[test]
    fn region_parsing() {
        let r = parse_region(&["0.45,0.55".into()]).unwrap();
        assert_eq!(r.intervals(), &[(0.45, 0.55)]);
        let p = parse_region(&["1".into()]).unwrap();
        assert_eq!(p.single_point(), Some(1.0));
        assert!(parse_region(&["0.5,0.4".into()]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Config(String::new()).exit_code(), 2);
        assert_eq!(CliError::from(Error::DegenerateSlice(1)).exit_code(), 3);
        assert_eq!(
            CliError::from(Error::InvalidArgument(String::new())).exit_code(),
            2
        );
        let io = std::io::Error::other("x");
        assert_eq!(CliError::from(io).exit_code(), 4);
    }
}
