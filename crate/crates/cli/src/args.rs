use std::ffi::OsString;
use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use dualprox_core::diagnostics::{BoundId, CertOptions};
use dualprox_core::problems::{ReferenceMode, DEFAULT_SEED};
use dualprox_core::solvers::{Method, DEFAULT_ETA};

use crate::commands::{
    cmd_compare, cmd_rates, cmd_run, cmd_verify, rates_table, RatesOptions, VerifyOptions,
};
use crate::config::{schedule_from_parts, source_from_arg, RunConfig, StepChoice, Y0Mode};
use crate::{CliError, Status};

/// Dual proximal-gradient solvers with convergence certificates.
#[derive(Debug, Parser)]
#[command(name = "dualprox", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a solver and write the per-iteration trace CSV.
    Run(RunArgs),
    /// Run a solver and write the certificate CSV.
    Verify(VerifyArgs),
    /// Run several configurations on one problem side by side.
    Compare(CompareArgs),
    /// Fit log-log slopes to a metric of trace CSVs.
    Rates(RatesArgs),
    /// Print the normalized configuration (usable with `compare`).
    Config(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Builtin instance name or a problem spec file.
    #[arg(long, default_value = "tv1d-toy")]
    pub problem: String,
    /// dpg, fdpg or gfdpg.
    #[arg(long, default_value = "fdpg")]
    pub method: String,
    /// fista, poly or fixed_horizon (gfdpg only).
    #[arg(long, default_value = "fista")]
    pub schedule: String,
    /// Parameter of the poly schedule, t_k = (k + a) / a.
    #[arg(long)]
    pub a: Option<f64>,
    /// Horizon of the fixed_horizon schedule.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Initial constant for backtracking (default L_F / 16).
    #[arg(long = "L0")]
    pub l0: Option<f64>,
    /// Backtracking growth factor.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Fixed step constant; without a value, L_F.
    #[arg(long = "fixed-L", num_args = 0..=1, default_missing_value = "lf")]
    pub fixed_l: Option<String>,
    /// Maximum number of iterations.
    #[arg(long, default_value_t = 1000)]
    pub iters: usize,
    /// Stop once the prox-gradient norm falls to this value (0 disables).
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// `zero` or a file of comma- or whitespace-separated numbers.
    #[arg(long, default_value = "zero")]
    pub y0: String,
    /// Seed for randomly generated instances.
    #[arg(long, env = "DUALPROX_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Reference oracle; chosen from the instance when omitted.
    #[arg(long = "ref")]
    pub reference: Option<String>,
    /// Also evaluate every certificate (`run` only).
    #[arg(long)]
    pub certs: bool,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot path (`compare` only).
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated bound ids (all bounds defined for the run by default).
    #[arg(long, value_delimiter = ',')]
    pub bounds: Option<Vec<String>>,
    /// Multiplies every bound, to check that violations are caught.
    #[arg(long, hide = true, default_value_t = 1.0)]
    pub bound_scale: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Configuration files in normalized form, or inline `key=value;key=value`.
    pub configs: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RatesArgs {
    pub files: Vec<PathBuf>,
    /// Trace column to fit.
    #[arg(long, default_value = "pg_norm")]
    pub metric: String,
    /// `first:last` range of k (either end may be omitted).
    #[arg(long, default_value = "1:", value_parser = parse_window)]
    pub window: RangeInclusive<usize>,
    /// Fit the running minimum of the metric.
    #[arg(long)]
    pub envelope: bool,
    /// Subtracted from the metric before fitting, e.g. the optimal dual value.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub baseline: f64,
}

pub fn parse_window(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (lo, hi) = s.split_once(':').ok_or("expected first:last")?;
    let lo = if lo.is_empty() {
        1
    } else {
        lo.parse().map_err(|_| format!("bad start `{lo}`"))?
    };
    let hi = if hi.is_empty() {
        usize::MAX
    } else {
        hi.parse().map_err(|_| format!("bad end `{hi}`"))?
    };
    if lo > hi {
        return Err(format!("empty window {lo}:{hi}"));
    }
    Ok(lo..=hi)
}

impl RunArgs {
    pub fn to_config(&self) -> Result<RunConfig, CliError> {
        let method: Method = self.method.parse().map_err(CliError::config)?;
        let schedule = schedule_from_parts(&self.schedule, self.a, self.n)?;
        let step = match &self.fixed_l {
            Some(_) if self.l0.is_some() || self.eta.is_some() => {
                return Err(CliError::usage("--fixed-L conflicts with --L0 and --eta"))
            }
            Some(v) if v == "lf" => StepChoice::Fixed(None),
            Some(v) => {
                StepChoice::Fixed(Some(v.parse().map_err(|_| {
                    CliError::usage(format!("--fixed-L: `{v}` is not a number"))
                })?))
            }
            None if self.l0.is_some() || self.eta.is_some() => StepChoice::Backtrack {
                l0: self.l0,
                eta: self.eta.unwrap_or(DEFAULT_ETA),
            },
            None => StepChoice::Fixed(None),
        };
        let reference = self
            .reference
            .as_deref()
            .map(str::parse::<ReferenceMode>)
            .transpose()
            .map_err(CliError::config)?;
        let config = RunConfig {
            problem: source_from_arg(&self.problem),
            method,
            schedule,
            step,
            y0: match self.y0.as_str() {
                "zero" => Y0Mode::Zero,
                path => Y0Mode::File(PathBuf::from(path)),
            },
            max_iters: self.iters,
            pg_tol: self.tol,
            certs: self.certs,
            reference,
            out: self.out.clone(),
            svg: self.svg.clone(),
            seed: self.seed,
        };
        config.validate()?;
        Ok(config)
    }
}

fn load_compare_config(arg: &str) -> Result<RunConfig, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {arg}: {e}")))?;
        RunConfig::parse_normalized(&text)
    } else if arg.contains('=') {
        RunConfig::parse_normalized(&arg.replace(';', "\n"))
    } else {
        Err(CliError::usage(format!(
            "`{arg}` is neither a file nor an inline configuration"
        )))
    }
}

fn dispatch(cli: Cli) -> Result<Status, CliError> {
    match cli.command {
        Command::Run(args) => cmd_run(&args.to_config()?),
        Command::Verify(args) => {
            let bounds = args
                .bounds
                .map(|ids| {
                    ids.iter()
                        .map(|s| s.trim().parse::<BoundId>())
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()
                .map_err(CliError::config)?;
            let options = VerifyOptions {
                bounds,
                cert: CertOptions {
                    bound_scale: args.bound_scale,
                },
            };
            cmd_verify(&args.run.to_config()?, &options)
        }
        Command::Compare(args) => {
            let configs = args
                .configs
                .iter()
                .map(|c| load_compare_config(c))
                .collect::<Result<Vec<_>, _>>()?;
            cmd_compare(&configs, args.out.as_deref(), args.svg.as_deref())
        }
        Command::Rates(args) => {
            if args.files.is_empty() {
                return Err(CliError::usage("rates needs at least one trace file"));
            }
            let options = RatesOptions {
                metric: args.metric,
                window: args.window,
                envelope: args.envelope,
                baseline: args.baseline,
            };
            print!("{}", rates_table(&cmd_rates(&args.files, &options)?));
            Ok(Status::Success)
        }
        Command::Config(args) => {
            print!("{}", args.to_config()?.normalized());
            Ok(Status::Success)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
