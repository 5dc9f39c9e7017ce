use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use dualprox_core::problems::ReferenceMode;
use dualprox_core::problems::{
    builtin, parse_key_values, parse_spec_file, ProblemSpec, BUILTINS, DEFAULT_SEED,
};
use dualprox_core::solvers::{
    make_schedule, Method, ScheduleKind, SolverConfig, StepRule, DEFAULT_ETA,
};
use dualprox_core::CompositeProblem;

use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSource {
    Builtin(String),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepChoice {
    /// `None` means `L_F`.
    Fixed(Option<f64>),
    /// `None` means `L_F / 16`.
    Backtrack { l0: Option<f64>, eta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Y0Mode {
    Zero,
    File(PathBuf),
}

/// Everything a single solver invocation depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSource,
    pub method: Method,
    pub schedule: ScheduleKind,
    pub step: StepChoice,
    pub y0: Y0Mode,
    pub max_iters: usize,
    pub pg_tol: f64,
    pub certs: bool,
    /// `None` picks enumeration when the instance supports it.
    pub reference: Option<ReferenceMode>,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSource::Builtin("tv1d-toy".into()),
            method: Method::Fdpg,
            schedule: ScheduleKind::Fista,
            step: StepChoice::Fixed(None),
            y0: Y0Mode::Zero,
            max_iters: 1000,
            pg_tol: 0.0,
            certs: false,
            reference: None,
            out: None,
            svg: None,
            seed: DEFAULT_SEED,
        }
    }
}

/// Schedule from its name and the `a` / `N` parameters.
pub fn schedule_from_parts(
    name: &str,
    a: Option<f64>,
    n: Option<usize>,
) -> Result<ScheduleKind, CliError> {
    let kind = match name {
        "fista" => ScheduleKind::Fista,
        "poly" => ScheduleKind::Poly {
            a: a.ok_or_else(|| CliError::usage("poly schedule needs --a"))?,
        },
        "fixed_horizon" => ScheduleKind::FixedHorizon {
            n: n.ok_or_else(|| CliError::usage("fixed_horizon schedule needs --N"))?,
        },
        other => {
            return Err(CliError::usage(format!(
                "unknown schedule `{other}` (fista|poly|fixed_horizon)"
            )))
        }
    };
    make_schedule(kind.clone()).map_err(CliError::config)?;
    Ok(kind)
}

const CONFIG_KEYS: [&str; 17] = [
    "problem", "method", "schedule", "a", "N", "step", "L", "L0", "eta", "y0", "iters", "tol",
    "certs", "ref", "out", "svg", "seed",
];

impl RunConfig {
    /// Rejects combinations that cannot run.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.method != Method::Gfdpg && self.schedule != ScheduleKind::Fista {
            return Err(CliError::usage(format!(
                "--schedule {} applies to gfdpg only",
                self.schedule.name()
            )));
        }
        if let ScheduleKind::Custom(_) = self.schedule {
            return Err(CliError::usage(
                "custom schedules are not available from the command line",
            ));
        }
        make_schedule(self.schedule.clone()).map_err(CliError::config)?;
        if let ScheduleKind::FixedHorizon { n } = self.schedule {
            if self.max_iters > n {
                return Err(CliError::usage(format!(
                    "fixed_horizon N = {n} covers at most {n} iterations, asked for {}",
                    self.max_iters
                )));
            }
        }
        match self.step {
            StepChoice::Fixed(Some(l)) if !(l.is_finite() && l > 0.0) => {
                return Err(CliError::usage(format!(
                    "--fixed-L must be positive, got {l}"
                )))
            }
            StepChoice::Backtrack { l0, eta } => {
                if let Some(l0) = l0 {
                    if !(l0.is_finite() && l0 > 0.0) {
                        return Err(CliError::usage(format!("--L0 must be positive, got {l0}")));
                    }
                }
                if !(eta.is_finite() && eta > 1.0) {
                    return Err(CliError::usage(format!("--eta must exceed 1, got {eta}")));
                }
            }
            _ => {}
        }
        if !(self.pg_tol.is_finite() && self.pg_tol >= 0.0) {
            return Err(CliError::usage(format!(
                "--tol must be nonnegative, got {}",
                self.pg_tol
            )));
        }
        if let ProblemSource::Builtin(name) = &self.problem {
            if !BUILTINS.contains(&name.as_str()) {
                return Err(CliError::usage(format!(
                    "unknown problem `{name}` (a spec file path or one of {})",
                    BUILTINS.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn problem_spec(&self) -> Result<ProblemSpec, CliError> {
        match &self.problem {
            ProblemSource::Builtin(name) => {
                builtin(name, Some(self.seed)).map_err(CliError::config)
            }
            ProblemSource::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
                // later keys win, so a seed in the file overrides this one
                parse_spec_file(&format!("seed = {}\n{text}", self.seed))
                    .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
            }
        }
    }

    pub fn load_y0(&self, dim: usize) -> Result<Option<Vec<f64>>, CliError> {
        let Y0Mode::File(path) = &self.y0 else {
            return Ok(None);
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        let y0 = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    CliError::usage(format!("{}: `{s}` is not a number", path.display()))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if y0.len() != dim {
            return Err(CliError::usage(format!(
                "{}: y0 has {} entries, the dual dimension is {dim}",
                path.display(),
                y0.len()
            )));
        }
        Ok(Some(y0))
    }

    pub fn solver_config(&self, problem: &CompositeProblem) -> Result<SolverConfig, CliError> {
        let step = match self.step {
            StepChoice::Fixed(l) => StepRule::Fixed {
                lipschitz: l.unwrap_or_else(|| problem.lipschitz()),
            },
            StepChoice::Backtrack { l0, eta } => StepRule::Backtracking {
                initial: l0.unwrap_or_else(|| match StepRule::default_backtracking(problem) {
                    StepRule::Backtracking { initial, .. } => initial,
                    StepRule::Fixed { lipschitz } => lipschitz,
                }),
                eta,
            },
        };
        let schedule = make_schedule(self.schedule.clone()).map_err(CliError::config)?;
        let mut config =
            SolverConfig::new(self.method, step, self.max_iters).with_schedule(schedule);
        config.pg_tol = self.pg_tol;
        if let Some(y0) = self.load_y0(problem.dual_dim())? {
            config = config.with_y0(y0);
        }
        Ok(config)
    }

    /// One `key = value` line per field, in a fixed order.
    pub fn normalized(&self) -> String {
        let mut s = String::new();
        let problem = match &self.problem {
            ProblemSource::Builtin(name) => format!("builtin:{name}"),
            ProblemSource::File(p) => format!("file:{}", p.display()),
        };
        let _ = writeln!(s, "problem = {problem}");
        let _ = writeln!(s, "method = {}", self.method);
        let _ = writeln!(s, "schedule = {}", self.schedule.name());
        match self.schedule {
            ScheduleKind::Poly { a } => {
                let _ = writeln!(s, "a = {a:?}");
            }
            ScheduleKind::FixedHorizon { n } => {
                let _ = writeln!(s, "N = {n}");
            }
            _ => {}
        }
        match self.step {
            StepChoice::Fixed(l) => {
                let _ = writeln!(s, "step = fixed");
                if let Some(l) = l {
                    let _ = writeln!(s, "L = {l:?}");
                }
            }
            StepChoice::Backtrack { l0, eta } => {
                let _ = writeln!(s, "step = backtrack");
                if let Some(l0) = l0 {
                    let _ = writeln!(s, "L0 = {l0:?}");
                }
                let _ = writeln!(s, "eta = {eta:?}");
            }
        }
        let y0 = match &self.y0 {
            Y0Mode::Zero => "zero".to_string(),
            Y0Mode::File(p) => format!("file:{}", p.display()),
        };
        let _ = writeln!(s, "y0 = {y0}");
        let _ = writeln!(s, "iters = {}", self.max_iters);
        let _ = writeln!(s, "tol = {:?}", self.pg_tol);
        let _ = writeln!(s, "certs = {}", self.certs);
        let reference = self.reference.map_or("auto".to_string(), |r| r.to_string());
        let _ = writeln!(s, "ref = {reference}");
        if let Some(p) = &self.out {
            let _ = writeln!(s, "out = {}", p.display());
        }
        if let Some(p) = &self.svg {
            let _ = writeln!(s, "svg = {}", p.display());
        }
        let _ = writeln!(s, "seed = {}", self.seed);
        s
    }

    /// Inverse of [`RunConfig::normalized`]; missing keys take their defaults.
    pub fn parse_normalized(text: &str) -> Result<Self, CliError> {
        let kv = parse_key_values(text).map_err(CliError::config)?;
        if let Some((key, _)) = kv.entries().find(|(k, _)| !CONFIG_KEYS.contains(k)) {
            return Err(CliError::usage(format!(
                "unknown configuration key `{key}`"
            )));
        }
        let defaults = RunConfig::default();
        let get_num = |key: &str| -> Result<Option<f64>, CliError> {
            kv.scalar(key).map_err(CliError::config)
        };
        let problem = match kv.get("problem") {
            None => defaults.problem,
            Some(p) => {
                if let Some(name) = p.strip_prefix("builtin:") {
                    ProblemSource::Builtin(name.to_string())
                } else if let Some(path) = p.strip_prefix("file:") {
                    ProblemSource::File(PathBuf::from(path))
                } else {
                    source_from_arg(p)
                }
            }
        };
        let method = match kv.get("method") {
            None => defaults.method,
            Some(m) => m.parse().map_err(CliError::config)?,
        };
        let n = kv.scalar::<usize>("N").map_err(CliError::config)?;
        let schedule =
            schedule_from_parts(kv.get("schedule").unwrap_or("fista"), get_num("a")?, n)?;
        let step = match kv.get("step").unwrap_or("fixed") {
            "fixed" => StepChoice::Fixed(get_num("L")?),
            "backtrack" => StepChoice::Backtrack {
                l0: get_num("L0")?,
                eta: get_num("eta")?.unwrap_or(DEFAULT_ETA),
            },
            other => {
                return Err(CliError::usage(format!(
                    "unknown step rule `{other}` (fixed|backtrack)"
                )))
            }
        };
        let y0 = match kv.get("y0") {
            None | Some("zero") => Y0Mode::Zero,
            Some(v) => Y0Mode::File(PathBuf::from(v.strip_prefix("file:").unwrap_or(v))),
        };
        let reference = match kv.get("ref") {
            None | Some("auto") => None,
            Some(r) => Some(r.parse().map_err(CliError::config)?),
        };
        let config = RunConfig {
            problem,
            method,
            schedule,
            step,
            y0,
            max_iters: kv
                .scalar("iters")
                .map_err(CliError::config)?
                .unwrap_or(defaults.max_iters),
            pg_tol: get_num("tol")?.unwrap_or(defaults.pg_tol),
            certs: kv
                .scalar("certs")
                .map_err(CliError::config)?
                .unwrap_or(false),
            reference,
            out: kv.get("out").map(PathBuf::from),
            svg: kv.get("svg").map(PathBuf::from),
            seed: kv
                .scalar("seed")
                .map_err(CliError::config)?
                .unwrap_or(defaults.seed),
        };
        config.validate()?;
        Ok(config)
    }
}

/// A builtin name, or otherwise a spec file path.
pub fn source_from_arg(arg: &str) -> ProblemSource {
    if BUILTINS.contains(&arg) {
        ProblemSource::Builtin(arg.to_string())
    } else {
        ProblemSource::File(PathBuf::from(arg))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::parse_normalized(&c.normalized()).unwrap(), c);
    }

    #[test]
    fn schedule_only_for_gfdpg() {
        let c = RunConfig {
            method: Method::Dpg,
            schedule: ScheduleKind::Poly { a: 3.0 },
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn horizon_must_cover_iterations() {
        let c = RunConfig {
            method: Method::Gfdpg,
            schedule: ScheduleKind::FixedHorizon { n: 100 },
            max_iters: 101,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::parse_normalized("method = dpg\nmax_iters = 5\n").is_err());
    }

    #[test]
    fn poly_below_two_is_rejected() {
        assert!(schedule_from_parts("poly", Some(1.5), None).is_err());
        assert!(schedule_from_parts("poly", None, None).is_err());
        assert_eq!(
            schedule_from_parts("poly", Some(3.0), None).unwrap(),
            ScheduleKind::Poly { a: 3.0 }
        );
    }
}
