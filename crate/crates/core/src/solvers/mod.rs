//! DPG, FDPG and GFDPG on the dual `q~ = F + G`.
//!
//! Every iteration takes one step `y_k = p_{L_k}(base)` where the base is
//! `y_{k-1}` for DPG and the extrapolated point `w_{k-1}` otherwise. The step
//! is computed in the primal-friendly form
//!
//! ```text
//! u = x(base),  v = prox_{L g}(A u - L base),  y = base - (A u - v) / L
//! ```
//!
//! which also yields `v = z(y)` and hence `G(y)` without a conjugate oracle.

mod schedule;
mod step;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use schedule::{
    fista_momentum, gfdpg_coefficients, gfdpg_momentum, make_schedule, MomentumSequence, Schedule,
    ScheduleKind,
};
pub use step::{
    backtracking_search, dpg_step, prox_form_step, step_residual, AcceptedStep, DpgStep,
    MAX_DOUBLINGS,
};

use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::linalg::{all_finite, dist, norm};
use crate::model::{CompositeProblem, SmoothDual};
use step::search_from;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dpg,
    Fdpg,
    Gfdpg,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Dpg => "dpg",
            Method::Fdpg => "fdpg",
            Method::Gfdpg => "gfdpg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dpg" => Ok(Method::Dpg),
            "fdpg" => Ok(Method::Fdpg),
            "gfdpg" => Ok(Method::Gfdpg),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

pub const DEFAULT_ETA: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Constant `L`, normally `L_F`.
    Fixed { lipschitz: f64 },
    /// Start at `initial`, multiply by `eta` until sufficient decrease holds.
    Backtracking { initial: f64, eta: f64 },
}

impl StepRule {
    pub fn fixed_at(problem: &CompositeProblem) -> Self {
        StepRule::Fixed {
            lipschitz: problem.lipschitz(),
        }
    }

    /// `L_0 = max(L_F / 16, tiny)` and `eta = 2`.
    pub fn default_backtracking(problem: &CompositeProblem) -> Self {
        StepRule::Backtracking {
            initial: (problem.lipschitz() / 16.0).max(f64::MIN_POSITIVE.sqrt()),
            eta: DEFAULT_ETA,
        }
    }

    fn initial(&self) -> f64 {
        match *self {
            StepRule::Fixed { lipschitz } => lipschitz,
            StepRule::Backtracking { initial, .. } => initial,
        }
    }

    fn eta(&self) -> f64 {
        match *self {
            StepRule::Fixed { .. } => DEFAULT_ETA,
            StepRule::Backtracking { eta, .. } => eta,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub method: Method,
    /// Used by GFDPG only; FDPG always runs the FISTA sequence.
    pub schedule: Schedule,
    pub step: StepRule,
    /// Zero vector when absent.
    pub y0: Option<Vec<f64>>,
    pub max_iters: usize,
    /// Stop once `||p_{L'}(y_k) - y_k|| <= pg_tol`; `0` disables the test.
    pub pg_tol: f64,
    /// Evaluate `p_{L'}(y_k)` every iteration.
    pub probe: bool,
}

impl SolverConfig {
    pub fn new(method: Method, step: StepRule, max_iters: usize) -> Self {
        Self {
            method,
            schedule: Schedule::fista(),
            step,
            y0: None,
            max_iters,
            pg_tol: 0.0,
            probe: true,
        }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_y0(mut self, y0: Vec<f64>) -> Self {
        self.y0 = Some(y0);
        self
    }
}

/// `p_{L'}(y_k)` with `L'` found by backtracking from `L_k`.
#[derive(Debug, Clone)]
pub struct ProxProbe {
    pub lipschitz: f64,
    pub p: Vec<f64>,
    /// `||p - y_k||`.
    pub pg_norm: f64,
    pub p_norm: f64,
    /// `q~(p)`.
    pub dual_value: f64,
    /// `H~(x(p), z(p)) - q(p)`.
    pub split_gap: f64,
    /// `H(x(p)) - q(p)`.
    pub primal_gap: ExtReal,
}

#[derive(Debug, Clone)]
pub struct IterateRecord {
    pub k: usize,
    /// `L_k`, the constant of the step producing `y_k`.
    pub lipschitz: f64,
    pub t_prev: Option<f64>,
    pub big_t_prev: Option<f64>,
    pub t: Option<f64>,
    pub big_t: Option<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    /// `q~(y_k)`.
    pub dual_value: f64,
    /// `H(x(y_k))`.
    pub primal_value: ExtReal,
    /// `||y_k - base||` with base `w_{k-1}` (or `y_{k-1}` for DPG).
    pub step_norm: f64,
    /// `H~(x(y_k), z(y_k)) - q(y_k)`.
    pub split_gap: f64,
    /// `||A u_k - v_k||`.
    pub infeasibility: f64,
    pub step_residual: f64,
    /// `||A u_k||`, the scale of the residual above.
    pub au_norm: f64,
    /// Distance between the table form of `w_k` and its `s`-sequence form.
    pub s_form_gap: Option<f64>,
    pub probe: Option<ProxProbe>,
}

impl IterateRecord {
    pub fn pg_norm(&self) -> Option<f64> {
        self.probe.as_ref().map(|p| p.pg_norm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualIterateState {
    pub k: usize,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub s: Option<Vec<f64>>,
    pub y_prev: Vec<f64>,
    pub w_prev: Vec<f64>,
    pub lipschitz: f64,
    pub t: f64,
    pub big_t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIters,
    ProxGradTolerance,
    /// `y_k = w_{k-1}` and `w_k = y_k` exactly, so every later iterate repeats.
    Stagnation,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::MaxIters => "max-iters",
            Termination::ProxGradTolerance => "prox-grad tolerance",
            Termination::Stagnation => "stagnation",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub method: Method,
    pub schedule: ScheduleKind,
    pub y0: Vec<f64>,
    pub state: DualIterateState,
    pub records: Vec<IterateRecord>,
    pub termination: Termination,
    pub elapsed: Duration,
}

impl SolverReport {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }
}

/// A run that failed part-way; `partial` holds every completed iteration.
#[derive(Debug, Error)]
#[error("solver aborted after {} iterations: {error}", partial.records.len())]
pub struct SolverAbort {
    pub error: Error,
    pub partial: Box<SolverReport>,
}

fn probe(
    problem: &CompositeProblem,
    y: &[f64],
    at_y: &SmoothDual,
    l_start: f64,
    eta: f64,
) -> Result<ProxProbe> {
    let acc = search_from(problem, y, at_y, l_start, eta, true)?;
    let p = acc.step.y;
    let f_xp = problem
        .f()
        .value(&acc.at_y.x)
        .finite()
        .ok_or_else(|| Error::NonFinite("f at x(p)".into()))?;
    let g_zp = problem.g().value(&acc.step.v);
    let g_axp = problem.g().value(&acc.at_y.ax);
    let split_gap = (g_zp + (f_xp + acc.dual_value)).to_f64();
    Ok(ProxProbe {
        lipschitz: acc.lipschitz,
        pg_norm: dist(&p, y),
        p_norm: norm(&p),
        dual_value: acc.dual_value,
        split_gap,
        primal_gap: g_axp + (f_xp + acc.dual_value),
        p,
    })
}

pub fn run_solver(
    problem: &CompositeProblem,
    config: &SolverConfig,
) -> std::result::Result<SolverReport, SolverAbort> {
    let started = Instant::now();
    let m = problem.dual_dim();
    let y0 = config.y0.clone().unwrap_or_else(|| vec![0.0; m]);
    let schedule_kind = match config.method {
        Method::Gfdpg => config.schedule.kind().clone(),
        Method::Fdpg => ScheduleKind::Fista,
        Method::Dpg => ScheduleKind::Fista,
    };
    let mut report = SolverReport {
        method: config.method,
        schedule: schedule_kind,
        state: DualIterateState {
            k: 0,
            y: y0.clone(),
            w: y0.clone(),
            s: (config.method == Method::Gfdpg).then(|| y0.clone()),
            y_prev: y0.clone(),
            w_prev: y0.clone(),
            lipschitz: config.step.initial(),
            t: 1.0,
            big_t: 1.0,
        },
        y0,
        records: Vec::with_capacity(config.max_iters),
        termination: Termination::MaxIters,
        elapsed: Duration::ZERO,
    };
    match iterate(problem, config, &mut report) {
        Ok(()) => {
            report.elapsed = started.elapsed();
            Ok(report)
        }
        Err(error) => {
            report.elapsed = started.elapsed();
            Err(SolverAbort {
                error,
                partial: Box::new(report),
            })
        }
    }
}

fn iterate(
    problem: &CompositeProblem,
    config: &SolverConfig,
    report: &mut SolverReport,
) -> Result<()> {
    check_dim(problem.dual_dim(), report.y0.len())?;
    if !all_finite(&report.y0) {
        return Err(Error::NonFinite("y0".into()));
    }
    if !(config.pg_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "pg_tol must be >= 0, got {}",
            config.pg_tol
        )));
    }
    let (search, eta) = match config.step {
        StepRule::Fixed { .. } => (false, DEFAULT_ETA),
        StepRule::Backtracking { eta, .. } => (true, eta),
    };
    let momentum = match config.method {
        Method::Dpg => None,
        Method::Fdpg => Some(Schedule::fista().sequence(config.max_iters + 1)?),
        Method::Gfdpg => Some(config.schedule.sequence(config.max_iters + 1)?),
    };
    if let Some(seq) = &momentum {
        report.state.t = seq.t[0];
        report.state.big_t = seq.big_t[0];
    }

    let state = &mut report.state;
    let mut at_base = problem.smooth_dual(&state.w)?;
    let mut lipschitz = config.step.initial();
    for k in 1..=config.max_iters {
        let base = state.w.clone();
        let acc = search_from(
            problem,
            &base,
            &at_base,
            lipschitz,
            config.step.eta(),
            search,
        )?;
        lipschitz = acc.lipschitz;
        let y = acc.step.y.clone();

        let (w, t_info, s_form_gap) = match (&momentum, config.method) {
            (None, _) => (y.clone(), None, None),
            (Some(seq), Method::Fdpg) => {
                let (t_prev, t_k) = (seq.t[k - 1], seq.t[k]);
                let c = (t_prev - 1.0) / t_k;
                let w = y
                    .iter()
                    .zip(&state.y)
                    .map(|(yk, yp)| yk + c * (yk - yp))
                    .collect();
                (w, Some((t_prev, seq.big_t[k - 1], t_k, seq.big_t[k])), None)
            }
            (Some(seq), _) => {
                let (t_prev, t_k) = (seq.t[k - 1], seq.t[k]);
                let (bt_prev, bt_k) = (seq.big_t[k - 1], seq.big_t[k]);
                let w = gfdpg_momentum(&y, &state.y, &base, t_prev, t_k, bt_prev, bt_k);
                let s = state.s.as_mut().expect("GFDPG keeps an s-sequence");
                for (si, (yk, wp)) in s.iter_mut().zip(y.iter().zip(&base)) {
                    *si += t_prev * (yk - wp);
                }
                let w_s: Vec<f64> = y
                    .iter()
                    .zip(s.iter())
                    .map(|(yk, si)| (bt_prev / bt_k) * yk + (t_k / bt_k) * si)
                    .collect();
                let gap = dist(&w, &w_s);
                (w, Some((t_prev, bt_prev, t_k, bt_k)), Some(gap))
            }
        };
        if !all_finite(&w) {
            return Err(Error::NonFinite(format!("extrapolated point at k = {k}")));
        }

        let at_y = acc.at_y.clone();
        let f_x = problem
            .f()
            .value(&at_y.x)
            .finite()
            .ok_or_else(|| Error::NonFinite("f at x(y_k)".into()))?;
        let primal_value = problem.g().value(&at_y.ax) + f_x;
        let split_gap = (problem.g().value(&acc.step.v) + (f_x + acc.dual_value)).to_f64();
        let probe = if config.probe {
            Some(probe(problem, &y, &at_y, lipschitz, eta)?)
        } else {
            None
        };
        let stagnated = y == base && w == y;

        let record = IterateRecord {
            k,
            lipschitz,
            t_prev: t_info.map(|t| t.0),
            big_t_prev: t_info.map(|t| t.1),
            t: t_info.map(|t| t.2),
            big_t: t_info.map(|t| t.3),
            step_norm: dist(&y, &base),
            infeasibility: dist(&acc.step.au, &acc.step.v),
            step_residual: step_residual(&acc.step, &base, lipschitz),
            au_norm: norm(&acc.step.au),
            dual_value: acc.dual_value,
            primal_value,
            split_gap,
            s_form_gap,
            probe,
            y: y.clone(),
            w: w.clone(),
        };
        let pg = record.pg_norm();
        report.records.push(record);
        if let Some((_, _, t, big_t)) = t_info {
            state.t = t;
            state.big_t = big_t;
        }
        state.k = k;
        state.lipschitz = lipschitz;
        state.y_prev = std::mem::replace(&mut state.y, y);
        state.w_prev = std::mem::replace(&mut state.w, w);

        if config.pg_tol > 0.0 && pg.is_some_and(|v| v <= config.pg_tol) {
            report.termination = Termination::ProxGradTolerance;
            return Ok(());
        }
        if stagnated {
            report.termination = Termination::Stagnation;
            return Ok(());
        }
        at_base = if config.method == Method::Dpg {
            at_y
        } else {
            problem.smooth_dual(&state.w)?
        };
    }
    report.termination = Termination::MaxIters;
    Ok(())
}
