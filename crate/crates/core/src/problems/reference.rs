use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::diagnostics::{Provenance, ReferenceSolution};
use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::model::{CompositeProblem, DualQpForm, TermState};
use crate::solvers::{dpg_step, fista_momentum};

pub const MAX_ENUMERATE_DIM: usize = 14;
pub const LONGRUN_MAX_ITERS: usize = 1_000_000;
pub const DEFAULT_REF_TOL: f64 = 1e-12;
const CHECK_EVERY: usize = 100;
/// Relative tolerance for piece membership and stationarity of a pattern.
const PATTERN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceMode {
    Enumerate,
    LongRun,
}

impl fmt::Display for ReferenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReferenceMode::Enumerate => "enumerate",
            ReferenceMode::LongRun => "longrun",
        })
    }
}

impl FromStr for ReferenceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "enumerate" => Ok(ReferenceMode::Enumerate),
            "longrun" => Ok(ReferenceMode::LongRun),
            other => Err(Error::InvalidArgument(format!(
                "unknown reference mode `{other}` (enumerate|longrun)"
            ))),
        }
    }
}

/// Solution of the dual QP restricted to one active-set pattern, if the
/// pattern is consistent (free coordinates inside their piece, fixed
/// coordinates stationary).
fn solve_pattern(form: &DualQpForm, states: &[TermState]) -> Option<(Vec<f64>, bool)> {
    let m = states.len();
    let mut y = vec![0.0; m];
    let mut free = Vec::with_capacity(m);
    for (i, s) in states.iter().enumerate() {
        match *s {
            TermState::Fixed { at, .. } => y[i] = at,
            TermState::Free { .. } => free.push(i),
        }
    }
    let mut singular = false;
    if !free.is_empty() {
        let nf = free.len();
        let p_ff = DMatrix::from_fn(nf, nf, |a, b| form.hessian[(free[a], free[b])]);
        let rhs = DVector::from_fn(nf, |a, _| {
            let i = free[a];
            let slope = match states[i] {
                TermState::Free { slope, .. } => slope,
                TermState::Fixed { .. } => unreachable!(),
            };
            let coupling: f64 = (0..m)
                .filter(|j| matches!(states[*j], TermState::Fixed { .. }))
                .map(|j| form.hessian[(i, j)] * y[j])
                .sum();
            -(form.linear[i] + slope + coupling)
        });
        let sol = match nalgebra::Cholesky::new(p_ff.clone()) {
            Some(chol) => chol.solve(&rhs),
            None => {
                singular = true;
                let svd = p_ff.clone().svd(true, true);
                let cutoff = 1e-12 * svd.singular_values.max();
                let sol = svd.pseudo_inverse(cutoff).ok()? * &rhs;
                let residual = (&p_ff * &sol - &rhs).norm();
                if residual > PATTERN_TOL * (1.0 + rhs.norm()) {
                    return None;
                }
                sol
            }
        };
        for (a, &i) in free.iter().enumerate() {
            let v = sol[a];
            let TermState::Free { lo, hi, .. } = states[i] else {
                unreachable!()
            };
            if v < lo - PATTERN_TOL * (1.0 + lo.abs()) || v > hi + PATTERN_TOL * (1.0 + hi.abs()) {
                return None;
            }
            y[i] = v.clamp(lo, hi);
        }
    }
    let grad = form.smooth_gradient(&y);
    for (i, s) in states.iter().enumerate() {
        if let TermState::Fixed { lower, upper, .. } = *s {
            let g = -grad[i];
            let tol = PATTERN_TOL * (1.0 + grad[i].abs());
            if g < lower - tol || g > upper + tol {
                return None;
            }
        }
    }
    Some((y, singular))
}

struct Enumerated {
    y: Vec<f64>,
    value: f64,
    patterns: usize,
    rank_deficient: bool,
}

fn enumerate(form: &DualQpForm) -> Result<Enumerated> {
    let all: Vec<Vec<TermState>> = form.terms.iter().map(|t| t.states()).collect();
    let patterns: usize = all.iter().map(|s| s.len()).product();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut rank_deficient = false;
    let mut states = Vec::with_capacity(all.len());
    for index in 0..patterns {
        states.clear();
        let mut rest = index;
        for choices in &all {
            states.push(choices[rest % choices.len()]);
            rest /= choices.len();
        }
        let Some((y, singular)) = solve_pattern(form, &states) else {
            continue;
        };
        rank_deficient |= singular;
        let Some(value) = form.value(&y).finite() else {
            continue;
        };
        let replace = match &best {
            None => true,
            Some((by, bv)) => {
                let tie = 1e-12 * (1.0 + bv.abs());
                value < bv - tie || (rank_deficient && value <= bv + tie && norm(&y) < norm(by))
            }
        };
        if replace {
            best = Some((y, value));
        }
    }
    let (y, value) = best.ok_or(Error::NoStationaryPattern { patterns })?;
    Ok(Enumerated {
        y,
        value,
        patterns,
        rank_deficient,
    })
}

/// Re-solves the pattern read off `y` exactly.
fn polish(form: &DualQpForm, y: &[f64]) -> Option<Vec<f64>> {
    let near = |a: f64, b: f64| (a - b).abs() <= 1e-8 * (1.0 + b.abs());
    let states: Vec<TermState> = form
        .terms
        .iter()
        .zip(y)
        .map(|(term, &v)| {
            let choices = term.states();
            choices
                .iter()
                .copied()
                .find(|s| matches!(*s, TermState::Fixed { at, .. } if near(v, at)))
                .or_else(|| {
                    choices.iter().copied().find(
                        |s| matches!(*s, TermState::Free { lo, hi, .. } if v >= lo && v <= hi),
                    )
                })
                .unwrap_or(choices[0])
        })
        .collect();
    solve_pattern(form, &states).map(|(y, _)| y)
}

fn residual_at(problem: &CompositeProblem, y: &[f64]) -> Result<f64> {
    Ok(dist(&dpg_step(problem, y, problem.lipschitz())?.y, y))
}

fn finish(
    problem: &CompositeProblem,
    y_star: Vec<f64>,
    dual_value: f64,
    provenance: Provenance,
    residual: f64,
    low_precision: bool,
) -> Result<ReferenceSolution> {
    let x_star = problem.primal_from_dual(&y_star)?;
    let primal_value = problem
        .eval_primal(&x_star)?
        .finite()
        .ok_or_else(|| Error::NonFinite("H(x*) at the reference point".into()))?;
    Ok(ReferenceSolution {
        y_star,
        x_star,
        dual_value,
        primal_value,
        provenance,
        residual,
        low_precision,
    })
}

/// A dual optimum computed without the solvers' iteration loops.
///
/// `Enumerate` visits every active-set pattern of the dual QP (requires a
/// quadratic `f`, a separable piecewise-linear `G` and `m <= 14`).
/// `LongRun` runs FDPG at `L = L_F` until the prox-gradient norm reaches
/// `tol`, then re-solves the detected active set exactly when the dual QP is
/// available.
pub fn reference_solve(
    problem: &CompositeProblem,
    mode: ReferenceMode,
    tol: f64,
) -> Result<ReferenceSolution> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    match mode {
        ReferenceMode::Enumerate => {
            let m = problem.dual_dim();
            if m > MAX_ENUMERATE_DIM {
                return Err(Error::Refused(format!(
                    "enumeration needs m <= {MAX_ENUMERATE_DIM}, got {m}"
                )));
            }
            let form = problem.dual_qp_form().ok_or_else(|| {
                Error::Refused("the dual is not a separable box-constrained QP".into())
            })?;
            let e = enumerate(&form)?;
            let residual = residual_at(problem, &e.y)?;
            finish(
                problem,
                e.y,
                e.value,
                Provenance::Enumeration {
                    patterns: e.patterns,
                    rank_deficient: e.rank_deficient,
                },
                residual,
                false,
            )
        }
        ReferenceMode::LongRun => {
            let l = problem.lipschitz();
            let m = problem.dual_dim();
            let (mut y, mut y_prev, mut w) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
            let mut t = 1.0;
            let mut iterations = LONGRUN_MAX_ITERS;
            for k in 1..=LONGRUN_MAX_ITERS {
                y = dpg_step(problem, &w, l)?.y;
                let t_next = fista_momentum(t);
                let c = (t - 1.0) / t_next;
                for ((wi, yi), pi) in w.iter_mut().zip(&y).zip(&y_prev) {
                    *wi = yi + c * (yi - pi);
                }
                y_prev.clone_from(&y);
                t = t_next;
                if k % CHECK_EVERY == 0 && residual_at(problem, &y)? <= tol {
                    iterations = k;
                    break;
                }
            }
            // one more step lands on a prox output, whose z is known
            let last = dpg_step(problem, &y, l)?;
            let mut y_star = last.y;
            let mut dual_value = problem
                .eval_dual(&y_star, Some(&last.v))?
                .finite()
                .ok_or_else(|| Error::NonFinite("dual value at the long-run point".into()))?;
            let mut polished = false;
            if let Some(form) = problem.dual_qp_form() {
                if let Some(candidate) = polish(&form, &y_star) {
                    if let Some(v) = form.value(&candidate).finite() {
                        if v <= dual_value + 1e-12 * (1.0 + dual_value.abs()) {
                            y_star = candidate;
                            dual_value = v;
                            polished = true;
                        }
                    }
                }
            }
            let residual = residual_at(problem, &y_star)?;
            finish(
                problem,
                y_star,
                dual_value,
                Provenance::LongRun {
                    iterations,
                    polished,
                },
                residual,
                residual > tol,
            )
        }
    }
}
