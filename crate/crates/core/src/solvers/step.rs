use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub};
use crate::model::{CompositeProblem, SmoothDual};

/// Doublings allowed before backtracking gives up.
pub const MAX_DOUBLINGS: usize = 60;

/// One dual proximal gradient step taken from `base`.
#[derive(Debug, Clone)]
pub struct DpgStep {
    /// `p_L(base)`.
    pub y: Vec<f64>,
    /// `x(base)`.
    pub u: Vec<f64>,
    /// `A x(base)`.
    pub au: Vec<f64>,
    /// `prox_{Lg}(Au - L base)`, which equals `z(y)`.
    pub v: Vec<f64>,
}

fn check_lipschitz(lipschitz: f64) -> Result<()> {
    if lipschitz > 0.0 && lipschitz.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "step constant L must be positive and finite, got {lipschitz}"
        )))
    }
}

/// The step given `x(base)` and `A x(base)`; nothing here depends on `f`.
pub(crate) fn step_from(
    problem: &CompositeProblem,
    base: &[f64],
    u: &[f64],
    au: &[f64],
    lipschitz: f64,
) -> DpgStep {
    let arg: Vec<f64> = au
        .iter()
        .zip(base)
        .map(|(a, b)| a - lipschitz * b)
        .collect();
    let mut v = vec![0.0; arg.len()];
    problem.g().prox(lipschitz, &arg, &mut v);
    let y = base
        .iter()
        .zip(au.iter().zip(&v))
        .map(|(b, (a, vi))| b - (a - vi) / lipschitz)
        .collect();
    DpgStep {
        y,
        u: u.to_vec(),
        au: au.to_vec(),
        v,
    }
}

/// `u = x(y_prev)`, `v = prox_{Lg}(Au - L y_prev)`, `y = y_prev - (Au - v)/L`.
pub fn dpg_step(problem: &CompositeProblem, y_prev: &[f64], lipschitz: f64) -> Result<DpgStep> {
    check_lipschitz(lipschitz)?;
    let u = problem.primal_from_dual(y_prev)?;
    let au = problem.operator().apply(&u)?;
    Ok(step_from(problem, y_prev, &u, &au, lipschitz))
}

/// `p_L(y_prev) = prox_{G/L}(y_prev - grad F(y_prev) / L)` through the Moreau
/// decomposition of `prox_{g*/L}`.
pub fn prox_form_step(
    problem: &CompositeProblem,
    y_prev: &[f64],
    lipschitz: f64,
) -> Result<Vec<f64>> {
    check_lipschitz(lipschitz)?;
    let grad = problem.grad_dual_smooth(y_prev)?;
    let v_bar: Vec<f64> = y_prev
        .iter()
        .zip(&grad)
        .map(|(y, g)| y - g / lipschitz)
        .collect();
    // G(y) = g*(-y), so prox_{G/L}(v) = -prox_{g*/L}(-v);
    // prox_{c g*}(w) = w - c prox_{g/c}(w/c) with c = 1/L.
    let w: Vec<f64> = v_bar.iter().map(|v| -v).collect();
    let scaled: Vec<f64> = w.iter().map(|wi| lipschitz * wi).collect();
    let mut inner = vec![0.0; w.len()];
    problem.g().prox(lipschitz, &scaled, &mut inner);
    Ok(w.iter()
        .zip(&inner)
        .map(|(wi, pi)| -(wi - pi / lipschitz))
        .collect())
}

/// Result of a (possibly trivial) step-size search at one base point.
#[derive(Debug, Clone)]
pub struct AcceptedStep {
    pub lipschitz: f64,
    pub doublings: usize,
    pub step: DpgStep,
    /// `x(y)`, `A x(y)`, `F(y)` at the accepted `y`.
    pub at_y: SmoothDual,
    /// `q~(y)`, with `G(y)` taken from the companion `v`.
    pub dual_value: f64,
}

/// `G(y) = -<y, v> - g(v)` with `v = z(y)`.
fn nonsmooth_at(problem: &CompositeProblem, step: &DpgStep) -> Result<f64> {
    let gv = problem
        .g()
        .value(&step.v)
        .finite()
        .ok_or_else(|| Error::NonFinite("g at a prox output".into()))?;
    Ok(-dot(&step.y, &step.v) - gv)
}

/// `F(y) <= F(w) + <y - w, grad F(w)> + L/2 ||y - w||^2`, which is the
/// sufficient-decrease test `q~(y) <= Q_L(y, w)` with `G(y)` cancelled.
fn sufficient_decrease(
    base: &SmoothDual,
    at_y: &SmoothDual,
    base_y: &[f64],
    y: &[f64],
    lipschitz: f64,
) -> bool {
    let d = sub(y, base_y);
    let lin = dot(&d, &base.ax);
    let quad = 0.5 * lipschitz * dot(&d, &d);
    let rhs = base.value + lin + quad;
    let slack = 16.0 * f64::EPSILON * (base.value.abs() + at_y.value.abs() + lin.abs() + quad);
    at_y.value <= rhs + slack
}

/// Smallest `L` in `{L_start eta^j}` passing the sufficient-decrease test at
/// `base`. With `search = false` the first trial is accepted unconditionally.
pub(crate) fn search_from(
    problem: &CompositeProblem,
    base: &[f64],
    at_base: &SmoothDual,
    l_start: f64,
    eta: f64,
    search: bool,
) -> Result<AcceptedStep> {
    check_lipschitz(l_start)?;
    if search && !(eta > 1.0 && eta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "growth factor must exceed 1, got {eta}"
        )));
    }
    let mut lipschitz = l_start;
    for doublings in 0..=MAX_DOUBLINGS {
        let step = step_from(problem, base, &at_base.x, &at_base.ax, lipschitz);
        let at_y = problem.smooth_dual(&step.y)?;
        if !search || sufficient_decrease(at_base, &at_y, base, &step.y, lipschitz) {
            let dual_value = at_y.value + nonsmooth_at(problem, &step)?;
            return Ok(AcceptedStep {
                lipschitz,
                doublings,
                step,
                at_y,
                dual_value,
            });
        }
        lipschitz *= eta;
    }
    Err(Error::Backtracking {
        doublings: MAX_DOUBLINGS,
        last_lipschitz: lipschitz / eta,
    })
}

/// Returns the accepted `L`, `y = p_L(w)` and `q~(y)`.
pub fn backtracking_search(
    problem: &CompositeProblem,
    w: &[f64],
    l_start: f64,
    eta: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    let at_w = problem.smooth_dual(w)?;
    let accepted = search_from(problem, w, &at_w, l_start, eta, true)?;
    Ok((accepted.lipschitz, accepted.step.y, accepted.dual_value))
}

/// `||Au - v + L (y - base)||`, zero in exact arithmetic.
pub fn step_residual(step: &DpgStep, base: &[f64], lipschitz: f64) -> f64 {
    let r: Vec<f64> = step
        .au
        .iter()
        .zip(&step.v)
        .zip(step.y.iter().zip(base))
        .map(|((a, v), (y, b))| a - v + lipschitz * (y - b))
        .collect();
    norm(&r)
}
