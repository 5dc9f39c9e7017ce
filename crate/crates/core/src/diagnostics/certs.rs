use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::linalg::norm;
use crate::model::CompositeProblem;
use crate::solvers::{IterateRecord, Method, ScheduleKind, SolverReport};

use super::ReferenceSolution;

pub const REL_TOL: f64 = 1e-9;
pub const ABS_TOL: f64 = 1e-12;
pub const TELESCOPING_REL_TOL: f64 = 1e-8;

/// Rounding error of a difference of two computed values.
fn roundoff(a: f64, b: f64) -> f64 {
    8.0 * f64::EPSILON * (a.abs() + b.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    FdpgDualT,
    FdpgDualK,
    GfdpgDual,
    GfdpgGrad,
    GfdpgGradLFree,
    CorollaryGrad,
    DpgGrad,
    Lemma3Gap,
    Lemma3GapStep,
    Lemma4Gap,
    Lemma4GapStep,
    Thm2Gap,
    Thm4SplitGap,
    Thm4Gap,
    Lemma5Iterates,
    Assump1Fdpg,
    Assump1Dpg,
    Telescoping,
    Descent,
    WeakDuality,
    DpgMonotone,
}

impl BoundId {
    pub const ALL: [BoundId; 21] = [
        BoundId::FdpgDualT,
        BoundId::FdpgDualK,
        BoundId::GfdpgDual,
        BoundId::GfdpgGrad,
        BoundId::GfdpgGradLFree,
        BoundId::CorollaryGrad,
        BoundId::DpgGrad,
        BoundId::Lemma3Gap,
        BoundId::Lemma3GapStep,
        BoundId::Lemma4Gap,
        BoundId::Lemma4GapStep,
        BoundId::Thm2Gap,
        BoundId::Thm4SplitGap,
        BoundId::Thm4Gap,
        BoundId::Lemma5Iterates,
        BoundId::Assump1Fdpg,
        BoundId::Assump1Dpg,
        BoundId::Telescoping,
        BoundId::Descent,
        BoundId::WeakDuality,
        BoundId::DpgMonotone,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundId::FdpgDualT => "fdpg_dual_t",
            BoundId::FdpgDualK => "fdpg_dual_k",
            BoundId::GfdpgDual => "gfdpg_dual",
            BoundId::GfdpgGrad => "gfdpg_grad",
            BoundId::GfdpgGradLFree => "gfdpg_grad_lfree",
            BoundId::CorollaryGrad => "corollary_grad",
            BoundId::DpgGrad => "dpg_grad",
            BoundId::Lemma3Gap => "lemma3_gap",
            BoundId::Lemma3GapStep => "lemma3_gap_step",
            BoundId::Lemma4Gap => "lemma4_gap",
            BoundId::Lemma4GapStep => "lemma4_gap_step",
            BoundId::Thm2Gap => "thm2_gap",
            BoundId::Thm4SplitGap => "thm4_split_gap",
            BoundId::Thm4Gap => "thm4_gap",
            BoundId::Lemma5Iterates => "lemma5_iterates",
            BoundId::Assump1Fdpg => "assump1_fdpg",
            BoundId::Assump1Dpg => "assump1_dpg",
            BoundId::Telescoping => "telescoping",
            BoundId::Descent => "descent",
            BoundId::WeakDuality => "weak_duality",
            BoundId::DpgMonotone => "dpg_monotone",
        }
    }

    /// Bounds defined for a method and schedule.
    pub fn applicable(method: Method, schedule: &ScheduleKind) -> Vec<BoundId> {
        use BoundId::*;
        let common = [
            Lemma3Gap,
            Lemma3GapStep,
            Lemma4Gap,
            Lemma4GapStep,
            Lemma5Iterates,
            Descent,
            WeakDuality,
        ];
        let mut ids: Vec<BoundId> = match method {
            Method::Dpg => vec![DpgGrad, Thm2Gap, Assump1Dpg, DpgMonotone],
            Method::Fdpg => vec![
                FdpgDualT,
                FdpgDualK,
                GfdpgDual,
                GfdpgGrad,
                GfdpgGradLFree,
                Telescoping,
                DpgGrad,
                Thm2Gap,
                Assump1Fdpg,
            ],
            Method::Gfdpg => {
                let mut v = vec![
                    GfdpgDual,
                    GfdpgGrad,
                    GfdpgGradLFree,
                    Telescoping,
                    CorollaryGrad,
                    Thm4SplitGap,
                    Thm4Gap,
                ];
                if *schedule == ScheduleKind::Fista {
                    v.extend([FdpgDualT, FdpgDualK]);
                }
                v
            }
        };
        ids.extend(common);
        ids.sort();
        ids
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown bound id `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Evaluated {
        bound: f64,
        measured: f64,
        /// Absolute slack used in the comparison.
        slack: f64,
        pass: bool,
    },
    NotApplicable(String),
}

/// Quantities a bound was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CertInputs {
    pub lipschitz: f64,
    pub probe_lipschitz: Option<f64>,
    pub big_t_prev: Option<f64>,
    pub dist0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCertificate {
    pub bound_id: BoundId,
    pub k: usize,
    pub outcome: Outcome,
    pub inputs: CertInputs,
}

impl BoundCertificate {
    pub fn bound(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Evaluated { bound, .. } => Some(bound),
            Outcome::NotApplicable(_) => None,
        }
    }

    pub fn measured(&self) -> Option<f64> {
        match self.outcome {
            Outcome::Evaluated { measured, .. } => Some(measured),
            Outcome::NotApplicable(_) => None,
        }
    }

    /// `B - M`.
    pub fn margin(&self) -> Option<f64> {
        Some(self.bound()? - self.measured()?)
    }

    /// `None` when not applicable.
    pub fn passed(&self) -> Option<bool> {
        match self.outcome {
            Outcome::Evaluated { pass, .. } => Some(pass),
            Outcome::NotApplicable(_) => None,
        }
    }

    pub fn failed(&self) -> bool {
        self.passed() == Some(false)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertOptions {
    /// Multiplies every bound; `1` except when deliberately injecting faults.
    pub bound_scale: f64,
}

impl Default for CertOptions {
    fn default() -> Self {
        Self { bound_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CertContext<'a> {
    pub problem: &'a CompositeProblem,
    pub reference: &'a ReferenceSolution,
    pub report: &'a SolverReport,
    pub options: CertOptions,
}

impl<'a> CertContext<'a> {
    pub fn new(
        problem: &'a CompositeProblem,
        reference: &'a ReferenceSolution,
        report: &'a SolverReport,
    ) -> Self {
        Self {
            problem,
            reference,
            report,
            options: CertOptions::default(),
        }
    }

    pub fn with_options(mut self, options: CertOptions) -> Self {
        self.options = options;
        self
    }
}

/// Running quantities over the trace, indexed like `report.records`.
struct Running {
    min_step: Vec<f64>,
    slack_sum: Vec<f64>,
    telescoped: Vec<f64>,
    min_split_gap: Vec<f64>,
    min_primal_gap: Vec<ExtReal>,
}

impl Running {
    fn new(records: &[IterateRecord]) -> Self {
        let mut out = Running {
            min_step: Vec::with_capacity(records.len()),
            slack_sum: Vec::with_capacity(records.len()),
            telescoped: Vec::with_capacity(records.len()),
            min_split_gap: Vec::with_capacity(records.len()),
            min_primal_gap: Vec::with_capacity(records.len()),
        };
        let (mut step, mut slack, mut tele) = (f64::INFINITY, 0.0, 0.0);
        let (mut split, mut primal) = (f64::INFINITY, ExtReal::PosInf);
        for r in records {
            step = step.min(r.step_norm);
            if let (Some(t), Some(big_t)) = (r.t_prev, r.big_t_prev) {
                let s = (big_t - t * t).max(0.0);
                slack += s;
                tele += 0.5 * s * r.step_norm * r.step_norm;
            }
            split = split.min(r.split_gap);
            primal = primal.min(r.primal_value + r.dual_value);
            out.min_step.push(step);
            out.slack_sum.push(slack);
            out.telescoped.push(tele);
            out.min_split_gap.push(split);
            out.min_primal_gap.push(primal);
        }
        out
    }
}

struct Evaluator<'c, 'a> {
    ctx: &'c CertContext<'a>,
    dist0: f64,
    radius: f64,
    running: Running,
}

impl<'c, 'a> Evaluator<'c, 'a> {
    fn new(ctx: &'c CertContext<'a>) -> Self {
        let dist0 = ctx.reference.distance_from(&ctx.report.y0);
        Self {
            dist0,
            radius: dist0 + ctx.reference.y_star_norm(),
            running: Running::new(&ctx.report.records),
            ctx,
        }
    }

    fn inputs(&self, r: &IterateRecord) -> CertInputs {
        CertInputs {
            lipschitz: r.lipschitz,
            probe_lipschitz: r.probe.as_ref().map(|p| p.lipschitz),
            big_t_prev: r.big_t_prev,
            dist0: self.dist0,
        }
    }

    fn check(
        &self,
        id: BoundId,
        r: &IterateRecord,
        bound: f64,
        measured: f64,
        rel: f64,
        extra: f64,
    ) -> BoundCertificate {
        let bound = bound * self.ctx.options.bound_scale;
        let slack = ABS_TOL + extra + self.ctx.reference.slack();
        let pass = measured <= bound + rel * bound.abs() + slack;
        BoundCertificate {
            bound_id: id,
            k: r.k,
            outcome: Outcome::Evaluated {
                bound,
                measured,
                slack,
                pass,
            },
            inputs: self.inputs(r),
        }
    }

    fn na(&self, id: BoundId, r: &IterateRecord, reason: impl Into<String>) -> BoundCertificate {
        BoundCertificate {
            bound_id: id,
            k: r.k,
            outcome: Outcome::NotApplicable(reason.into()),
            inputs: self.inputs(r),
        }
    }

    fn poly_constant(&self) -> std::result::Result<f64, String> {
        match self.ctx.report.schedule {
            ScheduleKind::Poly { a } if a > 2.0 => Ok(a * 6f64.sqrt() / (a - 2.0).sqrt()),
            ScheduleKind::Poly { a } => Err(format!("poly a = {a} <= 2")),
            ref other => Err(format!("schedule {other} is not poly")),
        }
    }

    fn rows(&self, id: BoundId) -> Vec<BoundCertificate> {
        let report = self.ctx.report;
        let applicable = BoundId::applicable(report.method, &report.schedule);
        if !applicable.contains(&id) {
            let reason = format!("not defined for {} with {}", report.method, report.schedule);
            return report
                .records
                .iter()
                .map(|r| self.na(id, r, reason.clone()))
                .collect();
        }
        let mut out = Vec::with_capacity(report.records.len());
        for (i, r) in report.records.iter().enumerate() {
            out.push(self.row(id, i, r));
        }
        out
    }

    fn row(&self, id: BoundId, i: usize, r: &IterateRecord) -> BoundCertificate {
        let problem = self.ctx.problem;
        let reference = self.ctx.reference;
        let q_star = reference.dual_value;
        let dual_gap = r.dual_value - q_star;
        let k = r.k as f64;
        let d0 = self.dist0;
        let l_f = problem.lipschitz();
        let gamma_g = problem.gamma_g();
        let probe = r.probe.as_ref();

        macro_rules! need_probe {
            () => {
                match probe {
                    Some(p) => p,
                    None => return self.na(id, r, "prox probe not recorded"),
                }
            };
        }
        macro_rules! need_gamma_g {
            () => {
                if !gamma_g.is_finite() {
                    return self.na(id, r, "gamma_g is infinite");
                }
            };
        }

        match id {
            BoundId::FdpgDualT => {
                let t = r.t_prev.expect("momentum methods record t");
                let b = 2.0 * r.lipschitz * d0 * d0 / (t * t);
                self.check(id, r, b, dual_gap, REL_TOL, roundoff(r.dual_value, q_star))
            }
            BoundId::FdpgDualK => {
                let b = 2.0 * r.lipschitz * d0 * d0 / ((k + 1.0) * (k + 1.0));
                self.check(id, r, b, dual_gap, REL_TOL, roundoff(r.dual_value, q_star))
            }
            BoundId::GfdpgDual => {
                let big_t = r.big_t_prev.expect("momentum methods record T");
                let b = r.lipschitz * d0 * d0 / (2.0 * big_t);
                self.check(id, r, b, dual_gap, REL_TOL, roundoff(r.dual_value, q_star))
            }
            BoundId::Telescoping => {
                let big_t = r.big_t_prev.expect("momentum methods record T");
                let scale = big_t / r.lipschitz;
                let m = self.running.telescoped[i] + scale * dual_gap;
                let extra = scale * roundoff(r.dual_value, q_star);
                self.check(id, r, 0.5 * d0 * d0, m, TELESCOPING_REL_TOL, extra)
            }
            BoundId::GfdpgGrad => {
                let p = need_probe!();
                let big_t = r.big_t_prev.expect("momentum methods record T");
                let m = self.running.min_step[i].min(p.pg_norm);
                let b = d0 / (self.running.slack_sum[i] + big_t).sqrt();
                self.check(id, r, b, m, REL_TOL, 0.0)
            }
            BoundId::GfdpgGradLFree => {
                let big_t = r.big_t_prev.expect("momentum methods record T");
                let s = self.running.slack_sum[i];
                if s <= 1e-9 * big_t {
                    return self.na(id, r, "sum of T_i - t_i^2 vanishes");
                }
                self.check(id, r, d0 / s.sqrt(), self.running.min_step[i], REL_TOL, 0.0)
            }
            BoundId::CorollaryGrad => {
                let c = match self.poly_constant() {
                    Ok(c) => c,
                    Err(reason) => return self.na(id, r, reason),
                };
                let p = need_probe!();
                let m = self.running.min_step[i].min(p.pg_norm);
                self.check(id, r, c * d0 / k.powf(1.5), m, REL_TOL, 0.0)
            }
            BoundId::DpgGrad => {
                let p = need_probe!();
                self.check(id, r, 2.0 * d0 / k, p.pg_norm, REL_TOL, 0.0)
            }
            BoundId::Lemma3Gap => {
                let p = need_probe!();
                let b = (p.lipschitz + l_f) * p.p_norm * p.pg_norm;
                let extra = roundoff(p.dual_value, p.dual_value + p.split_gap);
                self.check(id, r, b, p.split_gap, REL_TOL, extra)
            }
            BoundId::Lemma3GapStep => {
                let b = (r.lipschitz + l_f) * norm(&r.y) * r.step_norm;
                let extra = roundoff(r.dual_value, r.dual_value + r.split_gap);
                self.check(id, r, b, r.split_gap, REL_TOL, extra)
            }
            BoundId::Lemma4Gap => {
                need_gamma_g!();
                let p = need_probe!();
                let Some(m) = p.primal_gap.finite() else {
                    return self.na(id, r, "H(x(p)) is infinite");
                };
                let b = (p.lipschitz + l_f) * (p.p_norm + gamma_g) * p.pg_norm;
                self.check(
                    id,
                    r,
                    b,
                    m,
                    REL_TOL,
                    roundoff(p.dual_value, p.dual_value + m),
                )
            }
            BoundId::Lemma4GapStep => {
                need_gamma_g!();
                let Some(m) = (r.primal_value + r.dual_value).finite() else {
                    return self.na(id, r, "H(x(y_k)) is infinite");
                };
                let b = (r.lipschitz + l_f) * (norm(&r.y) + gamma_g) * r.step_norm;
                self.check(
                    id,
                    r,
                    b,
                    m,
                    REL_TOL,
                    roundoff(r.dual_value, r.dual_value + m),
                )
            }
            BoundId::Thm2Gap => {
                need_gamma_g!();
                let p = need_probe!();
                let Some(m) = p.primal_gap.finite() else {
                    return self.na(id, r, "H(x(p)) is infinite");
                };
                let b = (p.lipschitz + l_f) * (self.radius + gamma_g) * 2.0 * d0 / k;
                self.check(
                    id,
                    r,
                    b,
                    m,
                    REL_TOL,
                    roundoff(p.dual_value, p.dual_value + m),
                )
            }
            BoundId::Thm4SplitGap => {
                let c = match self.poly_constant() {
                    Ok(c) => c,
                    Err(reason) => return self.na(id, r, reason),
                };
                let p = need_probe!();
                let m = self.running.min_split_gap[i].min(p.split_gap);
                let b = c * (p.lipschitz + l_f) * self.radius * d0 / k.powf(1.5);
                self.check(
                    id,
                    r,
                    b,
                    m,
                    REL_TOL,
                    roundoff(p.dual_value, p.dual_value + m),
                )
            }
            BoundId::Thm4Gap => {
                need_gamma_g!();
                let c = match self.poly_constant() {
                    Ok(c) => c,
                    Err(reason) => return self.na(id, r, reason),
                };
                let p = need_probe!();
                let Some(m) = self.running.min_primal_gap[i].min(p.primal_gap).finite() else {
                    return self.na(id, r, "all primal values infinite");
                };
                let b = c * (p.lipschitz + l_f) * (self.radius + gamma_g) * d0 / k.powf(1.5);
                self.check(
                    id,
                    r,
                    b,
                    m,
                    REL_TOL,
                    roundoff(p.dual_value, p.dual_value + m),
                )
            }
            BoundId::Lemma5Iterates => {
                let mut m = norm(&r.y).max(norm(&r.w));
                if let Some(p) = probe {
                    m = m.max(p.p_norm);
                }
                self.check(id, r, self.radius, m, REL_TOL, 0.0)
            }
            BoundId::Assump1Fdpg | BoundId::Assump1Dpg => {
                let Some(gamma_h) = problem.gamma_h() else {
                    return self.na(id, r, "gamma_H not declared");
                };
                let Some(h) = r.primal_value.finite() else {
                    return self.na(id, r, "x(y_k) outside dom H (restricted convention)");
                };
                let root = (r.lipschitz / problem.sigma()).sqrt();
                let b = if id == BoundId::Assump1Fdpg {
                    2.0 * gamma_h * root * d0 / (k + 1.0)
                } else {
                    gamma_h * root * d0 / k.sqrt()
                };
                let m = h - reference.primal_value;
                self.check(id, r, b, m, REL_TOL, roundoff(h, reference.primal_value))
            }
            BoundId::Descent => {
                let p = need_probe!();
                let m = 0.5 * p.lipschitz * p.pg_norm * p.pg_norm;
                let b = r.dual_value - p.dual_value;
                let extra = 8.0 * roundoff(r.dual_value, p.dual_value);
                self.check(id, r, b, m, REL_TOL, extra)
            }
            BoundId::WeakDuality => {
                let Some(h) = r.primal_value.finite() else {
                    return self.na(id, r, "H(x(y_k)) is infinite");
                };
                let m = -(h + r.dual_value);
                // H accepts points within the feasibility tolerance of dom g,
                // which can undercut the dual value by <y, Ax - P(Ax)>.
                let infeasible = match self.ctx.problem.smooth_dual(&r.y) {
                    Ok(sd) => norm(&r.y) * self.ctx.problem.g().domain_distance(&sd.ax),
                    Err(_) => 0.0,
                };
                self.check(
                    id,
                    r,
                    0.0,
                    m,
                    REL_TOL,
                    roundoff(h, r.dual_value) + infeasible,
                )
            }
            BoundId::DpgMonotone => {
                let prev = if i == 0 {
                    match problem.eval_dual(&self.ctx.report.y0, None) {
                        Ok(ExtReal::Finite(v)) => v,
                        Ok(ExtReal::PosInf) => f64::INFINITY,
                        Err(_) => return self.na(id, r, "q~(y0) needs a conjugate oracle"),
                    }
                } else {
                    self.ctx.report.records[i - 1].dual_value
                };
                self.check(
                    id,
                    r,
                    prev,
                    r.dual_value,
                    REL_TOL,
                    roundoff(prev, r.dual_value),
                )
            }
        }
    }
}

/// Evaluates `ids` (every bound defined for the run when `None`) at every
/// recorded iteration. Bounds that are not defined for the run, or whose
/// assumptions fail, produce not-applicable rows.
pub fn certify(ctx: &CertContext<'_>, ids: Option<&[BoundId]>) -> Vec<BoundCertificate> {
    let ids = match ids {
        Some(ids) => ids.to_vec(),
        None => BoundId::applicable(ctx.report.method, &ctx.report.schedule),
    };
    let ev = Evaluator::new(ctx);
    ids.into_iter().flat_map(|id| ev.rows(id)).collect()
}

fn require(ctx: &CertContext<'_>, methods: &[Method], what: &str) -> Result<()> {
    if methods.contains(&ctx.report.method) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{what} certificates need a {} trace, got {}",
            methods
                .iter()
                .map(|m| m.as_str())
                .collect::<Vec<_>>()
                .join("/"),
            ctx.report.method
        )))
    }
}

fn only(ctx: &CertContext<'_>, ids: &[BoundId]) -> Vec<BoundCertificate> {
    certify(ctx, Some(ids))
}

/// Dual decrease of FDPG in the `t_{k-1}^2` and `(k+1)^2` forms.
pub fn cert_fdpg_dual(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    let fista_gfdpg =
        ctx.report.method == Method::Gfdpg && ctx.report.schedule == ScheduleKind::Fista;
    if !fista_gfdpg {
        require(ctx, &[Method::Fdpg], "FDPG dual")?;
    }
    Ok(only(ctx, &[BoundId::FdpgDualT, BoundId::FdpgDualK]))
}

/// `q~(y_k) - q~(y*) <= L_k ||y0 - y*||^2 / (2 T_{k-1})`.
pub fn cert_gfdpg_dual(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    require(ctx, &[Method::Fdpg, Method::Gfdpg], "GFDPG dual")?;
    Ok(only(ctx, &[BoundId::GfdpgDual]))
}

/// The telescoped potential bound behind the GFDPG dual decrease.
pub fn cert_telescoping(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    require(ctx, &[Method::Fdpg, Method::Gfdpg], "telescoping")?;
    Ok(only(ctx, &[BoundId::Telescoping]))
}

/// The prox-gradient-norm bound of GFDPG and its `L'`-free variant.
pub fn cert_gfdpg_gradnorm(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    require(ctx, &[Method::Fdpg, Method::Gfdpg], "GFDPG gradient")?;
    Ok(only(ctx, &[BoundId::GfdpgGrad, BoundId::GfdpgGradLFree]))
}

/// `a sqrt(6) / sqrt(a - 2) ||y0 - y*|| / k^1.5` for poly schedules.
pub fn cert_corollary_gradnorm(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    require(ctx, &[Method::Gfdpg], "corollary")?;
    Ok(only(ctx, &[BoundId::CorollaryGrad]))
}

/// `||p_{L'}(y_k) - y_k|| <= 2 ||y0 - y*|| / k`.
pub fn cert_dpg_gradnorm(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    require(ctx, &[Method::Dpg, Method::Fdpg], "DPG gradient")?;
    Ok(only(ctx, &[BoundId::DpgGrad]))
}

/// Gap of the split problem at the probe and at the step.
pub fn cert_pd_gap_pprime(ctx: &CertContext<'_>) -> Vec<BoundCertificate> {
    only(ctx, &[BoundId::Lemma3Gap, BoundId::Lemma3GapStep])
}

/// Gaps of the original problem; not applicable when `gamma_g` is infinite.
pub fn cert_pd_gap_p(ctx: &CertContext<'_>) -> Vec<BoundCertificate> {
    let mut ids = vec![BoundId::Lemma4Gap, BoundId::Lemma4GapStep];
    match ctx.report.method {
        Method::Dpg | Method::Fdpg => ids.push(BoundId::Thm2Gap),
        Method::Gfdpg => ids.extend([BoundId::Thm4SplitGap, BoundId::Thm4Gap]),
    }
    only(ctx, &ids)
}

/// `max{||p||, ||y_k||, ||w_k||} <= ||y0 - y*|| + ||y*||`.
pub fn cert_iterate_bound(ctx: &CertContext<'_>) -> Vec<BoundCertificate> {
    only(ctx, &[BoundId::Lemma5Iterates])
}

/// Primal decrease under a declared `gamma_H`.
pub fn cert_primal_cost_assumption1(ctx: &CertContext<'_>) -> Result<Vec<BoundCertificate>> {
    match ctx.report.method {
        Method::Dpg => Ok(only(ctx, &[BoundId::Assump1Dpg])),
        Method::Fdpg => Ok(only(ctx, &[BoundId::Assump1Fdpg])),
        Method::Gfdpg => Err(Error::InvalidArgument(
            "primal-cost certificates are stated for DPG and FDPG only".into(),
        )),
    }
}
