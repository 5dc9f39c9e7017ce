use std::fmt;

use crate::error::{Error, Result};

/// Relative slack on `t_k^2 <= T_k` for user-supplied sequences.
const VALIDITY_SLACK: f64 = 1e-12;

/// `t_k = (1 + sqrt(1 + 4 t_{k-1}^2)) / 2`.
pub fn fista_momentum(t_prev: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * t_prev * t_prev).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    Fista,
    /// `t_k = (k + a) / a`.
    Poly {
        a: f64,
    },
    /// FISTA growth for the first half of a known budget `N`, then
    /// `t_k = (N - k + 1) / 2`.
    FixedHorizon {
        n: usize,
    },
    Custom(Vec<f64>),
}

impl ScheduleKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleKind::Fista => "fista",
            ScheduleKind::Poly { .. } => "poly",
            ScheduleKind::FixedHorizon { .. } => "fixed_horizon",
            ScheduleKind::Custom(_) => "custom",
        }
    }
}

impl fmt::Display for ScheduleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleKind::Fista => write!(f, "fista"),
            ScheduleKind::Poly { a } => write!(f, "poly(a={a})"),
            ScheduleKind::FixedHorizon { n } => write!(f, "fixed_horizon(N={n})"),
            ScheduleKind::Custom(t) => write!(f, "custom({} terms)", t.len()),
        }
    }
}

/// A validated momentum schedule `{t_k}` with `t_0 = T_0 in (0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    kind: ScheduleKind,
}

/// `t_0..t_K` and their running sums.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumSequence {
    pub t: Vec<f64>,
    pub big_t: Vec<f64>,
}

impl MomentumSequence {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

pub fn make_schedule(kind: ScheduleKind) -> Result<Schedule> {
    match &kind {
        ScheduleKind::Fista => {}
        ScheduleKind::Poly { a } => {
            if !(a.is_finite() && *a > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "poly schedule needs a > 0, got {a}"
                )));
            }
            if *a < 2.0 {
                // 2 (k + a)^2 <= a (k + 1)(k + 2a) fails for all large k when a < 2
                let k = first_poly_violation(*a);
                return Err(Error::InvalidSchedule {
                    k,
                    reason: format!("poly a = {a} < 2 violates t_k^2 <= T_k"),
                });
            }
        }
        ScheduleKind::FixedHorizon { n } => {
            if *n < 2 {
                return Err(Error::InvalidArgument(format!(
                    "fixed_horizon needs N >= 2, got {n}"
                )));
            }
        }
        ScheduleKind::Custom(t) => validate(t)?,
    }
    Ok(Schedule { kind })
}

fn first_poly_violation(a: f64) -> usize {
    (0usize..)
        .find(|&k| {
            let k = k as f64;
            2.0 * (k + a) * (k + a) > a * (k + 1.0) * (k + 2.0 * a)
        })
        .expect("a quadratic with negative leading coefficient turns negative")
}

fn validate(t: &[f64]) -> Result<()> {
    let mut big_t = 0.0;
    for (k, &tk) in t.iter().enumerate() {
        if !(tk.is_finite() && tk > 0.0) {
            return Err(Error::InvalidSchedule {
                k,
                reason: format!("t_k = {tk} is not positive"),
            });
        }
        if k == 0 && tk > 1.0 {
            return Err(Error::InvalidSchedule {
                k,
                reason: format!("t_0 = {tk} outside (0, 1]"),
            });
        }
        big_t += tk;
        if tk * tk > big_t * (1.0 + VALIDITY_SLACK) {
            return Err(Error::InvalidSchedule {
                k,
                reason: format!("t_k^2 = {} exceeds T_k = {big_t}", tk * tk),
            });
        }
    }
    Ok(())
}

impl Schedule {
    pub fn fista() -> Self {
        Schedule {
            kind: ScheduleKind::Fista,
        }
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    /// `a` of a poly schedule.
    pub fn poly_a(&self) -> Option<f64> {
        match self.kind {
            ScheduleKind::Poly { a } => Some(a),
            _ => None,
        }
    }

    /// Largest index `k` for which `t_k` is defined, if bounded.
    pub fn horizon(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::FixedHorizon { n } => Some(*n),
            ScheduleKind::Custom(t) => Some(t.len().saturating_sub(1)),
            _ => None,
        }
    }

    /// `t_0, ..., t_{count-1}` with running sums.
    pub fn sequence(&self, count: usize) -> Result<MomentumSequence> {
        if let Some(h) = self.horizon() {
            if count > h + 1 {
                return Err(Error::ScheduleExhausted(h + 1));
            }
        }
        let mut t = Vec::with_capacity(count);
        for k in 0..count {
            let tk = match &self.kind {
                ScheduleKind::Fista => {
                    if k == 0 {
                        1.0
                    } else {
                        fista_momentum(t[k - 1])
                    }
                }
                ScheduleKind::Poly { a } => (k as f64 + a) / a,
                ScheduleKind::FixedHorizon { n } => {
                    if k == 0 {
                        1.0
                    } else if k < n / 2 {
                        fista_momentum(t[k - 1])
                    } else {
                        (*n as f64 - k as f64 + 1.0) / 2.0
                    }
                }
                ScheduleKind::Custom(list) => list[k],
            };
            t.push(tk);
        }
        let big_t = t
            .iter()
            .scan(0.0, |acc, &tk| {
                *acc += tk;
                Some(*acc)
            })
            .collect();
        Ok(MomentumSequence { t, big_t })
    }
}

/// The two coefficients of the generalized momentum update,
/// `w_k = y_k + c1 (y_k - y_{k-1}) + c2 (y_k - w_{k-1})`.
pub fn gfdpg_coefficients(t_prev: f64, t_k: f64, big_t_prev: f64, big_t_k: f64) -> (f64, f64) {
    let denom = t_prev * big_t_k;
    (
        (big_t_prev - t_prev) * t_k / denom,
        (t_prev * t_prev - big_t_prev) * t_k / denom,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn gfdpg_momentum(
    y_k: &[f64],
    y_prev: &[f64],
    w_prev: &[f64],
    t_prev: f64,
    t_k: f64,
    big_t_prev: f64,
    big_t_k: f64,
) -> Vec<f64> {
    let (c1, c2) = gfdpg_coefficients(t_prev, t_k, big_t_prev, big_t_k);
    y_k.iter()
        .zip(y_prev)
        .zip(w_prev)
        .map(|((y, yp), wp)| y + c1 * (y - yp) + c2 * (y - wp))
        .collect()
}
