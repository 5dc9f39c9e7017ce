use std::fmt;

use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Relative slack used when testing membership in a closed set.
///
/// Iterates produced by floating-point prox steps sit on set boundaries only
/// up to rounding, so indicator-type functions accept points within
/// `FEAS_TOL * (1 + |bound|)` of the set.
pub const FEAS_TOL: f64 = 1e-10;

pub(crate) fn below(value: f64, bound: f64) -> bool {
    value <= bound + FEAS_TOL * (1.0 + bound.abs())
}

/// A `sigma`-strongly convex function `f` on `R^n`.
pub trait StronglyConvex: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Strong-convexity modulus, strictly positive.
    fn modulus(&self) -> f64;

    fn value(&self, x: &[f64]) -> ExtReal;

    /// The unique maximiser of `<u, x> - f(x)`.
    fn conjugate_argmax(&self, u: &[f64], out: &mut [f64]);

    /// One subgradient at `x`, when cheaply available.
    fn subgradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        None
    }

    /// `(Q diagonal, b, c)` when `f(x) = 1/2 x'Qx - b'x + c` on all of `R^n`.
    fn diagonal_quadratic(&self) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        None
    }
}

/// A proper closed convex function `g` on `R^m` with a computable prox.
pub trait ProxFunction: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn value(&self, z: &[f64]) -> ExtReal;

    /// `argmin_z { c g(z) + 1/2 ||z - w||^2 }` for `c > 0`.
    fn prox(&self, c: f64, w: &[f64], out: &mut [f64]);

    /// Euclidean distance from `z` to `dom g`.
    fn domain_distance(&self, _z: &[f64]) -> f64 {
        0.0
    }

    /// Supremum of subgradient norms over the whole space (`+inf` if unbounded).
    fn subgradient_bound(&self) -> f64 {
        f64::INFINITY
    }

    /// Convex conjugate `g*(y)`.
    fn conjugate(&self, _y: &[f64]) -> Result<ExtReal> {
        Err(Error::Unsupported("conjugate of g".into()))
    }

    /// One element of `argmin_z { <y, z> + g(z) }`.
    fn linear_argmin(&self, _y: &[f64]) -> Result<Vec<f64>> {
        Err(Error::Unsupported("linear minimisation oracle of g".into()))
    }

    /// Per-coordinate description of `G(y) = g*(-y)` when it is separable and
    /// piecewise linear.
    fn dual_terms(&self) -> Option<Vec<DualTerm>> {
        None
    }
}

/// One coordinate of a separable piecewise-linear `G(y) = g*(-y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualTerm {
    /// `slope * y` on `[lo, hi]`, `+inf` outside.
    Interval { lo: f64, hi: f64, slope: f64 },
    /// `left_slope * y` for `y <= 0`, `right_slope * y` for `y >= 0`.
    Kink { left_slope: f64, right_slope: f64 },
}

/// Where a coordinate sits in an active-set pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermState {
    /// Pinned to a breakpoint; `lower`/`upper` bound the subdifferential there.
    Fixed { at: f64, lower: f64, upper: f64 },
    /// Inside an open linear piece with the given slope.
    Free { lo: f64, hi: f64, slope: f64 },
}

impl DualTerm {
    pub fn value(&self, y: f64) -> ExtReal {
        match *self {
            DualTerm::Interval { lo, hi, slope } => {
                if below(lo, y) && below(y, hi) {
                    ExtReal::Finite(slope * y)
                } else {
                    ExtReal::PosInf
                }
            }
            DualTerm::Kink {
                left_slope,
                right_slope,
            } => ExtReal::Finite(if y < 0.0 {
                left_slope * y
            } else {
                right_slope * y
            }),
        }
    }

    /// Candidate states ordered lower-active, free, upper-active.
    pub fn states(&self) -> Vec<TermState> {
        match *self {
            DualTerm::Interval { lo, hi, slope } => {
                if lo == hi {
                    return vec![TermState::Fixed {
                        at: lo,
                        lower: f64::NEG_INFINITY,
                        upper: f64::INFINITY,
                    }];
                }
                let mut states = Vec::with_capacity(3);
                if lo.is_finite() {
                    states.push(TermState::Fixed {
                        at: lo,
                        lower: f64::NEG_INFINITY,
                        upper: slope,
                    });
                }
                states.push(TermState::Free { lo, hi, slope });
                if hi.is_finite() {
                    states.push(TermState::Fixed {
                        at: hi,
                        lower: slope,
                        upper: f64::INFINITY,
                    });
                }
                states
            }
            DualTerm::Kink {
                left_slope,
                right_slope,
            } => vec![
                TermState::Free {
                    lo: f64::NEG_INFINITY,
                    hi: 0.0,
                    slope: left_slope,
                },
                TermState::Fixed {
                    at: 0.0,
                    lower: left_slope,
                    upper: right_slope,
                },
                TermState::Free {
                    lo: 0.0,
                    hi: f64::INFINITY,
                    slope: right_slope,
                },
            ],
        }
    }
}
