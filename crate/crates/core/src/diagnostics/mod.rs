//! Certificates for the convergence bounds of the dual methods, evaluated on
//! solver traces against an independently computed dual optimum, and
//! log-log rate fits.

mod certs;
mod rates;

use std::fmt;

pub use certs::*;
pub use rates::{fit_rate, running_min, RateFit, MIN_WINDOW};

use crate::linalg::{dist, norm};

#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    ClosedForm,
    /// Exhaustive active-set enumeration of the dual QP.
    Enumeration {
        patterns: usize,
        rank_deficient: bool,
    },
    /// A long FDPG run, optionally polished by an active-set solve.
    LongRun {
        iterations: usize,
        polished: bool,
    },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm => write!(f, "closed-form"),
            Provenance::Enumeration {
                patterns,
                rank_deficient,
            } => {
                write!(f, "enumeration({patterns} patterns")?;
                if *rank_deficient {
                    write!(f, ", minimum-norm among optimal patterns")?;
                }
                write!(f, ")")
            }
            Provenance::LongRun {
                iterations,
                polished,
            } => write!(
                f,
                "long-run({iterations} iterations{})",
                if *polished { ", polished" } else { "" }
            ),
        }
    }
}

/// A dual optimum `y*` with its primal partner `x* = x(y*)`.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub y_star: Vec<f64>,
    pub x_star: Vec<f64>,
    /// `q~(y*)`.
    pub dual_value: f64,
    /// `H(x*)`.
    pub primal_value: f64,
    pub provenance: Provenance,
    /// `||p_{L_F}(y*) - y*||`.
    pub residual: f64,
    pub low_precision: bool,
}

impl ReferenceSolution {
    pub fn distance_from(&self, y0: &[f64]) -> f64 {
        dist(y0, &self.y_star)
    }

    pub fn y_star_norm(&self) -> f64 {
        norm(&self.y_star)
    }

    /// `H(x*) - q(y*)`, zero at a true optimum.
    pub fn duality_gap(&self) -> f64 {
        self.primal_value + self.dual_value
    }

    /// Extra absolute slack granted to every certificate.
    pub fn slack(&self) -> f64 {
        if self.low_precision {
            10.0 * self.residual
        } else {
            0.0
        }
    }
}
