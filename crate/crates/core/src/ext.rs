//! Extended-real scalars for proper convex functions.
//!
//! Proper closed convex functions never take the value −∞, so the only
//! non-finite value that has to be carried around is +∞. Addition saturates
//! at +∞ and no operation here can produce a NaN.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `+inf` to [`ExtReal::PosInf`]. NaN and `-inf` are rejected.
    pub fn new(value: f64) -> Option<Self> {
        if value.is_nan() || value == f64::NEG_INFINITY {
            None
        } else if value == f64::INFINITY {
            Some(ExtReal::PosInf)
        } else {
            Some(ExtReal::Finite(value))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Lossy view as an IEEE double (`+inf` for [`ExtReal::PosInf`]).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// `self − rhs` for a finite subtrahend.
    pub fn minus(self, rhs: f64) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v - rhs),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl From<f64> for ExtReal {
    fn from(value: f64) -> Self {
        ExtReal::new(value).expect("ExtReal from NaN or -inf")
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self.minus(-rhs)
    }
}

/// Scaling by a nonnegative factor; `0 · (+inf)` is taken to be `+inf`
/// because the factor only ever multiplies indicator-valued terms with
/// positive weights.
impl Mul<f64> for ExtReal {
    type Output = ExtReal;

    fn mul(self, rhs: f64) -> ExtReal {
        debug_assert!(rhs >= 0.0, "ExtReal scaled by a negative factor");
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * rhs),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> Self {
        iter.fold(ExtReal::ZERO, |acc, v| acc + v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => fmt::Display::fmt(v, f),
            ExtReal::PosInf => f.write_str("inf"),
        }
    }
}
