//! Dual proximal gradient methods for `min_x f(x) + g(Ax)` with `f` strongly
//! convex, together with numerical certificates for their convergence bounds.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: the composite problem, oracle traits and dual calculus.
//! * [`solvers`]: DPG, FDPG and GFDPG iteration engines.
//! * [`diagnostics`]: bound certificates against a reference optimum, and
//!   empirical rate fits.
//! * [`problems`]: gallery instances and independent reference solvers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod ext;
pub mod linalg;
pub mod model;
pub mod problems;
pub mod solvers;

pub use error::{Error, Result};
pub use ext::ExtReal;
pub use linalg::LinearOperator;
pub use model::CompositeProblem;
