use nalgebra::{DMatrix, DVector};

use crate::ext::ExtReal;

use super::oracle::DualTerm;

/// Explicit form of the dual objective when `f` is a diagonal quadratic and
/// `G` is separable piecewise linear:
///
/// `q~(y) = 1/2 y'Py + r'y + c + sum_i G_i(y_i)`.
#[derive(Debug, Clone)]
pub struct DualQpForm {
    pub hessian: DMatrix<f64>,
    pub linear: DVector<f64>,
    pub constant: f64,
    pub terms: Vec<DualTerm>,
}

impl DualQpForm {
    /// For `f(x) = 1/2 x'Qx - b'x + c_f`, `f*(u) = 1/2 (u+b)'Q^{-1}(u+b) - c_f`,
    /// so `P = A Q^{-1} A'`, `r = A Q^{-1} b`, `c = 1/2 b'Q^{-1}b - c_f`.
    pub fn from_quadratic(
        a: &DMatrix<f64>,
        diag: &[f64],
        linear: &[f64],
        f_constant: f64,
        terms: Vec<DualTerm>,
    ) -> Self {
        let inv = DVector::from_iterator(diag.len(), diag.iter().map(|q| 1.0 / q));
        let b = DVector::from_column_slice(linear);
        let scaled_at = DMatrix::from_fn(a.ncols(), a.nrows(), |j, i| a[(i, j)] * inv[j]);
        let hessian = a * &scaled_at;
        let qb = b.component_mul(&inv);
        let lin = a * &qb;
        let constant = 0.5 * b.dot(&qb) - f_constant;
        Self {
            hessian,
            linear: lin,
            constant,
            terms,
        }
    }

    pub fn dim(&self) -> usize {
        self.terms.len()
    }

    pub fn smooth_value(&self, y: &[f64]) -> f64 {
        let y = DVector::from_column_slice(y);
        0.5 * y.dot(&(&self.hessian * &y)) + self.linear.dot(&y) + self.constant
    }

    pub fn smooth_gradient(&self, y: &[f64]) -> Vec<f64> {
        let y = DVector::from_column_slice(y);
        (&self.hessian * y + &self.linear).iter().copied().collect()
    }

    pub fn nonsmooth_value(&self, y: &[f64]) -> ExtReal {
        self.terms.iter().zip(y).map(|(t, &v)| t.value(v)).sum()
    }

    pub fn value(&self, y: &[f64]) -> ExtReal {
        self.nonsmooth_value(y) + self.smooth_value(y)
    }
}
