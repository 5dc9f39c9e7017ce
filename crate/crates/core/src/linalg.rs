//! Dense vector helpers, the linear-map contract, and spectral-norm estimation.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, Error, Result};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scaled(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// A real linear map `R^cols -> R^rows` together with its adjoint.
///
/// Implementations must be deterministic and must satisfy
/// `<A x, y> = <x, A^T y>` up to rounding.
pub trait LinearMap: Send + Sync + fmt::Debug {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[f64], out: &mut [f64]);
    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]);

    /// Materialise the map column by column.
    fn to_dense(&self) -> DMatrix<f64> {
        let (m, n) = (self.rows(), self.cols());
        let mut dense = DMatrix::zeros(m, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; m];
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            for i in 0..m {
                dense[(i, j)] = col[i];
            }
            e[j] = 0.0;
        }
        dense
    }
}

/// Dense row-major-agnostic matrix backed by `nalgebra`.
#[derive(Debug, Clone)]
pub struct DenseMap(pub DMatrix<f64>);

impl DenseMap {
    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        DenseMap(DMatrix::from_row_slice(rows, cols, data))
    }
}

impl LinearMap for DenseMap {
    fn rows(&self) -> usize {
        self.0.nrows()
    }

    fn cols(&self) -> usize {
        self.0.ncols()
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let a = &self.0;
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..a.ncols()).map(|j| a[(i, j)] * x[j]).sum();
        }
    }

    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        let a = &self.0;
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..a.nrows()).map(|i| a[(i, j)] * y[i]).sum();
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        self.0.clone()
    }
}

/// Forward first differences, `(Ax)_i = x_{i+1} - x_i`, an `(n-1) x n` map.
#[derive(Debug, Clone, Copy)]
pub struct FirstDifference {
    pub n: usize,
}

impl FirstDifference {
    /// Largest singular value, `sqrt(2 (1 - cos(pi (n-1) / n)))`.
    pub fn exact_norm(&self) -> f64 {
        let n = self.n as f64;
        (2.0 * (1.0 - (std::f64::consts::PI * (n - 1.0) / n).cos())).sqrt()
    }
}

impl LinearMap for FirstDifference {
    fn rows(&self) -> usize {
        self.n - 1
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = x[i + 1] - x[i];
        }
    }

    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        let m = self.n - 1;
        out[0] = -y[0];
        for j in 1..m {
            out[j] = y[j - 1] - y[j];
        }
        out[m] = y[m - 1];
    }
}

/// `x -> (x, x, ..., x)` with `blocks` copies.
#[derive(Debug, Clone, Copy)]
pub struct StackedIdentity {
    pub n: usize,
    pub blocks: usize,
}

impl LinearMap for StackedIdentity {
    fn rows(&self) -> usize {
        self.n * self.blocks
    }

    fn cols(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for chunk in out.chunks_mut(self.n) {
            chunk.copy_from_slice(x);
        }
    }

    fn apply_adjoint(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for chunk in y.chunks(self.n) {
            axpy(1.0, chunk, out);
        }
    }
}

pub const NORM_SEED: u64 = 0xDA7A;
pub const NORM_TOL: f64 = 1e-8;
pub const NORM_MAX_ITERS: usize = 10_000;

/// Power iteration on `A^T A`.
///
/// Stops once the eigen-residual `||A^T A v - rho v||` drops below
/// `tol * rho`, which places `rho` within a relative `tol` of an eigenvalue
/// of `A^T A`; the square root is returned.
pub fn estimate_operator_norm(
    op: &dyn LinearMap,
    tol: f64,
    max_iters: usize,
    seed: u64,
) -> Result<f64> {
    let (m, n) = (op.rows(), op.cols());
    if m == 0 || n == 0 {
        return Err(Error::InvalidArgument(
            "operator has an empty dimension".into(),
        ));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} outside (0, 1)"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut av = vec![0.0; m];
    let mut atav = vec![0.0; n];
    let mut rayleigh = 0.0;
    for _ in 0..max_iters {
        op.apply(&v, &mut av);
        op.apply_adjoint(&av, &mut atav);
        rayleigh = dot(&v, &atav);
        if rayleigh <= 0.0 {
            // v landed in the null space; A = 0 on the explored subspace.
            if norm(&atav) == 0.0 {
                return Ok(0.0);
            }
        }
        let residual = atav
            .iter()
            .zip(&v)
            .map(|(b, x)| (b - rayleigh * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if residual <= tol * rayleigh {
            return Ok(rayleigh.sqrt());
        }
        let nb = norm(&atav);
        for (x, b) in v.iter_mut().zip(&atav) {
            *x = b / nb;
        }
    }
    Err(Error::NormNotConverged {
        iterations: max_iters,
        rayleigh,
    })
}

/// A linear map with a cached spectral norm.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    map: Arc<dyn LinearMap>,
    norm: f64,
}

impl LinearOperator {
    /// Estimates `||A||` with the default seed, tolerance and iteration cap.
    pub fn new(map: Arc<dyn LinearMap>) -> Result<Self> {
        let norm = estimate_operator_norm(map.as_ref(), NORM_TOL, NORM_MAX_ITERS, NORM_SEED)?;
        Ok(Self { map, norm })
    }

    pub fn with_exact_norm(map: Arc<dyn LinearMap>, norm: f64) -> Self {
        Self { map, norm }
    }

    pub fn rows(&self) -> usize {
        self.map.rows()
    }

    pub fn cols(&self) -> usize {
        self.map.cols()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn map(&self) -> &dyn LinearMap {
        self.map.as_ref()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.map.apply(x, &mut out);
        Ok(out)
    }

    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.rows(), y.len())?;
        let mut out = vec![0.0; self.cols()];
        self.map.apply_adjoint(y, &mut out);
        Ok(out)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.map.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_adjoint_matches_dense_transpose() {
        let op = FirstDifference { n: 5 };
        let dense = op.to_dense();
        let y = [0.3, -1.0, 2.0, 0.5];
        let mut out = vec![0.0; 5];
        op.apply_adjoint(&y, &mut out);
        let expected = dense.transpose() * nalgebra::DVector::from_column_slice(&y);
        for j in 0..5 {
            assert!((out[j] - expected[j]).abs() < 1e-15);
        }
    }

    #[test]
    fn toy_row_norm() {
        let op = FirstDifference { n: 2 };
        let est = estimate_operator_norm(&op, 1e-8, 10_000, NORM_SEED).unwrap();
        assert!((est - 2f64.sqrt()).abs() < 1e-8);
        assert!((op.exact_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identity_norm_is_one() {
        let op = DenseMap(DMatrix::identity(3, 3));
        let est = estimate_operator_norm(&op, 1e-8, 10_000, NORM_SEED).unwrap();
        assert!((est - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let op = DenseMap(DMatrix::identity(2, 2));
        assert!(matches!(
            estimate_operator_norm(&op, 1.5, 10, NORM_SEED),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn non_convergence_reports_rayleigh() {
        // Two nearly equal top singular values slow the residual decay down.
        let op = DenseMap(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            1.0, 0.999_999, 0.5,
        ])));
        match estimate_operator_norm(&op, 1e-12, 3, NORM_SEED) {
            Err(Error::NormNotConverged {
                iterations,
                rayleigh,
            }) => {
                assert_eq!(iterations, 3);
                assert!(rayleigh > 0.0 && rayleigh <= 1.0 + 1e-12);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn stacked_identity_norm() {
        let op = StackedIdentity { n: 3, blocks: 2 };
        let est = estimate_operator_norm(&op, 1e-8, 10_000, NORM_SEED).unwrap();
        assert!((est - 2f64.sqrt()).abs() < 1e-8);
    }
}
