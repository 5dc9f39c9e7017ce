//! The composite model `min_x f(x) + g(Ax)` and its dual calculus.
//!
//! With `F(y) = f*(A'y)` and `G(y) = g*(-y)`, the dual objective minimised by
//! every solver in this crate is `q~(y) = F(y) + G(y) = -q(y)`. The primal
//! point attached to a dual vector is `x(y) = argmax <A'y, x> - f(x)` and the
//! split variable is any `z(y) in argmin <y, z> + g(z)`.

mod dual_qp;
pub mod functions;
mod oracle;

use std::fmt;
use std::sync::Arc;

pub use dual_qp::DualQpForm;
pub use oracle::{DualTerm, ProxFunction, StronglyConvex, TermState, FEAS_TOL};

use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::linalg::{all_finite, dot, LinearOperator};

/// How to pick an element of `argmin <y, z> + g(z)`.
#[derive(Debug, Clone, Copy)]
pub enum ZRoute<'a> {
    /// Through the linear minimisation oracle of `g`.
    Conjugate,
    /// `y` is known to equal `p_L(base)`; then
    /// `z(y) = A x(base) + L (y - base)` without touching `g`.
    ProxOutput { base: &'a [f64], lipschitz: f64 },
}

/// `x(y)`, `A x(y)` and `F(y)` evaluated together.
#[derive(Debug, Clone)]
pub struct SmoothDual {
    pub x: Vec<f64>,
    /// `A x(y)`, which is also `grad F(y)`.
    pub ax: Vec<f64>,
    pub value: f64,
}

#[derive(Clone)]
pub struct CompositeProblem {
    name: String,
    operator: LinearOperator,
    f: Arc<dyn StronglyConvex>,
    g: Arc<dyn ProxFunction>,
    lipschitz: f64,
    gamma_h: Option<f64>,
}

impl fmt::Debug for CompositeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompositeProblem")
            .field("name", &self.name)
            .field("n", &self.primal_dim())
            .field("m", &self.dual_dim())
            .field("norm", &self.operator.norm())
            .field("sigma", &self.sigma())
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl CompositeProblem {
    pub fn new(
        name: impl Into<String>,
        operator: LinearOperator,
        f: Arc<dyn StronglyConvex>,
        g: Arc<dyn ProxFunction>,
    ) -> Result<Self> {
        check_dim(operator.cols(), f.dim())?;
        check_dim(operator.rows(), g.dim())?;
        let sigma = f.modulus();
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "strong convexity modulus must be positive, got {sigma}"
            )));
        }
        let norm = operator.norm();
        Ok(Self {
            name: name.into(),
            lipschitz: norm * norm / sigma,
            operator,
            f,
            g,
            gamma_h: None,
        })
    }

    /// Declares a finite bound on subgradients of `H` over its domain.
    pub fn with_gamma_h(mut self, gamma_h: f64) -> Self {
        self.gamma_h = Some(gamma_h);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn operator(&self) -> &LinearOperator {
        &self.operator
    }

    pub fn f(&self) -> &dyn StronglyConvex {
        self.f.as_ref()
    }

    pub fn g(&self) -> &dyn ProxFunction {
        self.g.as_ref()
    }

    pub fn primal_dim(&self) -> usize {
        self.operator.cols()
    }

    pub fn dual_dim(&self) -> usize {
        self.operator.rows()
    }

    pub fn sigma(&self) -> f64 {
        self.f.modulus()
    }

    /// `L_F = ||A||^2 / sigma`.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn gamma_g(&self) -> f64 {
        self.g.subgradient_bound()
    }

    pub fn gamma_h(&self) -> Option<f64> {
        self.gamma_h
    }

    /// The explicit quadratic dual, when `f` is a diagonal quadratic on the
    /// whole space and `G` is separable piecewise linear.
    pub fn dual_qp_form(&self) -> Option<DualQpForm> {
        let (diag, lin, c) = self.f.diagonal_quadratic()?;
        let terms = self.g.dual_terms()?;
        Some(DualQpForm::from_quadratic(
            &self.operator.to_dense(),
            &diag,
            &lin,
            c,
            terms,
        ))
    }

    pub fn primal_from_dual(&self, y: &[f64]) -> Result<Vec<f64>> {
        if !all_finite(y) {
            return Err(Error::NonFinite("dual vector".into()));
        }
        let u = self.operator.apply_adjoint(y)?;
        let mut x = vec![0.0; self.primal_dim()];
        self.f.conjugate_argmax(&u, &mut x);
        Ok(x)
    }

    pub fn smooth_dual(&self, y: &[f64]) -> Result<SmoothDual> {
        let x = self.primal_from_dual(y)?;
        let ax = self.operator.apply(&x)?;
        let fx = self
            .f
            .value(&x)
            .finite()
            .ok_or_else(|| Error::NonFinite("f at x(y)".into()))?;
        let value = dot(y, &ax) - fx;
        Ok(SmoothDual { x, ax, value })
    }

    /// `grad F(y) = A x(y)`.
    pub fn grad_dual_smooth(&self, y: &[f64]) -> Result<Vec<f64>> {
        let x = self.primal_from_dual(y)?;
        self.operator.apply(&x)
    }

    pub fn z_from_dual(&self, y: &[f64], route: ZRoute<'_>) -> Result<Vec<f64>> {
        check_dim(self.dual_dim(), y.len())?;
        match route {
            ZRoute::Conjugate => self.g.linear_argmin(y),
            ZRoute::ProxOutput { base, lipschitz } => {
                check_dim(self.dual_dim(), base.len())?;
                let mut z = self.grad_dual_smooth(base)?;
                for ((zi, yi), bi) in z.iter_mut().zip(y).zip(base) {
                    *zi += lipschitz * (yi - bi);
                }
                Ok(z)
            }
        }
    }

    /// `G(y)`, either through the conjugate oracle or from a companion
    /// `z = z(y)` via `G(y) = -<y, z> - g(z)`.
    pub fn dual_nonsmooth(&self, y: &[f64], companion: Option<&[f64]>) -> Result<ExtReal> {
        match companion {
            Some(z) => {
                check_dim(self.dual_dim(), z.len())?;
                let gz = self.g.value(z).finite().ok_or_else(|| {
                    Error::InvalidArgument("companion z lies outside dom g".into())
                })?;
                Ok(ExtReal::Finite(-dot(y, z) - gz))
            }
            None => {
                let minus_y: Vec<f64> = y.iter().map(|v| -v).collect();
                self.g.conjugate(&minus_y)
            }
        }
    }

    /// `q~(y) = F(y) + G(y)`.
    pub fn eval_dual(&self, y: &[f64], companion: Option<&[f64]>) -> Result<ExtReal> {
        let smooth = self.smooth_dual(y)?;
        Ok(self.dual_nonsmooth(y, companion)? + smooth.value)
    }

    /// `H(x) = f(x) + g(Ax)`.
    pub fn eval_primal(&self, x: &[f64]) -> Result<ExtReal> {
        if !all_finite(x) {
            return Err(Error::NonFinite("primal vector".into()));
        }
        let ax = self.operator.apply(x)?;
        Ok(self.f.value(x) + self.g.value(&ax))
    }

    /// `H~(x, z) = f(x) + g(z)`.
    pub fn eval_split_primal(&self, x: &[f64], z: &[f64]) -> Result<ExtReal> {
        check_dim(self.primal_dim(), x.len())?;
        check_dim(self.dual_dim(), z.len())?;
        Ok(self.f.value(x) + self.g.value(z))
    }

    /// Both sides of `H~(x(y), z(y)) - q(y) = <y, A x(y) - z(y)>`.
    pub fn lagrangian_gap_identity(
        &self,
        y: &[f64],
        x_of_y: &[f64],
        z_of_y: &[f64],
    ) -> Result<(f64, f64)> {
        let split = self
            .eval_split_primal(x_of_y, z_of_y)?
            .finite()
            .ok_or_else(|| Error::NonFinite("H~ at (x(y), z(y))".into()))?;
        let dual = self
            .eval_dual(y, Some(z_of_y))?
            .finite()
            .ok_or_else(|| Error::NonFinite("dual value".into()))?;
        let ax = self.operator.apply(x_of_y)?;
        let rhs: f64 = y
            .iter()
            .zip(ax.iter().zip(z_of_y))
            .map(|(yi, (a, z))| yi * (a - z))
            .sum();
        // q(y) = -q~(y)
        Ok((split + dual, rhs))
    }
}

#[cfg(test)]
mod tests {
    use super::functions::{L1Norm, SquaredDistance};
    use super::*;
    use crate::linalg::FirstDifference;

    fn toy() -> CompositeProblem {
        let map = FirstDifference { n: 2 };
        let op = LinearOperator::with_exact_norm(Arc::new(map), map.exact_norm());
        CompositeProblem::new(
            "toy",
            op,
            Arc::new(SquaredDistance {
                center: vec![0.0, 4.0],
            }),
            Arc::new(L1Norm {
                weight: 1.0,
                dim: 1,
            }),
        )
        .unwrap()
    }

    #[test]
    fn toy_primal_recovery() {
        let p = toy();
        assert_eq!(p.primal_from_dual(&[0.0]).unwrap(), vec![0.0, 4.0]);
        assert_eq!(p.primal_from_dual(&[-1.0]).unwrap(), vec![1.0, 3.0]);
        assert_eq!(p.grad_dual_smooth(&[0.0]).unwrap(), vec![4.0]);
        assert_eq!(p.grad_dual_smooth(&[-1.0]).unwrap(), vec![2.0]);
        assert!((p.lipschitz() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn toy_dual_values() {
        let p = toy();
        assert_eq!(p.eval_dual(&[-1.0], None).unwrap(), ExtReal::Finite(-3.0));
        assert_eq!(p.eval_dual(&[0.0], None).unwrap(), ExtReal::Finite(0.0));
        assert_eq!(p.eval_dual(&[1.5], None).unwrap(), ExtReal::PosInf);
        // q~(y) = y^2 + 4y on [-1, 1]
        for y in [-0.75, -0.2, 0.3, 0.9] {
            let v = p.eval_dual(&[y], None).unwrap().finite().unwrap();
            assert!((v - (y * y + 4.0 * y)).abs() < 1e-14);
        }
    }

    #[test]
    fn toy_primal_values() {
        let p = toy();
        assert_eq!(p.eval_primal(&[1.0, 3.0]).unwrap(), ExtReal::Finite(3.0));
        assert_eq!(p.eval_primal(&[0.0, 4.0]).unwrap(), ExtReal::Finite(4.0));
    }

    #[test]
    fn z_routes() {
        let p = toy();
        let z = p
            .z_from_dual(
                &[-1.0],
                ZRoute::ProxOutput {
                    base: &[0.0],
                    lipschitz: 2.0,
                },
            )
            .unwrap();
        assert_eq!(z, vec![2.0]);
        assert!(matches!(
            p.z_from_dual(&[2.0], ZRoute::Conjugate),
            Err(Error::Unbounded(_))
        ));
    }

    #[test]
    fn gap_identity_at_optimum_and_zero() {
        let p = toy();
        let x = p.primal_from_dual(&[-1.0]).unwrap();
        let (lhs, rhs) = p.lagrangian_gap_identity(&[-1.0], &x, &[2.0]).unwrap();
        assert!(lhs.abs() < 1e-12 && rhs.abs() < 1e-12);

        // y = 0 with z from the L = 2 prox route of base 0 (z = 2)
        let x0 = p.primal_from_dual(&[0.0]).unwrap();
        let z0 = p.g().linear_argmin(&[0.0]).unwrap();
        let (lhs, rhs) = p.lagrangian_gap_identity(&[0.0], &x0, &z0).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
        assert_eq!(rhs, 0.0);
    }

    #[test]
    fn rejects_dimension_mismatch() {
        let map = FirstDifference { n: 3 };
        let op = LinearOperator::with_exact_norm(Arc::new(map), map.exact_norm());
        let err = CompositeProblem::new(
            "bad",
            op,
            Arc::new(SquaredDistance {
                center: vec![0.0, 1.0],
            }),
            Arc::new(L1Norm {
                weight: 1.0,
                dim: 2,
            }),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }
}
