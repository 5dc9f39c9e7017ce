//! Gallery instances and reference solvers that do not share code with the
//! iteration engines under test.

mod reference;
mod specfile;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use reference::{
    reference_solve, ReferenceMode, DEFAULT_REF_TOL, LONGRUN_MAX_ITERS, MAX_ENUMERATE_DIM,
};
pub use specfile::{parse_key_values, parse_spec_file, KeyValues};

use crate::error::{Error, Result};
use crate::linalg::{DenseMap, FirstDifference, LinearOperator, StackedIdentity};
use crate::model::functions::{
    BlockIndicator, BoxIndicator, BoxedQuadratic, ConvexSet, DiagonalQuadratic, L1Norm,
    SquaredDistance,
};
use crate::model::CompositeProblem;

pub const DEFAULT_SEED: u64 = 42;

/// `min 1/2 ||x - d||^2 + lambda ||D x||_1` with `D` the first-difference map.
#[derive(Debug, Clone, PartialEq)]
pub struct Tv1dSpec {
    pub d: Vec<f64>,
    pub lambda: f64,
}

impl Tv1dSpec {
    /// Piecewise-constant signal with four levels plus Gaussian noise.
    pub fn seeded(n: usize, lambda: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let levels = [0.0, 2.0, -1.0, 1.0];
        let d = (0..n)
            .map(|i| {
                let level = levels[(4 * i / n.max(1)).min(3)];
                let noise: f64 = rng.sample(StandardNormal);
                level + 0.25 * noise
            })
            .collect();
        Self { d, lambda }
    }
}

/// Projection of `d` onto the intersection of `sets`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionProjSpec {
    pub d: Vec<f64>,
    pub sets: Vec<ConvexSet>,
}

/// `max sum beta_j x_j - alpha_j x_j^2 / 2` over `lo <= x <= hi`, `A x <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResourceAllocSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Row-major `m x n`.
    pub coupling: Vec<f64>,
    pub budget: Vec<f64>,
}

impl ResourceAllocSpec {
    /// Unit boxes, `alpha in [1, 2]`, `beta in [1, 3]`, coupling entries in
    /// `[0.5, 1.5]` and a budget of half the full allocation.
    pub fn seeded(n: usize, m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let alpha = (0..n).map(|_| rng.random_range(1.0..2.0)).collect();
        let beta = (0..n).map(|_| rng.random_range(1.0..3.0)).collect();
        let coupling: Vec<f64> = (0..m * n).map(|_| rng.random_range(0.5..1.5)).collect();
        let budget = coupling
            .chunks(n)
            .map(|row| 0.5 * row.iter().sum::<f64>())
            .collect();
        Self {
            lo: vec![0.0; n],
            hi: vec![1.0; n],
            alpha,
            beta,
            coupling,
            budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QpRegularizer {
    L1 { lambda: f64 },
    Box { lo: f64, hi: f64 },
}

/// `min 1/2 x'Qx - b'x + g(Ax)` with Gaussian `A` of full row rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomBoxQpSpec {
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub regularizer: QpRegularizer,
}

impl Default for RandomBoxQpSpec {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            n: 8,
            m: 4,
            sigma: 1.0,
            regularizer: QpRegularizer::L1 { lambda: 0.5 },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Tv1d(Tv1dSpec),
    IntersectionProj(IntersectionProjSpec),
    ResourceAlloc(ResourceAllocSpec),
    RandomBoxQp(RandomBoxQpSpec),
}

pub const BUILTINS: [&str; 5] = ["tv1d-toy", "tv1d", "box-qp", "intersection", "resource"];

/// A named gallery instance; `seed` replaces the default for seeded ones.
pub fn builtin(name: &str, seed: Option<u64>) -> Result<ProblemSpec> {
    let seed = seed.unwrap_or(DEFAULT_SEED);
    Ok(match name {
        "tv1d-toy" => ProblemSpec::Tv1d(Tv1dSpec {
            d: vec![0.0, 4.0],
            lambda: 1.0,
        }),
        "tv1d" => ProblemSpec::Tv1d(Tv1dSpec::seeded(64, 0.5, seed)),
        "box-qp" => ProblemSpec::RandomBoxQp(RandomBoxQpSpec {
            seed,
            ..RandomBoxQpSpec::default()
        }),
        "intersection" => ProblemSpec::IntersectionProj(IntersectionProjSpec {
            d: vec![2.0, -1.0, 0.5],
            sets: vec![
                ConvexSet::Box {
                    lo: vec![-1.0; 3],
                    hi: vec![1.0; 3],
                },
                ConvexSet::Halfspace {
                    normal: vec![1.0, 1.0, 1.0],
                    offset: 0.5,
                },
            ],
        }),
        "resource" => ProblemSpec::ResourceAlloc(ResourceAllocSpec::seeded(6, 2, seed)),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown builtin `{other}` (known: {})",
                BUILTINS.join(", ")
            )))
        }
    })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn finite(name: &str, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "{name} has non-finite entries"
        )))
    }
}

/// Rejects `A` unless `A A'` is numerically positive definite.
fn check_full_row_rank(a: &DMatrix<f64>) -> Result<()> {
    let gram = a * a.transpose();
    let scale = gram.diagonal().max().max(f64::MIN_POSITIVE);
    let chol = nalgebra::Cholesky::new(gram.clone());
    let Some(chol) = chol else {
        return Err(Error::RankDeficient { row: 0, pivot: 0.0 });
    };
    let l = chol.l();
    for i in 0..l.nrows() {
        let pivot = l[(i, i)] * l[(i, i)];
        if pivot < 1e-12 * scale {
            return Err(Error::RankDeficient { row: i, pivot });
        }
    }
    Ok(())
}

pub fn make_instance(spec: &ProblemSpec) -> Result<CompositeProblem> {
    match spec {
        ProblemSpec::Tv1d(s) => {
            let n = s.d.len();
            if n < 2 {
                return Err(Error::InvalidArgument(
                    "tv1d needs at least 2 samples".into(),
                ));
            }
            positive("lambda", s.lambda)?;
            finite("d", &s.d)?;
            let map = FirstDifference { n };
            let op = LinearOperator::with_exact_norm(Arc::new(map), map.exact_norm());
            CompositeProblem::new(
                if n == 2 { "tv1d-toy" } else { "tv1d" },
                op,
                Arc::new(SquaredDistance {
                    center: s.d.clone(),
                }),
                Arc::new(L1Norm {
                    weight: s.lambda,
                    dim: n - 1,
                }),
            )
        }
        ProblemSpec::IntersectionProj(s) => {
            let n = s.d.len();
            finite("d", &s.d)?;
            if s.sets.is_empty() {
                return Err(Error::InvalidArgument(
                    "intersection needs at least one set".into(),
                ));
            }
            for set in &s.sets {
                if set.dim() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: set.dim(),
                    });
                }
            }
            let blocks = s.sets.len();
            let map = StackedIdentity { n, blocks };
            let op = LinearOperator::with_exact_norm(Arc::new(map), (blocks as f64).sqrt());
            CompositeProblem::new(
                "intersection",
                op,
                Arc::new(SquaredDistance {
                    center: s.d.clone(),
                }),
                Arc::new(BlockIndicator {
                    block: n,
                    sets: s.sets.clone(),
                }),
            )
        }
        ProblemSpec::ResourceAlloc(s) => {
            let n = s.alpha.len();
            let m = s.budget.len();
            for (name, v) in [("lo", &s.lo), ("hi", &s.hi), ("beta", &s.beta)] {
                if v.len() != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: v.len(),
                    });
                }
                finite(name, v)?;
            }
            if s.coupling.len() != m * n {
                return Err(Error::Dimension {
                    expected: m * n,
                    got: s.coupling.len(),
                });
            }
            if n > 12 {
                return Err(Error::InvalidArgument(format!(
                    "resource allocation enumerates box vertices; n = {n} exceeds 12"
                )));
            }
            for a in &s.alpha {
                positive("alpha", *a)?;
            }
            if s.lo.iter().zip(&s.hi).any(|(l, h)| !(l <= h)) {
                return Err(Error::InvalidArgument("box with lo > hi".into()));
            }
            let f = BoxedQuadratic {
                diag: s.alpha.clone(),
                linear: s.beta.clone(),
                lo: s.lo.clone(),
                hi: s.hi.clone(),
            };
            let gamma_h = f.max_gradient_norm_on_box();
            let op = LinearOperator::new(Arc::new(DenseMap::from_row_slice(m, n, &s.coupling)))?;
            Ok(CompositeProblem::new(
                "resource",
                op,
                Arc::new(f),
                Arc::new(BoxIndicator::upper(s.budget.clone())),
            )?
            .with_gamma_h(gamma_h))
        }
        ProblemSpec::RandomBoxQp(s) => {
            if s.m == 0 || s.n < s.m {
                return Err(Error::InvalidArgument(format!(
                    "box-qp needs 1 <= m <= n, got n = {}, m = {}",
                    s.n, s.m
                )));
            }
            positive("sigma", s.sigma)?;
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let diag: Vec<f64> = (0..s.n).map(|_| s.sigma + rng.random::<f64>()).collect();
            let linear: Vec<f64> = (0..s.n).map(|_| rng.sample(StandardNormal)).collect();
            let entries: Vec<f64> = (0..s.m * s.n).map(|_| rng.sample(StandardNormal)).collect();
            let map = DenseMap::from_row_slice(s.m, s.n, &entries);
            check_full_row_rank(&map.0)?;
            let g: Arc<dyn crate::model::ProxFunction> = match s.regularizer {
                QpRegularizer::L1 { lambda } => {
                    positive("lambda", lambda)?;
                    Arc::new(L1Norm {
                        weight: lambda,
                        dim: s.m,
                    })
                }
                QpRegularizer::Box { lo, hi } => {
                    if !(lo <= hi) {
                        return Err(Error::InvalidArgument("box with lo > hi".into()));
                    }
                    Arc::new(BoxIndicator {
                        lo: vec![lo; s.m],
                        hi: vec![hi; s.m],
                    })
                }
            };
            CompositeProblem::new(
                "box-qp",
                LinearOperator::new(Arc::new(map))?,
                Arc::new(DiagonalQuadratic { diag, linear }),
                g,
            )
        }
    }
}
