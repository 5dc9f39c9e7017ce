//! Closed-form oracles used by the gallery problems.

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::linalg::{dist, dot, norm};

use super::oracle::{below, DualTerm, ProxFunction, StronglyConvex, FEAS_TOL};

/// `f(x) = 1/2 ||x - center||^2`, modulus 1.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub center: Vec<f64>,
}

impl StronglyConvex for SquaredDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn modulus(&self) -> f64 {
        1.0
    }

    fn value(&self, x: &[f64]) -> ExtReal {
        let s: f64 = x
            .iter()
            .zip(&self.center)
            .map(|(a, d)| (a - d) * (a - d))
            .sum();
        ExtReal::Finite(0.5 * s)
    }

    fn conjugate_argmax(&self, u: &[f64], out: &mut [f64]) {
        for ((o, ui), d) in out.iter_mut().zip(u).zip(&self.center) {
            *o = d + ui;
        }
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().zip(&self.center).map(|(a, d)| a - d).collect())
    }

    fn diagonal_quadratic(&self) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        let c = 0.5 * dot(&self.center, &self.center);
        Some((vec![1.0; self.center.len()], self.center.clone(), c))
    }
}

/// `f(x) = 1/2 sum q_i x_i^2 - b'x` with `q_i > 0`.
#[derive(Debug, Clone)]
pub struct DiagonalQuadratic {
    pub diag: Vec<f64>,
    pub linear: Vec<f64>,
}

impl StronglyConvex for DiagonalQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn modulus(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn value(&self, x: &[f64]) -> ExtReal {
        let v = x
            .iter()
            .zip(&self.diag)
            .zip(&self.linear)
            .map(|((xi, q), b)| 0.5 * q * xi * xi - b * xi)
            .sum();
        ExtReal::Finite(v)
    }

    fn conjugate_argmax(&self, u: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = (u[i] + self.linear[i]) / self.diag[i];
        }
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(
            x.iter()
                .zip(&self.diag)
                .zip(&self.linear)
                .map(|((xi, q), b)| q * xi - b)
                .collect(),
        )
    }

    fn diagonal_quadratic(&self) -> Option<(Vec<f64>, Vec<f64>, f64)> {
        Some((self.diag.clone(), self.linear.clone(), 0.0))
    }
}

/// Separable quadratic restricted to a box: `sum 1/2 q_i x_i^2 - b_i x_i`
/// on `[lo, hi]`, `+inf` outside.
#[derive(Debug, Clone)]
pub struct BoxedQuadratic {
    pub diag: Vec<f64>,
    pub linear: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxedQuadratic {
    fn smooth_gradient(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.diag)
            .zip(&self.linear)
            .map(|((xi, q), b)| q * xi - b)
            .collect()
    }

    /// `max ||grad||` over the box; attained at a vertex since the norm of an
    /// affine map is convex. Exponential in the dimension.
    pub fn max_gradient_norm_on_box(&self) -> f64 {
        let n = self.diag.len();
        let mut best: f64 = 0.0;
        let mut vertex = vec![0.0; n];
        for mask in 0u64..(1u64 << n) {
            for (j, v) in vertex.iter_mut().enumerate() {
                *v = if mask >> j & 1 == 1 {
                    self.hi[j]
                } else {
                    self.lo[j]
                };
            }
            best = best.max(norm(&self.smooth_gradient(&vertex)));
        }
        best
    }
}

impl StronglyConvex for BoxedQuadratic {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn modulus(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn value(&self, x: &[f64]) -> ExtReal {
        let mut total = 0.0;
        for (j, &xj) in x.iter().enumerate() {
            if !(below(self.lo[j], xj) && below(xj, self.hi[j])) {
                return ExtReal::PosInf;
            }
            total += 0.5 * self.diag[j] * xj * xj - self.linear[j] * xj;
        }
        ExtReal::Finite(total)
    }

    fn conjugate_argmax(&self, u: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = ((u[j] + self.linear[j]) / self.diag[j]).clamp(self.lo[j], self.hi[j]);
        }
    }

    fn subgradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(self.smooth_gradient(x))
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// `g(z) = weight * ||z||_1`.
#[derive(Debug, Clone)]
pub struct L1Norm {
    pub weight: f64,
    pub dim: usize,
}

impl ProxFunction for L1Norm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        ExtReal::Finite(self.weight * z.iter().map(|v| v.abs()).sum::<f64>())
    }

    fn prox(&self, c: f64, w: &[f64], out: &mut [f64]) {
        let t = c * self.weight;
        for (o, &wi) in out.iter_mut().zip(w) {
            *o = soft_threshold(wi, t);
        }
    }

    fn subgradient_bound(&self) -> f64 {
        self.weight * (self.dim as f64).sqrt()
    }

    fn conjugate(&self, y: &[f64]) -> Result<ExtReal> {
        Ok(if y.iter().all(|v| below(v.abs(), self.weight)) {
            ExtReal::ZERO
        } else {
            ExtReal::PosInf
        })
    }

    fn linear_argmin(&self, y: &[f64]) -> Result<Vec<f64>> {
        if let Some((i, v)) = y
            .iter()
            .enumerate()
            .find(|(_, v)| !below(v.abs(), self.weight))
        {
            return Err(Error::Unbounded(format!(
                "|y[{i}]| = {} exceeds the l1 weight {}",
                v.abs(),
                self.weight
            )));
        }
        Ok(vec![0.0; y.len()])
    }

    fn dual_terms(&self) -> Option<Vec<DualTerm>> {
        Some(vec![
            DualTerm::Interval {
                lo: -self.weight,
                hi: self.weight,
                slope: 0.0,
            };
            self.dim
        ])
    }
}

/// Indicator of the box `[lo, hi]`; either bound may be infinite.
#[derive(Debug, Clone)]
pub struct BoxIndicator {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxIndicator {
    pub fn upper(bound: Vec<f64>) -> Self {
        Self {
            lo: vec![f64::NEG_INFINITY; bound.len()],
            hi: bound,
        }
    }
}

fn box_support(y: f64, lo: f64, hi: f64) -> ExtReal {
    // sup { y z : lo <= z <= hi }
    if y > FEAS_TOL {
        ExtReal::new(y * hi).unwrap_or(ExtReal::PosInf)
    } else if y < -FEAS_TOL {
        ExtReal::new(y * lo).unwrap_or(ExtReal::PosInf)
    } else {
        let cand = [y * lo, y * hi, 0.0];
        let v = cand
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        ExtReal::Finite(v)
    }
}

fn box_linear_argmin(y: f64, lo: f64, hi: f64) -> Option<f64> {
    // argmin { y z : lo <= z <= hi }
    if y > 0.0 {
        lo.is_finite()
            .then_some(lo)
            .or_else(|| (y <= FEAS_TOL).then(|| 0f64.clamp(lo, hi)))
    } else if y < 0.0 {
        hi.is_finite()
            .then_some(hi)
            .or_else(|| (y >= -FEAS_TOL).then(|| 0f64.clamp(lo, hi)))
    } else {
        Some(0f64.clamp(lo, hi))
    }
}

fn box_dual_term(lo: f64, hi: f64) -> DualTerm {
    // G(y) = sup { -y z : lo <= z <= hi }
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => DualTerm::Kink {
            left_slope: -hi,
            right_slope: -lo,
        },
        (false, true) => DualTerm::Interval {
            lo: f64::NEG_INFINITY,
            hi: 0.0,
            slope: -hi,
        },
        (true, false) => DualTerm::Interval {
            lo: 0.0,
            hi: f64::INFINITY,
            slope: -lo,
        },
        (false, false) => DualTerm::Interval {
            lo: 0.0,
            hi: 0.0,
            slope: 0.0,
        },
    }
}

impl ProxFunction for BoxIndicator {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        let inside = z
            .iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(&v, (&l, &h))| below(l, v) && below(v, h));
        if inside {
            ExtReal::ZERO
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, _c: f64, w: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = w[j].clamp(self.lo[j], self.hi[j]);
        }
    }

    fn domain_distance(&self, z: &[f64]) -> f64 {
        let mut p = vec![0.0; z.len()];
        self.prox(1.0, z, &mut p);
        dist(z, &p)
    }

    fn conjugate(&self, y: &[f64]) -> Result<ExtReal> {
        Ok(y.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&v, (&l, &h))| box_support(v, l, h))
            .sum())
    }

    fn linear_argmin(&self, y: &[f64]) -> Result<Vec<f64>> {
        y.iter()
            .enumerate()
            .map(|(j, &v)| {
                box_linear_argmin(v, self.lo[j], self.hi[j]).ok_or_else(|| {
                    Error::Unbounded(format!("y[{j}] = {v} drives z[{j}] to an infinite bound"))
                })
            })
            .collect()
    }

    fn dual_terms(&self) -> Option<Vec<DualTerm>> {
        Some(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(&l, &h)| box_dual_term(l, h))
                .collect(),
        )
    }
}

/// A closed convex set with a closed-form projection.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    /// `{ x : <normal, x> <= offset }`
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
}

impl ConvexSet {
    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Box { lo, .. } => lo.len(),
            ConvexSet::Halfspace { normal, .. } => normal.len(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ConvexSet::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(&v, (&l, &h))| below(l, v) && below(v, h)),
            ConvexSet::Halfspace { normal, offset } => below(dot(normal, x), *offset),
        }
    }

    pub fn project(&self, w: &[f64], out: &mut [f64]) {
        match self {
            ConvexSet::Box { lo, hi } => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = w[j].clamp(lo[j], hi[j]);
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                out.copy_from_slice(w);
                let excess = dot(normal, w) - offset;
                if excess > 0.0 {
                    let scale = excess / dot(normal, normal);
                    for (o, a) in out.iter_mut().zip(normal) {
                        *o -= scale * a;
                    }
                }
            }
        }
    }

    /// Support function `sup { <v, x> : x in C }`.
    pub fn support(&self, v: &[f64]) -> ExtReal {
        match self {
            ConvexSet::Box { lo, hi } => v
                .iter()
                .zip(lo.iter().zip(hi))
                .map(|(&vi, (&l, &h))| box_support(vi, l, h))
                .sum(),
            ConvexSet::Halfspace { normal, offset } => {
                let t = dot(v, normal) / dot(normal, normal);
                let off_axis: f64 = v
                    .iter()
                    .zip(normal)
                    .map(|(vi, a)| (vi - t * a).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if t >= -FEAS_TOL && off_axis <= FEAS_TOL * (1.0 + norm(v)) {
                    ExtReal::Finite(t.max(0.0) * offset)
                } else {
                    ExtReal::PosInf
                }
            }
        }
    }

    /// One minimiser of `<y, x>` over the set.
    pub fn linear_argmin(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            ConvexSet::Box { lo, hi } => y
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    box_linear_argmin(v, lo[j], hi[j]).ok_or_else(|| {
                        Error::Unbounded(format!("box coordinate {j} unbounded along y"))
                    })
                })
                .collect(),
            ConvexSet::Halfspace { normal, offset } => {
                let minus_y: Vec<f64> = y.iter().map(|v| -v).collect();
                if !self.support(&minus_y).is_finite() {
                    return Err(Error::Unbounded(
                        "y is not a nonpositive multiple of the halfspace normal".into(),
                    ));
                }
                let nn = dot(normal, normal);
                if norm(y) <= FEAS_TOL {
                    let mut out = vec![0.0; normal.len()];
                    self.project(&vec![0.0; normal.len()], &mut out);
                    Ok(out)
                } else {
                    Ok(normal.iter().map(|a| offset * a / nn).collect())
                }
            }
        }
    }
}

/// `g(z_1, ..., z_r) = sum_i indicator_{C_i}(z_i)` on stacked blocks of size `n`.
#[derive(Debug, Clone)]
pub struct BlockIndicator {
    pub block: usize,
    pub sets: Vec<ConvexSet>,
}

impl ProxFunction for BlockIndicator {
    fn dim(&self) -> usize {
        self.block * self.sets.len()
    }

    fn value(&self, z: &[f64]) -> ExtReal {
        if z.chunks(self.block)
            .zip(&self.sets)
            .all(|(zi, set)| set.contains(zi))
        {
            ExtReal::ZERO
        } else {
            ExtReal::PosInf
        }
    }

    fn prox(&self, _c: f64, w: &[f64], out: &mut [f64]) {
        for ((wi, oi), set) in w
            .chunks(self.block)
            .zip(out.chunks_mut(self.block))
            .zip(&self.sets)
        {
            set.project(wi, oi);
        }
    }

    fn domain_distance(&self, z: &[f64]) -> f64 {
        let mut p = vec![0.0; z.len()];
        self.prox(1.0, z, &mut p);
        dist(z, &p)
    }

    fn conjugate(&self, y: &[f64]) -> Result<ExtReal> {
        Ok(y.chunks(self.block)
            .zip(&self.sets)
            .map(|(yi, set)| set.support(yi))
            .sum())
    }

    fn linear_argmin(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(y.len());
        for (yi, set) in y.chunks(self.block).zip(&self.sets) {
            out.extend(set.linear_argmin(yi)?);
        }
        Ok(out)
    }

    fn dual_terms(&self) -> Option<Vec<DualTerm>> {
        let mut terms = Vec::with_capacity(self.dim());
        for set in &self.sets {
            match set {
                ConvexSet::Box { lo, hi } => {
                    terms.extend(lo.iter().zip(hi).map(|(&l, &h)| box_dual_term(l, h)))
                }
                ConvexSet::Halfspace { .. } => return None,
            }
        }
        Some(terms)
    }
}
