//! Small dense semidefinite programs over complex Hermitian matrices:
//!
//! ```text
//! minimize    Re Tr(C Y)
//! subject to  Tr(A_i Y)  (≤ | = | ≥)  b_i
//!             Y ⪰ 0
//! ```
//!
//! Solved natively in the complex Hermitian cone (no real embedding) by an
//! infeasible-start primal-dual interior-point method with the HKM search
//! direction and Mehrotra predictor-corrector steps; see [`ipm`].

mod dump;
mod ipm;

pub use dump::{read_problem, write_problem};
pub use ipm::{solve_sdp, solve_sdp_with, SdpOptions};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Eq => "==",
            Sense::Ge => ">=",
        }
    }
}

/// Hermitian constraint matrix. The sparse form lists every nonzero entry
/// (both triangles) and lets the solver skip dense products for the
/// `Y_ll = 1` family.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintMatrix {
    Dense(CMat),
    Sparse(Vec<(usize, usize, C64)>),
}

impl ConstraintMatrix {
    /// `e_l e_lᴴ`, picks out `Y_ll`.
    pub fn unit_diagonal(l: usize) -> Self {
        ConstraintMatrix::Sparse(vec![(l, l, C64::new(1.0, 0.0))])
    }

    pub fn to_dense(&self, dim: usize) -> CMat {
        match self {
            ConstraintMatrix::Dense(m) => m.clone(),
            ConstraintMatrix::Sparse(entries) => {
                let mut m = CMat::zeros(dim, dim);
                for &(i, j, v) in entries {
                    m[(i, j)] += v;
                }
                m
            }
        }
    }

    /// `Re Tr(A Y)`
    pub fn inner(&self, y: &CMat) -> f64 {
        match self {
            ConstraintMatrix::Dense(a) => crate::linalg::trace_product(a, y).re,
            ConstraintMatrix::Sparse(entries) => entries.iter().map(|&(i, j, v)| (v * y[(j, i)]).re).sum(),
        }
    }

    /// `out += s · A`
    pub fn add_scaled_to(&self, out: &mut CMat, s: f64) {
        match self {
            ConstraintMatrix::Dense(a) => {
                *out += a * C64::new(s, 0.0);
            }
            ConstraintMatrix::Sparse(entries) => {
                for &(i, j, v) in entries {
                    out[(i, j)] += v * s;
                }
            }
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            ConstraintMatrix::Dense(a) => a.norm(),
            ConstraintMatrix::Sparse(entries) => {
                entries.iter().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt()
            }
        }
    }

    fn fits(&self, dim: usize) -> bool {
        match self {
            ConstraintMatrix::Dense(a) => a.shape() == (dim, dim),
            ConstraintMatrix::Sparse(entries) => entries.iter().all(|&(i, j, _)| i < dim && j < dim),
        }
    }

    fn hermitian_defect(&self, dim: usize) -> f64 {
        match self {
            ConstraintMatrix::Dense(a) => hermitian_defect(a),
            ConstraintMatrix::Sparse(_) => hermitian_defect(&self.to_dense(dim)),
        }
    }

    /// `(A + Aᴴ)/2`, duplicates merged.
    fn symmetrized(&self) -> Self {
        match self {
            ConstraintMatrix::Dense(a) => ConstraintMatrix::Dense(crate::linalg::hermitian_part(a)),
            ConstraintMatrix::Sparse(entries) => {
                let mut merged: BTreeMap<(usize, usize), C64> = BTreeMap::new();
                for &(i, j, v) in entries {
                    *merged.entry((i, j)).or_default() += v * 0.5;
                    *merged.entry((j, i)).or_default() += v.conj() * 0.5;
                }
                ConstraintMatrix::Sparse(
                    merged.into_iter().filter(|(_, v)| v.norm() > 0.0).map(|((i, j), v)| (i, j, v)).collect(),
                )
            }
        }
    }

    fn scaled(&self, s: f64) -> Self {
        match self {
            ConstraintMatrix::Dense(a) => ConstraintMatrix::Dense(a * C64::new(s, 0.0)),
            ConstraintMatrix::Sparse(entries) => {
                ConstraintMatrix::Sparse(entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpConstraint {
    pub matrix: ConstraintMatrix,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: CMat,
    pub constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    pub fn new(objective: CMat) -> Self {
        Self { dim: objective.nrows(), objective, constraints: Vec::new() }
    }

    pub fn constrain(&mut self, matrix: ConstraintMatrix, sense: Sense, rhs: f64) -> &mut Self {
        self.constraints.push(SdpConstraint { matrix, sense, rhs });
        self
    }

    /// `Re Tr(C Y)`
    pub fn objective_at(&self, y: &CMat) -> f64 {
        crate::linalg::trace_product(&self.objective, y).re
    }

    /// Largest violation of any trace constraint at `y` (zero when satisfied).
    pub fn constraint_violation(&self, y: &CMat) -> f64 {
        self.constraints
            .iter()
            .map(|c| {
                let lhs = c.matrix.inner(y);
                match c.sense {
                    Sense::Le => (lhs - c.rhs).max(0.0),
                    Sense::Ge => (c.rhs - lhs).max(0.0),
                    Sense::Eq => (lhs - c.rhs).abs(),
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::dim("SDP dimension must be at least 1"));
        }
        if self.objective.shape() != (self.dim, self.dim) {
            return Err(Error::dim(format!(
                "objective is {:?}, expected {}x{}",
                self.objective.shape(),
                self.dim,
                self.dim
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if !c.matrix.fits(self.dim) {
                return Err(Error::dim(format!("constraint {i} does not fit dimension {}", self.dim)));
            }
            if !c.rhs.is_finite() {
                return Err(Error::Config(format!("constraint {i} has non-finite rhs")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    MaxIter,
}

/// Relative KKT residuals of the (internally scaled) problem.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KktResiduals {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

/// One interior-point iterate, objectives in the caller's units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateRecord {
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub residuals: KktResiduals,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub y: CMat,
    pub objective_value: f64,
    /// Dual objective `bᵀλ`; a lower bound on the optimum once the dual
    /// residual is small.
    pub dual_objective: f64,
    /// Multipliers in the caller's sign convention (non-negative for `≥`
    /// rows, non-positive for `≤` rows).
    pub multipliers: Vec<f64>,
    pub status: SdpStatus,
    pub kkt_residuals: KktResiduals,
    pub iterations: usize,
    pub trace: Vec<IterateRecord>,
}

pub(crate) const HERMITIAN_WARN_TOL: f64 = 1e-8;
