//! Small dense semidefinite programs over block-diagonal Hermitian variables.
//!
//! Primal: min Σ_b ⟨C_b, X_b⟩ s.t. Σ_b ⟨A_{i,b}, X_b⟩ = b_i, X_b ⪰ 0,
//! with ⟨A, X⟩ = Re Tr(A X) and every A, C Hermitian.

mod apps;
mod solver;

pub use apps::{diamond_distance, diamond_norm, min_degrading_eps, min_entropy_sdp, DegradingFit};
pub use solver::solve_sdp;

use crate::error::{Error, Result};
use crate::{c64, CMat};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const MAX_ITER: usize = 200;

/// One scalar equality constraint; `terms` lists (block, coefficient matrix).
#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<(usize, CMat)>,
    pub rhs: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Vec<Option<CMat>>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub primal: Vec<CMat>,
    pub dual_slack: Vec<CMat>,
    pub dual: Vec<f64>,
    pub objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
    pub iterations: usize,
    pub status: SdpStatus,
}

impl SdpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a PSD block of the given size and returns its index.
    pub fn add_block(&mut self, size: usize) -> usize {
        self.blocks.push(size);
        self.objective.push(None);
        self.blocks.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, c: CMat) {
        self.objective[block] = Some(c);
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, CMat)>, rhs: f64) {
        self.constraints.push(Constraint { terms, rhs });
    }

    /// Adds the Hermitian matrix equation Σ_t L_t(X_{b_t}) = H, one real constraint per
    /// element of an orthonormal Hermitian basis of the output space.
    pub fn add_matrix_equality(&mut self, terms: &[(usize, &LinearMap)], rhs: &CMat) {
        let d = rhs.rows();
        for e in hermitian_basis(d) {
            let t = terms.iter().map(|(b, l)| (*b, l.adjoint(&e))).collect();
            let r = e.inner_re(rhs);
            self.add_constraint(t, r);
        }
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Structural checks run before solving.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::InvalidParameter("SDP without variables".into()));
        }
        let check = |b: usize, m: &CMat| -> Result<()> {
            if b >= self.blocks.len() || m.rows() != self.blocks[b] || m.cols() != self.blocks[b] {
                return Err(Error::DimensionMismatch(format!(
                    "coefficient does not fit block {b}"
                )));
            }
            if !m.is_hermitian(1e-12) {
                return Err(Error::NonHermitian(m.hermiticity_error()));
            }
            Ok(())
        };
        for (b, c) in self.objective.iter().enumerate() {
            if let Some(c) = c {
                check(b, c)?;
            }
        }
        for c in &self.constraints {
            for (b, m) in &c.terms {
                check(*b, m)?;
            }
        }
        Ok(())
    }
}

/// Orthonormal basis of the d×d Hermitian matrices under Re Tr(A B).
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(CMat::unit(d, i, i));
        for j in (i + 1)..d {
            let mut a = CMat::zeros(d, d);
            a[(i, j)] = c64(s, 0.0);
            a[(j, i)] = c64(s, 0.0);
            out.push(a);
            let mut b = CMat::zeros(d, d);
            b[(i, j)] = c64(0.0, s);
            b[(j, i)] = c64(0.0, -s);
            out.push(b);
        }
    }
    out
}

/// Hermiticity-preserving linear map tabulated on a Hermitian basis of its input,
/// so the adjoint can be formed as L*(B) = Σ_E ⟨B, L(E)⟩ E.
pub struct LinearMap {
    basis: Vec<CMat>,
    images: Vec<CMat>,
}

impl LinearMap {
    pub fn new(dim_in: usize, f: impl Fn(&CMat) -> CMat) -> Self {
        let basis = hermitian_basis(dim_in);
        let images = basis.iter().map(&f).collect();
        Self { basis, images }
    }

    pub fn adjoint(&self, b: &CMat) -> CMat {
        let d = self.basis[0].rows();
        let mut out = CMat::zeros(d, d);
        for (e, img) in self.basis.iter().zip(&self.images) {
            let w = b.inner_re(img);
            if w != 0.0 {
                out.axpy(c64(w, 0.0), e);
            }
        }
        out
    }
}
