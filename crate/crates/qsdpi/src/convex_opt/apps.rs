//! Diamond norm, minimal degrading ε and conditional min-entropy as block SDPs.
//!
//! Layouts (all blocks PSD, `t` a 1×1 block):
//! - diamond norm of a Hermiticity-preserving map with Choi J:
//!   min t s.t. P − N = J, Tr_out(P + N) + S = t·I.
//! - minimal degrading ε for (M, N): as above with P − N + L(J_Θ) = J_N and
//!   Tr_out J_Θ = I, where L(J_Θ) is the Choi matrix of Θ∘M.
//! - min Tr σ̃ s.t. I_A ⊗ σ̃ − S = ρ_AB.

use super::{solve_sdp, LinearMap, SdpProblem, SdpSolution, SdpStatus, DEFAULT_TOL};
use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::{eigh, partial_trace, powm_support};
use crate::{c64, CMat};

fn solved(p: &SdpProblem, what: &str) -> Result<SdpSolution> {
    let sol = solve_sdp(p, DEFAULT_TOL)?;
    if sol.status != SdpStatus::Optimal {
        // Near-converged runs that stalled at the iteration cap are still usable at a looser level.
        let loose = 1e3 * DEFAULT_TOL;
        if !(sol.status == SdpStatus::MaxIter
            && sol.gap <= loose
            && sol.primal_infeasibility <= loose
            && sol.dual_infeasibility <= loose)
        {
            return Err(Error::SolverFailure(format!(
                "{what}: status {:?} after {} iterations (gap {:e}, pinf {:e}, dinf {:e})",
                sol.status,
                sol.iterations,
                sol.gap,
                sol.primal_infeasibility,
                sol.dual_infeasibility
            )));
        }
    }
    Ok(sol)
}

/// Adds P, N, S, t and the constraint Tr_out(P + N) + S = t·I; returns (P, N, t).
fn diamond_skeleton(p: &mut SdpProblem, dim_in: usize, dim_out: usize) -> (usize, usize, usize) {
    let big = dim_in * dim_out;
    let bp = p.add_block(big);
    let bn = p.add_block(big);
    let bs = p.add_block(dim_in);
    let bt = p.add_block(1);
    let tr_out = LinearMap::new(big, |x| {
        partial_trace(x, &[dim_in, dim_out], &[0]).expect("dims fixed")
    });
    let id_s = LinearMap::new(dim_in, |x| x.clone());
    let neg_t = LinearMap::new(1, |x| CMat::identity(dim_in).scale(-x[(0, 0)]));
    p.add_matrix_equality(
        &[(bp, &tr_out), (bn, &tr_out), (bs, &id_s), (bt, &neg_t)],
        &CMat::zeros(dim_in, dim_in),
    );
    p.set_objective(bt, CMat::identity(1));
    (bp, bn, bt)
}

/// Diamond norm of the Hermiticity-preserving map with Choi matrix `choi` (input ⊗ output).
pub fn diamond_norm(choi: &CMat, dim_in: usize, dim_out: usize) -> Result<f64> {
    if choi.rows() != dim_in * dim_out || !choi.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Choi matrix does not match {dim_in}->{dim_out}"
        )));
    }
    if !choi.is_hermitian(1e-10) {
        return Err(Error::NonHermitian(choi.hermiticity_error()));
    }
    let choi = choi.hermitian_part();
    if choi.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let big = dim_in * dim_out;
    let mut p = SdpProblem::new();
    let (bp, bn, _) = diamond_skeleton(&mut p, dim_in, dim_out);
    let id = LinearMap::new(big, |x| x.clone());
    let neg = LinearMap::new(big, |x| x.scale_re(-1.0));
    p.add_matrix_equality(&[(bp, &id), (bn, &neg)], &choi);
    Ok(solved(&p, "diamond norm")?.objective.max(0.0))
}

/// ‖a − b‖_⋄ for channels with equal input and output dimensions.
pub fn diamond_distance(a: &QuantumChannel, b: &QuantumChannel) -> Result<f64> {
    if a.dim_in() != b.dim_in() || a.dim_out() != b.dim_out() {
        return Err(Error::DimensionMismatch(
            "channels act between different spaces".into(),
        ));
    }
    diamond_norm(&(a.choi() - b.choi()), a.dim_in(), a.dim_out())
}

/// Result of the minimal-degrading SDP.
#[derive(Clone, Debug)]
pub struct DegradingFit {
    /// min over CPTP Θ of ‖N − Θ∘M‖_⋄.
    pub eps: f64,
    /// Optimal Θ, projected back onto CPTP maps.
    pub theta: QuantumChannel,
    pub iterations: usize,
}

/// Θ(Y) = Tr_in[(Yᵀ ⊗ I) J_Θ].
fn apply_choi(j: &CMat, y: &CMat, d1: usize, d2: usize) -> CMat {
    let lifted = y.transpose().kron(&CMat::identity(d2)).matmul(j);
    partial_trace(&lifted, &[d1, d2], &[1]).expect("dims fixed")
}

/// Nearest-looking CPTP map to an SDP iterate: clip negative Choi eigenvalues, then
/// conjugate by (Tr_out J)^{−1/2} ⊗ I.
fn repair_choi(j: &CMat, d1: usize, d2: usize) -> Result<QuantumChannel> {
    let e = eigh(&j.hermitian_part())?;
    let clipped = e.compose(
        &e.eigenvalues
            .iter()
            .map(|&x| x.max(0.0))
            .collect::<Vec<_>>(),
    );
    let marg = partial_trace(&clipped, &[d1, d2], &[0])?;
    let a = powm_support(&marg, -0.5)?.kron(&CMat::identity(d2));
    let fixed = a.matmul(&clipped).matmul(&a).hermitian_part();
    QuantumChannel::from_choi(&fixed, d1, d2)
}

/// Minimises ‖N − Θ∘M‖_⋄ over channels Θ in one SDP.
pub fn min_degrading_eps(m: &QuantumChannel, n: &QuantumChannel) -> Result<DegradingFit> {
    if m.dim_in() != n.dim_in() {
        return Err(Error::DimensionMismatch(
            "channels have different inputs".into(),
        ));
    }
    let (din, dm, dn) = (m.dim_in(), m.dim_out(), n.dim_out());
    let mut p = SdpProblem::new();
    let (bp, bn, _) = diamond_skeleton(&mut p, din, dn);
    let bth = p.add_block(dm * dn);
    let m_units: Vec<CMat> = (0..din * din)
        .map(|k| m.apply(&CMat::unit(din, k / din, k % din)))
        .collect();
    let link = LinearMap::new(dm * dn, |jt| {
        let mut out = CMat::zeros(din * dn, din * dn);
        for (k, mu) in m_units.iter().enumerate() {
            out += &CMat::unit(din, k / din, k % din).kron(&apply_choi(jt, mu, dm, dn));
        }
        out
    });
    let big = din * dn;
    let id = LinearMap::new(big, |x| x.clone());
    let neg = LinearMap::new(big, |x| x.scale_re(-1.0));
    p.add_matrix_equality(&[(bp, &id), (bn, &neg), (bth, &link)], n.choi());
    let tr_out = LinearMap::new(dm * dn, |x| {
        partial_trace(x, &[dm, dn], &[0]).expect("dims fixed")
    });
    p.add_matrix_equality(&[(bth, &tr_out)], &CMat::identity(dm));
    let sol = solved(&p, "minimal degrading epsilon")?;
    let theta = repair_choi(&sol.primal[bth], dm, dn)?;
    Ok(DegradingFit {
        eps: sol.objective.max(0.0),
        theta,
        iterations: sol.iterations,
    })
}

/// Optimal value of min Tr σ̃ s.t. I_A ⊗ σ̃ ⪰ ρ_AB, which is e^{−H_min(A|B)} in nats.
pub fn min_entropy_sdp(rho_ab: &CMat, dims: [usize; 2]) -> Result<f64> {
    let [da, db] = dims;
    if rho_ab.rows() != da * db {
        return Err(Error::DimensionMismatch(format!(
            "state does not match {dims:?}"
        )));
    }
    let mut p = SdpProblem::new();
    let bs = p.add_block(db);
    let bslack = p.add_block(da * db);
    p.set_objective(bs, CMat::identity(db));
    let lift = LinearMap::new(db, |x| CMat::identity(da).kron(x));
    let neg = LinearMap::new(da * db, |x| x.scale(c64(-1.0, 0.0)));
    p.add_matrix_equality(&[(bs, &lift), (bslack, &neg)], &rho_ab.hermitian_part());
    let sol = solved(&p, "min-entropy")?;
    if sol.objective <= 0.0 {
        return Err(Error::NumericalFailure(format!(
            "non-positive min-entropy optimum {}",
            sol.objective
        )));
    }
    Ok(sol.objective)
}
