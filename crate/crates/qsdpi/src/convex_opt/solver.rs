//! Infeasible primal-dual interior point method with the HKM direction and
//! Mehrotra predictor-corrector steps, working natively on complex Hermitian blocks.

use super::{SdpProblem, SdpSolution, SdpStatus, MAX_ITER};
use crate::error::{Error, Result};
use crate::numerics::{cholesky, eigvalsh, lower_triangular_inverse, solve_real_spd};
use crate::{c64, CMat};

type Blocks = Vec<CMat>;

struct Ops<'a> {
    p: &'a SdpProblem,
    c: Blocks,
}

impl<'a> Ops<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let c = p
            .blocks
            .iter()
            .zip(&p.objective)
            .map(|(&n, c)| c.clone().unwrap_or_else(|| CMat::zeros(n, n)))
            .collect();
        Self { p, c }
    }

    /// A(X)_i = Σ_b Re Tr(A_{i,b} X_b); X may be non-Hermitian.
    fn apply(&self, x: &Blocks) -> Vec<f64> {
        self.p
            .constraints
            .iter()
            .map(|c| c.terms.iter().map(|(b, a)| a.inner_re(&x[*b])).sum())
            .collect()
    }

    /// Aᵀ(y) = ⊕_b Σ_i y_i A_{i,b}.
    fn adjoint(&self, y: &[f64]) -> Blocks {
        let mut out: Blocks = self.p.blocks.iter().map(|&n| CMat::zeros(n, n)).collect();
        for (c, &yi) in self.p.constraints.iter().zip(y) {
            for (b, a) in &c.terms {
                out[*b].axpy(c64(yi, 0.0), a);
            }
        }
        out
    }
}

fn inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner_re(y)).sum()
}

fn norm(a: &Blocks) -> f64 {
    a.iter().map(|x| x.norm_fro().powi(2)).sum::<f64>().sqrt()
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn sub(a: &Blocks, b: &Blocks) -> Blocks {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn herm(a: Blocks) -> Blocks {
    a.into_iter().map(|x| x.hermitian_part()).collect()
}

/// Inverse of a Hermitian positive definite block through its Cholesky factor.
fn hpd_inverse(z: &CMat) -> Result<CMat> {
    let l = cholesky(z)
        .ok_or_else(|| Error::NumericalFailure("dual slack lost positive definiteness".into()))?;
    let li = lower_triangular_inverse(&l);
    Ok(li.adjoint().matmul(&li).hermitian_part())
}

/// Solves the Schur system after symmetric diagonal equilibration, which keeps
/// Cholesky usable when the diagonal spans many orders of magnitude near the optimum.
fn solve_schur(schur: &[f64], m: usize, rhs: &[f64]) -> Result<Vec<f64>> {
    let d: Vec<f64> = (0..m)
        .map(|i| 1.0 / schur[i * m + i].max(f64::MIN_POSITIVE).sqrt())
        .collect();
    let mut scaled = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..m {
            scaled[i * m + j] = d[i] * schur[i * m + j] * d[j];
        }
    }
    let r: Vec<f64> = (0..m).map(|i| d[i] * rhs[i]).collect();
    let u = match solve_real_spd(&scaled, m, &r) {
        Ok(u) => u,
        Err(_) => {
            for i in 0..m {
                scaled[i * m + i] += 1e-12;
            }
            solve_real_spd(&scaled, m, &r)?
        }
    };
    let mut x: Vec<f64> = (0..m).map(|i| d[i] * u[i]).collect();
    // Two rounds of iterative refinement against the unscaled system.
    for _ in 0..2 {
        let res: Vec<f64> = (0..m)
            .map(|i| rhs[i] - (0..m).map(|j| schur[i * m + j] * x[j]).sum::<f64>())
            .collect();
        let rs: Vec<f64> = (0..m).map(|i| d[i] * res[i]).collect();
        let Ok(du) = solve_real_spd(&scaled, m, &rs) else {
            break;
        };
        for i in 0..m {
            x[i] += d[i] * du[i];
        }
    }
    Ok(x)
}

/// Largest α ≤ 1 (scaled by `frac`) with X + αΔ ⪰ 0, for X positive definite.
fn max_step(x: &Blocks, dx: &Blocks, frac: f64) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let l = cholesky(xb)
            .ok_or_else(|| Error::NumericalFailure("iterate lost positive definiteness".into()))?;
        let li = lower_triangular_inverse(&l);
        let m = li.matmul(db).matmul(&li.adjoint()).hermitian_part();
        let lmin = *eigvalsh(&m)?.last().unwrap();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Ok((frac * alpha).min(1.0))
}

fn merit(s: &SdpSolution) -> f64 {
    s.primal_infeasibility.max(s.dual_infeasibility).max(s.gap)
}

fn better(best: Option<SdpSolution>, cur: SdpSolution) -> SdpSolution {
    match best {
        Some(b) if merit(&b) < merit(&cur) => b,
        _ => cur,
    }
}

/// Solves the block SDP to relative accuracy `tol` (infeasibilities and gap).
pub fn solve_sdp(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    problem.validate()?;
    let ops = Ops::new(problem);
    let m = problem.constraints.len();
    let n_tot = problem.total_dim() as f64;
    let b: Vec<f64> = problem.constraints.iter().map(|c| c.rhs).collect();
    let norm_b = vnorm(&b);
    let norm_c = norm(&ops.c);

    let max_a = problem
        .constraints
        .iter()
        .map(|c| {
            c.terms
                .iter()
                .map(|(_, a)| a.norm_fro().powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    let zeta = problem
        .constraints
        .iter()
        .map(|c| {
            let na = c
                .terms
                .iter()
                .map(|(_, a)| a.norm_fro().powi(2))
                .sum::<f64>()
                .sqrt();
            n_tot * (1.0 + c.rhs.abs()) / (1.0 + na)
        })
        .fold(10.0f64.max(n_tot.sqrt()), f64::max);
    let eta = 10.0f64.max(n_tot.sqrt()).max(max_a).max(norm_c);
    let mut x: Blocks = problem
        .blocks
        .iter()
        .map(|&n| CMat::identity(n).scale_re(zeta))
        .collect();
    let mut z: Blocks = problem
        .blocks
        .iter()
        .map(|&n| CMat::identity(n).scale_re(eta))
        .collect();
    let mut y = vec![0.0; m];

    let mut iter = 0;
    let mut status = SdpStatus::MaxIter;
    let mut best: Option<SdpSolution> = None;
    loop {
        let ax = ops.apply(&x);
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let aty = ops.adjoint(&y);
        let rd: Blocks = ops
            .c
            .iter()
            .zip(&z)
            .zip(&aty)
            .map(|((c, zb), ab)| &(c - zb) - ab)
            .collect();
        let pobj = inner(&ops.c, &x);
        let dobj: f64 = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
        let pinf = vnorm(&rp) / (1.0 + norm_b);
        let dinf = norm(&rd) / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let mu = inner(&x, &z) / n_tot;

        if !(pobj.is_finite() && dobj.is_finite() && mu.is_finite()) {
            return Err(Error::NumericalFailure(format!(
                "non-finite iterate at iteration {iter}"
            )));
        }
        if pinf <= tol && dinf <= tol && gap <= tol {
            status = SdpStatus::Optimal;
        } else if norm(&x) > 1e12 * (1.0 + norm_b) {
            status = SdpStatus::Unbounded;
        } else if vnorm(&y) > 1e12 * (1.0 + norm_c) {
            status = SdpStatus::Infeasible;
        }
        let current = SdpSolution {
            primal: x.clone(),
            dual_slack: z.clone(),
            dual: y.clone(),
            objective: pobj,
            dual_objective: dobj,
            gap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            iterations: iter,
            status,
        };
        if status != SdpStatus::MaxIter || iter >= MAX_ITER {
            return Ok(if status == SdpStatus::MaxIter {
                better(best, current)
            } else {
                current
            });
        }
        best = Some(better(best, current));
        iter += 1;

        let step = (|| -> Result<(Blocks, Vec<f64>, Blocks, f64, f64)> {
            let zinv: Blocks = z.iter().map(hpd_inverse).collect::<Result<_>>()?;

            // Schur complement M_ij = Σ_b Re Tr(A_ib X_b A_jb Z_b⁻¹).
            let mut schur = vec![0.0; m * m];
            let g: Vec<Vec<(usize, CMat)>> = problem
                .constraints
                .iter()
                .map(|c| {
                    c.terms
                        .iter()
                        .map(|(bk, a)| (*bk, x[*bk].matmul(a).matmul(&zinv[*bk])))
                        .collect()
                })
                .collect();
            for i in 0..m {
                for j in i..m {
                    let mut s = 0.0;
                    for (bi, ai) in &problem.constraints[i].terms {
                        for (bj, gj) in &g[j] {
                            if bi == bj {
                                s += ai.inner_re(gj);
                            }
                        }
                    }
                    schur[i * m + j] = s;
                    schur[j * m + i] = s;
                }
            }

            let x_rd_zinv: Blocks = x
                .iter()
                .zip(&rd)
                .zip(&zinv)
                .map(|((xb, r), zi)| xb.matmul(r).matmul(zi))
                .collect();
            let a_xrz = ops.apply(&x_rd_zinv);
            let a_zinv = ops.apply(&zinv);

            let direction =
                |sigma_mu: f64, corr: Option<&Blocks>| -> Result<(Blocks, Vec<f64>, Blocks)> {
                    let mut rhs: Vec<f64> = (0..m)
                        .map(|i| b[i] - sigma_mu * a_zinv[i] + a_xrz[i])
                        .collect();
                    if let Some(cz) = corr {
                        let ac = ops.apply(cz);
                        for i in 0..m {
                            rhs[i] += ac[i];
                        }
                    }
                    let dy = solve_schur(&schur, m, &rhs)?;
                    let atdy = ops.adjoint(&dy);
                    let dz = herm(sub(&rd, &atdy));
                    let mut dx = Vec::with_capacity(x.len());
                    // ΔX = σμZ⁻¹ − X − XΔZZ⁻¹ − ΔX_aΔZ_aZ⁻¹, avoiding the cancellation in (μI − XZ)Z⁻¹.
                    for k in 0..x.len() {
                        let mut r = zinv[k].scale_re(sigma_mu);
                        r -= &x[k];
                        r -= &x[k].matmul(&dz[k]).matmul(&zinv[k]);
                        if let Some(cz) = corr {
                            r -= &cz[k];
                        }
                        dx.push(r.hermitian_part());
                    }
                    Ok((dx, dy, dz))
                };

            // Predictor.
            let (dxa, _dya, dza) = direction(0.0, None)?;
            let ap = max_step(&x, &dxa, 1.0)?;
            let ad = max_step(&z, &dza, 1.0)?;
            let xa: Blocks = x
                .iter()
                .zip(&dxa)
                .map(|(xb, d)| xb + &d.scale_re(ap))
                .collect();
            let za: Blocks = z
                .iter()
                .zip(&dza)
                .map(|(zb, d)| zb + &d.scale_re(ad))
                .collect();
            let ratio = (inner(&xa, &za) / (mu * n_tot)).max(0.0);
            let sigma = ratio.powi(3).min(1.0);

            // Corrector with the second-order term ΔX_a ΔZ_a Z⁻¹ (passed as ΔX_a ΔZ_a Z⁻¹ Z).
            let corr: Blocks = dxa
                .iter()
                .zip(&dza)
                .zip(&zinv)
                .map(|((a, d), zi)| a.matmul(d).matmul(zi))
                .collect();
            let (dx, dy, dz) = direction(sigma * mu, Some(&corr))?;
            let ap = max_step(&x, &dx, 0.98)?;
            let ad = max_step(&z, &dz, 0.98)?;
            Ok((dx, dy, dz, ap, ad))
        })();
        // Past the point where the factorizations stay reliable: report the best iterate seen.
        let Ok((dx, dy, dz, ap, ad)) = step else {
            return Ok(best.take().expect("best iterate recorded"));
        };
        for k in 0..x.len() {
            x[k] = (&x[k] + &dx[k].scale_re(ap)).hermitian_part();
            z[k] = (&z[k] + &dz[k].scale_re(ad)).hermitian_part();
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }
}
