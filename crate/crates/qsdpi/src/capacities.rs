//! One-shot information quantities and the capacity bounds implied by approximate orders.
//!
//! Every optimized quantity here is a lower bound from a local search. Formula bounds are
//! reported separately and never mixed with estimates.

use std::fmt;
use std::str::FromStr;

use crate::channels::QuantumChannel;
use crate::divergences::{eps_hat, eps_tilde, holevo_quantity, von_neumann_entropy};
use crate::error::{Error, Result};
use crate::numerics::eigh;
use crate::optim::{multi_start, random_start, LocalOptions, StateParameterization};
use crate::{c64, CMat};

/// Classical-quantum ensemble {p_x, ρ_x}.
#[derive(Clone, Debug)]
pub struct EnsembleCQ {
    pub probs: Vec<f64>,
    pub states: Vec<CMat>,
    pub pure: bool,
}

impl EnsembleCQ {
    pub fn new(probs: Vec<f64>, states: Vec<CMat>, pure: bool) -> Result<Self> {
        if probs.len() != states.len() || probs.is_empty() {
            return Err(Error::DimensionMismatch(
                "ensemble needs one state per probability".into(),
            ));
        }
        let s: f64 = probs.iter().sum();
        if probs.iter().any(|&p| !(p >= 0.0)) || (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "ensemble probabilities sum to {s}"
            )));
        }
        let d = states[0].rows();
        for st in &states {
            if st.rows() != d || st.cols() != d {
                return Err(Error::DimensionMismatch("ensemble states differ in size".into()));
            }
            crate::channels::DensityMatrix::new(st.clone())?;
        }
        Ok(Self {
            probs,
            states,
            pure,
        })
    }

    pub fn average(&self) -> CMat {
        let d = self.states[0].rows();
        let mut avg = CMat::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            avg += &s.scale_re(*p);
        }
        avg
    }
}

/// Best value found by a capacity search together with its optimizer.
#[derive(Clone, Debug)]
pub struct CapacityEstimate {
    pub value: f64,
    /// Optimal input state (q1) or ensemble (χ, P¹).
    pub ensemble: EnsembleCQ,
    pub restarts: usize,
    pub evaluations: usize,
}

/// Search budget shared by the capacity estimators.
#[derive(Clone, Debug)]
pub struct CapacityOptions {
    pub restarts: usize,
    pub seed: u64,
    pub local: LocalOptions,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            local: LocalOptions {
                ascent_evals: 3000,
                polish_evals: 800,
                ..Default::default()
            },
        }
    }
}

/// I_c = H(N(ρ)) − H(N^c(ρ)).
pub fn coherent_information(n: &QuantumChannel, rho: &CMat) -> Result<f64> {
    let nc = n.complementary()?;
    coherent_information_with(n, &nc, rho)
}

fn coherent_information_with(n: &QuantumChannel, nc: &QuantumChannel, rho: &CMat) -> Result<f64> {
    Ok(von_neumann_entropy(&n.try_apply(rho)?)? - von_neumann_entropy(&nc.try_apply(rho)?)?)
}

fn structured_state_starts(d: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mixed = CMat::identity(d).scale_re(1.0 / d as f64);
    out.push(StateParameterization::from_state(&mixed).map(|p| p.coords));
    for i in 0..d {
        out.push(StateParameterization::from_state(&CMat::basis_projector(d, i)).map(|p| p.coords));
    }
    out.into_iter().filter_map(|r| r.ok()).collect()
}

/// Lower bound on max_ρ I_c(N, ρ).
pub fn q1(n: &QuantumChannel, opts: &CapacityOptions) -> Result<CapacityEstimate> {
    let d = n.dim_in();
    let nc = n.complementary()?;
    let f = |x: &[f64]| -> f64 {
        coherent_information_with(n, &nc, &StateParameterization::decode(d, x)).unwrap_or(f64::NAN)
    };
    let nco = StateParameterization::n_coords(d);
    let mut starts = structured_state_starts(d);
    starts.extend((0..opts.restarts as u64).map(|r| random_start(nco, opts.seed, r)));
    let (_, best, evals) = multi_start(&f, &starts, &opts.local)
        .ok_or_else(|| Error::OptimizerStall("no starts".into()))?;
    let rho = StateParameterization::decode(d, &best.x);
    let value = coherent_information_with(n, &nc, &rho)?;
    Ok(CapacityEstimate {
        value,
        ensemble: EnsembleCQ {
            probs: vec![1.0],
            states: vec![rho],
            pure: false,
        },
        restarts: starts.len(),
        evaluations: evals,
    })
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let mx = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Softmax logits followed by one block per member: a complex vector (pure) or a factor L.
struct EnsembleCoords {
    k: usize,
    d: usize,
    pure: bool,
}

impl EnsembleCoords {
    fn member_len(&self) -> usize {
        if self.pure {
            2 * self.d
        } else {
            2 * self.d * self.d
        }
    }

    fn n_coords(&self) -> usize {
        self.k * (1 + self.member_len())
    }

    fn decode(&self, x: &[f64]) -> (Vec<f64>, Vec<CMat>) {
        let probs = softmax(&x[..self.k]);
        let m = self.member_len();
        let states = (0..self.k)
            .map(|i| {
                let c = &x[self.k + i * m..self.k + (i + 1) * m];
                if self.pure {
                    let d = self.d;
                    let mut v: Vec<_> = (0..d).map(|j| c64(c[j], c[d + j])).collect();
                    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if nrm > 1e-300 {
                        v.iter_mut().for_each(|z| *z /= nrm);
                    } else {
                        v = (0..d).map(|j| c64(if j == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
                    }
                    CMat::outer(&v, &v)
                } else {
                    StateParameterization::decode(self.d, c)
                }
            })
            .collect();
        (probs, states)
    }

    /// Coordinates of an eigen-ensemble of ρ, padded with negligible members.
    fn encode_eigen(&self, rho: &CMat) -> Result<Vec<f64>> {
        let e = eigh(&rho.hermitian_part())?;
        let mut x = vec![0.0; self.n_coords()];
        let m = self.member_len();
        for i in 0..self.k {
            let j = i.min(self.d - 1);
            let lam = if i < self.d { e.eigenvalues[j].max(0.0) } else { 0.0 };
            x[i] = if lam > 1e-300 { lam.ln() } else { -60.0 };
            let v: Vec<_> = (0..self.d).map(|r| e.eigenvectors[(r, j)]).collect();
            let block = &mut x[self.k + i * m..self.k + (i + 1) * m];
            if self.pure {
                for (r, z) in v.iter().enumerate() {
                    block[r] = z.re;
                    block[self.d + r] = z.im;
                }
            } else {
                block.copy_from_slice(&StateParameterization::from_state(&CMat::outer(&v, &v))?.coords);
            }
        }
        Ok(x)
    }

    fn basis_start(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n_coords()];
        let m = self.member_len();
        for i in 0..self.k {
            let r = i % self.d;
            let block = &mut x[self.k + i * m..self.k + (i + 1) * m];
            if self.pure {
                block[r] = 1.0;
            } else {
                block[r * self.d + r] = 1.0;
            }
        }
        x
    }
}

fn check_size(ensemble_size: usize) -> Result<()> {
    if ensemble_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "ensemble size must be at least 2, got {ensemble_size}"
        )));
    }
    Ok(())
}

/// Lower bound on the Holevo quantity χ(N) over pure-state ensembles of the given size.
pub fn holevo_chi(n: &QuantumChannel, ensemble_size: usize, opts: &CapacityOptions) -> Result<CapacityEstimate> {
    check_size(ensemble_size)?;
    let enc = EnsembleCoords {
        k: ensemble_size,
        d: n.dim_in(),
        pure: true,
    };
    let value_of = |probs: &[f64], states: &[CMat]| -> Result<f64> {
        let outs: Vec<CMat> = states.iter().map(|s| n.apply(s)).collect();
        holevo_quantity(probs, &outs)
    };
    let f = |x: &[f64]| -> f64 {
        let (p, s) = enc.decode(x);
        value_of(&p, &s).unwrap_or(f64::NAN)
    };
    let mut starts = vec![enc.basis_start()];
    starts.extend((0..opts.restarts as u64).map(|r| random_start(enc.n_coords(), opts.seed, r)));
    let (_, best, evals) = multi_start(&f, &starts, &opts.local)
        .ok_or_else(|| Error::OptimizerStall("no starts".into()))?;
    let (probs, states) = enc.decode(&best.x);
    let value = value_of(&probs, &states)?;
    Ok(CapacityEstimate {
        value,
        ensemble: EnsembleCQ {
            probs,
            states,
            pure: true,
        },
        restarts: starts.len(),
        evaluations: evals,
    })
}

/// Lower bound on the one-shot private information max I(X:B) − I(X:E).
///
/// Conditional states are mixed: with pure ones the objective equals the coherent
/// information of the average state and the search would only reproduce q1. The search is
/// seeded with the eigen-ensemble of the q1 optimizer, so the result is never below it.
/// The ensemble size is raised to the input dimension if smaller.
pub fn private_info_p1(n: &QuantumChannel, ensemble_size: usize, opts: &CapacityOptions) -> Result<CapacityEstimate> {
    check_size(ensemble_size)?;
    let d = n.dim_in();
    let nc = n.complementary()?;
    let enc = EnsembleCoords {
        k: ensemble_size.max(d),
        d,
        pure: false,
    };
    let value_of = |probs: &[f64], states: &[CMat]| -> Result<f64> {
        let b: Vec<CMat> = states.iter().map(|s| n.apply(s)).collect();
        let e: Vec<CMat> = states.iter().map(|s| nc.apply(s)).collect();
        Ok(holevo_quantity(probs, &b)? - holevo_quantity(probs, &e)?)
    };
    let f = |x: &[f64]| -> f64 {
        let (p, s) = enc.decode(x);
        value_of(&p, &s).unwrap_or(f64::NAN)
    };
    let q = q1(n, opts)?;
    let mut starts = vec![enc.encode_eigen(&q.ensemble.states[0])?, enc.basis_start()];
    starts.extend((0..opts.restarts as u64).map(|r| random_start(enc.n_coords(), opts.seed, r)));
    let (_, best, evals) = multi_start(&f, &starts, &opts.local)
        .ok_or_else(|| Error::OptimizerStall("no starts".into()))?;
    let (probs, states) = enc.decode(&best.x);
    let value = value_of(&probs, &states)?;
    Ok(CapacityEstimate {
        value,
        ensemble: EnsembleCQ {
            probs,
            states,
            pure: false,
        },
        restarts: starts.len(),
        evaluations: evals + q.evaluations,
    })
}

/// Order relation between N and its complement that a bound set is conditioned on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Mc,
    RegMc,
    FqLn,
    CLn,
    AntiMc,
    AntiLn,
    Deg,
    AntiDeg,
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mc" => Self::Mc,
            "reg_mc" => Self::RegMc,
            "fq_ln" => Self::FqLn,
            "c_ln" => Self::CLn,
            "anti_mc" => Self::AntiMc,
            "anti_ln" => Self::AntiLn,
            "deg" => Self::Deg,
            "anti_deg" => Self::AntiDeg,
            other => return Err(Error::UnknownKind(other.into())),
        })
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mc => "mc",
            Self::RegMc => "reg_mc",
            Self::FqLn => "fq_ln",
            Self::CLn => "c_ln",
            Self::AntiMc => "anti_mc",
            Self::AntiLn => "anti_ln",
            Self::Deg => "deg",
            Self::AntiDeg => "anti_deg",
        })
    }
}

/// `lower ≤ upper_of + slack`, or `quantity ≤ slack` when `upper_of` is None.
#[derive(Clone, Debug, PartialEq)]
pub struct CapacityInequality {
    pub lower: &'static str,
    pub upper_of: Option<&'static str>,
    pub slack: f64,
}

impl fmt::Display for CapacityInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper_of {
            Some(u) => write!(f, "{u} <= {} <= {u} + {:.6}", self.lower, self.slack),
            None => write!(f, "{} <= {:.6}", self.lower, self.slack),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundSet {
    pub kind: BoundKind,
    pub eps: f64,
    pub eps_hat: Option<f64>,
    pub eps_tilde: Option<f64>,
    pub inequalities: Vec<CapacityInequality>,
}

fn ineq(lower: &'static str, upper_of: Option<&'static str>, slack: f64) -> CapacityInequality {
    CapacityInequality {
        lower,
        upper_of,
        slack,
    }
}

/// Capacity inequalities implied by N being ε-related to its complement in the given sense.
///
/// For `deg` and `anti_deg`, ε is the degrading distance and `dim_b` the output dimension
/// used in ε̂ and ε̃; other kinds ignore `dim_b`.
pub fn capacity_bounds(kind: BoundKind, eps: f64, dim_b: usize) -> Result<BoundSet> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("eps = {eps} must be nonnegative")));
    }
    let (mut hat, mut tilde) = (None, None);
    let inequalities = match kind {
        BoundKind::Mc => vec![ineq("P1", Some("Q1"), eps)],
        BoundKind::RegMc => vec![ineq("P", Some("Q"), eps)],
        BoundKind::FqLn => vec![ineq("Q", Some("Q1"), eps)],
        BoundKind::CLn => vec![
            ineq("P", Some("Q"), eps),
            ineq("Q", Some("Q1"), eps),
            ineq("P", Some("P1"), 2.0 * eps),
        ],
        BoundKind::AntiMc => vec![ineq("Q1", None, eps)],
        BoundKind::AntiLn => vec![ineq("P1", None, eps)],
        BoundKind::Deg | BoundKind::AntiDeg => {
            let h = eps_hat(eps, dim_b)?;
            let t = eps_tilde(eps, dim_b)?;
            hat = Some(h);
            tilde = Some(t);
            if kind == BoundKind::Deg {
                vec![
                    ineq("P1", Some("Q1"), h),
                    ineq("P", Some("Q"), t),
                    ineq("Q", Some("Q1"), t),
                    ineq("P", Some("P1"), 2.0 * t),
                ]
            } else {
                vec![ineq("P1", None, h), ineq("P", None, t)]
            }
        }
    };
    Ok(BoundSet {
        kind,
        eps,
        eps_hat: hat,
        eps_tilde: tilde,
        inequalities,
    })
}

/// C(M) ≤ χ(M) + ε̂ + ε̃ for ‖M − N‖⋄ ≤ ε with N weakly additive.
///
/// Weak additivity cannot be checked numerically, so the caller has to assert it.
pub fn classical_capacity_bound(chi_m: f64, eps: f64, dim_b: usize, weakly_additive: bool) -> Result<f64> {
    if !weakly_additive {
        return Err(Error::InvalidParameter(
            "the classical capacity bound needs the comparison channel to be weakly additive".into(),
        ));
    }
    Ok(chi_m + eps_hat(eps, dim_b)? + eps_tilde(eps, dim_b)?)
}
