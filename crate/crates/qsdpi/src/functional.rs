//! Markov semigroups generated by channels, Dirichlet forms, 2-entropies and log-Sobolev
//! constants.
//!
//! All operators live on the Heisenberg side: a channel N generates S = N* − id and the
//! semigroup P_t = e^{tS}. Inner products are the symmetric KMS ones,
//! ⟨X, Y⟩_σ = Tr(σ^{1/2} X† σ^{1/2} Y).

use std::fmt;

use crate::channels::{build_channel, mixture, ChannelFamily, QuantumChannel};
use crate::convex_opt::hermitian_basis;
use crate::error::{Error, Result};
use crate::numerics::{apply_superop, eigenvalues_general, eigh, expm, superop_from_fn};
use crate::optim::{multi_start, random_start, LocalOptions};
use crate::{c64, CMat, C64};

/// Allowed deviation of S(I) from zero.
pub const GENERATOR_TOL: f64 = 1e-10;
/// Allowed deviation of N(σ) from σ.
pub const INVARIANCE_TOL: f64 = 1e-8;
/// Allowed deviation between N* and its KMS adjoint for a reversible generator.
pub const REVERSIBILITY_TOL: f64 = 1e-8;

const RANK_TOL: f64 = 1e-10;
/// Eigenvalues of N within this distance of 1 count towards the fixed-point space.
const FIXED_POINT_TOL: f64 = 1e-7;

/// Which Dirichlet form a number refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirichletForm {
    /// ⟨X, (id − (N* + N̂*)/2)(Y)⟩_σ.
    Continuous,
    /// ⟨X, (id − N* N̂*)(Y)⟩_σ.
    Discrete,
}

impl fmt::Display for DirichletForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Continuous => "continuous",
            Self::Discrete => "discrete",
        })
    }
}

/// σ^{1/2}, σ^{−1/2} and ln σ for a full-rank state.
#[derive(Clone, Debug)]
struct SigmaPowers {
    half: CMat,
    inv_half: CMat,
    quarter: CMat,
    log: CMat,
}

impl SigmaPowers {
    fn new(sigma: &CMat) -> Result<Self> {
        let e = eigh(&sigma.hermitian_part())?;
        let top = e.max_eigenvalue();
        if !(e.min_eigenvalue() > RANK_TOL * top.max(1.0)) {
            return Err(Error::SingularSigma(e.min_eigenvalue()));
        }
        let map = |f: fn(f64) -> f64| e.compose(&e.eigenvalues.iter().map(|&x| f(x)).collect::<Vec<_>>());
        Ok(Self {
            half: map(f64::sqrt),
            inv_half: map(|x| 1.0 / x.sqrt()),
            quarter: map(|x| x.sqrt().sqrt()),
            log: map(f64::ln),
        })
    }

    /// ⟨X, Y⟩_σ for Hermitian X, Y.
    fn inner(&self, x: &CMat, y: &CMat) -> f64 {
        self.half.matmul(x).matmul(&self.half).trace_product(y).re
    }

    fn gamma(&self, x: &CMat) -> CMat {
        self.half.matmul(x).matmul(&self.half)
    }

    /// N̂*(X) = σ^{−1/2} N(σ^{1/2} X σ^{1/2}) σ^{−1/2}.
    fn kms_adjoint(&self, n: &QuantumChannel, x: &CMat) -> CMat {
        self.inv_half.matmul(&n.apply(&self.gamma(x))).matmul(&self.inv_half)
    }
}

/// Generator S = N* − id of the semigroup built from a channel with equal input and output.
#[derive(Clone, Debug)]
pub struct SemigroupGenerator {
    pub channel: QuantumChannel,
    /// Superoperator of S on row-major vectorized operators.
    pub generator: CMat,
    /// Invariant state of N; for a non-primitive channel, the image of I/d under the
    /// projection onto the fixed points.
    pub sigma: CMat,
    pub primitive: bool,
    /// N̂* = N* within [`REVERSIBILITY_TOL`].
    pub reversible: bool,
    powers: Option<SigmaPowers>,
}

impl SemigroupGenerator {
    pub fn from_channel(n: &QuantumChannel) -> Result<Self> {
        let d = n.dim_in();
        if n.dim_out() != d {
            return Err(Error::DimensionMismatch(
                "a semigroup needs equal input and output".into(),
            ));
        }
        let generator = superop_from_fn(d, d, |x| &n.apply_adjoint(x) - x);
        let defect = apply_superop(&generator, &CMat::identity(d)).max_abs();
        if defect > GENERATOR_TOL {
            return Err(Error::InvalidParameter(format!(
                "dual map is not unital (deviation {defect:e})"
            )));
        }
        let sigma = fixed_point_projection(n)?;
        let fixed = eigenvalues_general(&n.superop())?
            .iter()
            .filter(|&&z| (z - c64(1.0, 0.0)).norm() < FIXED_POINT_TOL)
            .count();
        let powers = SigmaPowers::new(&sigma).ok();
        let primitive = fixed == 1 && powers.is_some();
        let reversible = match &powers {
            Some(p) => hermitian_basis(d)
                .iter()
                .all(|b| (&p.kms_adjoint(n, b) - &n.apply_adjoint(b)).max_abs() <= REVERSIBILITY_TOL),
            None => false,
        };
        Ok(Self {
            channel: n.clone(),
            generator,
            sigma,
            primitive,
            reversible,
            powers,
        })
    }

    pub fn dim(&self) -> usize {
        self.channel.dim_in()
    }

    fn powers(&self) -> Result<&SigmaPowers> {
        self.powers.as_ref().ok_or_else(|| {
            let min = eigh(&self.sigma)
                .map(|e| e.min_eigenvalue())
                .unwrap_or(0.0);
            Error::SingularSigma(min)
        })
    }

    /// Superoperator of P_t = e^{tS}.
    pub fn semigroup(&self, t: f64) -> Result<CMat> {
        if !(t >= 0.0) {
            return Err(Error::InvalidParameter(format!("time {t} must be nonnegative")));
        }
        expm(&self.generator.scale_re(t))
    }

    /// P_t(X).
    pub fn evolve(&self, t: f64, x: &CMat) -> Result<CMat> {
        Ok(apply_superop(&self.semigroup(t)?, x))
    }

    /// Schrödinger-picture P_t^*(ρ).
    pub fn evolve_state(&self, t: f64, rho: &CMat) -> Result<CMat> {
        Ok(apply_superop(&self.semigroup(t)?.adjoint(), rho))
    }

    /// N̂*(X), the adjoint of N* in the KMS inner product.
    pub fn kms_adjoint(&self, x: &CMat) -> Result<CMat> {
        Ok(self.powers()?.kms_adjoint(&self.channel, x))
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if !self.primitive {
            w.push("channel is not primitive: the invariant state is not unique or not full rank".into());
        }
        if !self.reversible {
            w.push("generator is not reversible: hypercontractive consequences of a log-Sobolev inequality do not apply".into());
        }
        w
    }
}

/// lim (½(id + N))^{2^k}(I/d); eigenvalue 1 of a channel is semisimple, so this is the
/// projection onto the fixed points.
///
/// Trace preservation is restored after every squaring, otherwise rounding puts the top
/// eigenvalue slightly above 1 and the powers blow up.
fn fixed_point_projection(n: &QuantumChannel) -> Result<CMat> {
    let d = n.dim_in();
    let mut p = (&n.superop() + &CMat::identity(d * d)).scale_re(0.5);
    for _ in 0..50 {
        p = p.matmul(&p);
        for c in 0..d * d {
            let on_diag = if c % (d + 1) == 0 { 1.0 } else { 0.0 };
            let tr: C64 = (0..d).map(|i| p[(i * d + i, c)]).sum();
            let fix = (c64(on_diag, 0.0) - tr) / d as f64;
            for i in 0..d {
                p[(i * d + i, c)] += fix;
            }
        }
    }
    let mut sigma = apply_superop(&p, &CMat::identity(d).scale_re(1.0 / d as f64)).hermitian_part();
    let tr = sigma.trace().re;
    if !(tr > 0.0) {
        return Err(Error::NumericalFailure("fixed-point iteration lost the trace".into()));
    }
    sigma = sigma.scale_re(1.0 / tr);
    let dev = (&n.apply(&sigma) - &sigma).max_abs();
    if dev > INVARIANCE_TOL {
        return Err(Error::NumericalFailure(format!(
            "fixed-point iteration did not converge (deviation {dev:e})"
        )));
    }
    Ok(sigma)
}

fn check_observable(x: &CMat, d: usize) -> Result<()> {
    if x.rows() != d || x.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "observable is {}x{}, expected {d}x{d}",
            x.rows(),
            x.cols()
        )));
    }
    let h = x.hermiticity_error();
    if h > 1e-10 * x.max_abs().max(1.0) {
        return Err(Error::NonHermitian(h));
    }
    Ok(())
}

/// E_S(X, X) = ⟨X, X⟩_σ − ⟨X, N*(X)⟩_σ, σ the invariant state of the generator.
pub fn dirichlet_form(gen: &SemigroupGenerator, x: &CMat) -> Result<f64> {
    check_observable(x, gen.dim())?;
    let p = gen.powers()?;
    let x = x.hermitian_part();
    Ok(p.inner(&x, &x) - p.inner(&x, &gen.channel.apply_adjoint(&x)))
}

fn check_invariant(n: &QuantumChannel, sigma: &CMat) -> Result<()> {
    if n.dim_in() != n.dim_out() || sigma.rows() != n.dim_in() {
        return Err(Error::DimensionMismatch(
            "discrete Dirichlet form needs a channel on the space of σ".into(),
        ));
    }
    let dev = (&n.apply(sigma) - sigma).max_abs();
    if dev > INVARIANCE_TOL {
        return Err(Error::InvalidParameter(format!(
            "σ is not invariant under the channel (deviation {dev:e})"
        )));
    }
    Ok(())
}

/// ⟨X, (id − N* N̂*)(X)⟩_σ = ‖X‖²_σ − ‖N̂*(X)‖²_σ, for σ invariant under N.
pub fn discrete_dirichlet_form(n: &QuantumChannel, sigma: &CMat, x: &CMat) -> Result<f64> {
    check_invariant(n, sigma)?;
    check_observable(x, n.dim_in())?;
    let p = SigmaPowers::new(sigma)?;
    let x = x.hermitian_part();
    let y = p.kms_adjoint(n, &x);
    Ok(p.inner(&x, &x) - p.inner(&y, &y))
}

/// Ent_{2,σ}(X) = D(A‖σ) − Tr A ln Tr A with A = |σ^{1/4} X σ^{1/4}|².
///
/// The normalization uses Tr A = ‖X‖²_{2,σ}, so the entropy vanishes on multiples of the
/// identity for every σ.
pub fn ent2(sigma: &CMat, x: &CMat) -> Result<f64> {
    check_observable(x, sigma.rows())?;
    let p = SigmaPowers::new(sigma)?;
    ent2_with(&p, &x.hermitian_part())
}

fn ent2_with(p: &SigmaPowers, x: &CMat) -> Result<f64> {
    let b = p.quarter.matmul(x).matmul(&p.quarter);
    let a = b.matmul(&b).hermitian_part();
    let ea = eigh(&a)?;
    let a_log_a: f64 = ea
        .eigenvalues
        .iter()
        .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
        .sum();
    let tr: f64 = ea.eigenvalues.iter().map(|v| v.max(0.0)).sum();
    let cross = a.trace_product(&p.log).re;
    let norm_term = if tr > 0.0 { tr * tr.ln() } else { 0.0 };
    Ok(a_log_a - cross - norm_term)
}

/// Variational upper bound on the log-Sobolev constant.
#[derive(Clone, Debug)]
pub struct LsiEstimate {
    /// E(X, X)/Ent_{2,σ}(X) at the witness.
    pub value: f64,
    pub witness: CMat,
    pub form: DirichletForm,
    pub restarts: usize,
    pub evaluations: usize,
}

/// Relative size below which Ent_2 is treated as zero.
const ENT_FLOOR: f64 = 1e-11;

/// Upper bound on α = inf E(X, X)/Ent_{2,σ}(X) by a multi-start search over Hermitian X.
///
/// The infimum is often approached only as X tends to a multiple of the identity, so the
/// starts include small perturbations of I.
pub fn estimate_lsi(gen: &SemigroupGenerator, form: DirichletForm, restarts: usize, seed: u64) -> Result<LsiEstimate> {
    if !gen.primitive {
        return Err(Error::NotPrimitive);
    }
    let d = gen.dim();
    let p = gen.powers()?;
    let basis = hermitian_basis(d);
    let decode = |c: &[f64]| -> CMat {
        let mut x = CMat::zeros(d, d);
        for (b, &v) in basis.iter().zip(c) {
            x.axpy(c64(v, 0.0), b);
        }
        x
    };
    let energy = |x: &CMat| -> f64 {
        match form {
            DirichletForm::Continuous => p.inner(x, x) - p.inner(x, &gen.channel.apply_adjoint(x)),
            DirichletForm::Discrete => {
                let y = p.kms_adjoint(&gen.channel, x);
                p.inner(x, x) - p.inner(&y, &y)
            }
        }
    };
    let ratio = |x: &CMat| -> f64 {
        let ent = ent2_with(p, x).unwrap_or(f64::NAN);
        let scale = p.inner(x, x);
        if !(ent > ENT_FLOOR * scale) {
            return f64::NAN;
        }
        energy(x) / ent
    };
    let f = |c: &[f64]| -> f64 { -ratio(&decode(c)) };

    let n = d * d;
    let identity: Vec<f64> = basis.iter().map(|b| b.trace().re).collect();
    let mut starts = Vec::new();
    for k in 0..n {
        for eps in [0.5, 0.05] {
            let mut c = identity.clone();
            c[k] += eps;
            starts.push(c);
        }
    }
    for r in 0..restarts as u64 {
        let mut c = random_start(n, seed, r);
        // Every other random start is a small perturbation of I.
        if r % 2 == 1 {
            c.iter_mut().zip(&identity).for_each(|(v, i)| *v = i + 0.05 * *v);
        }
        starts.push(c);
    }
    let opts = LocalOptions {
        step: 0.05,
        min_step: 1e-7,
        ..Default::default()
    };
    let (_, best, evaluations) = multi_start(&f, &starts, &opts)
        .ok_or_else(|| Error::OptimizerStall("no starts".into()))?;
    let witness = decode(&best.x);
    let value = ratio(&witness);
    if !value.is_finite() {
        return Err(Error::OptimizerStall(
            "no observable with nonzero 2-entropy was found".into(),
        ));
    }
    Ok(LsiEstimate {
        value,
        witness,
        form,
        restarts: starts.len(),
        evaluations,
    })
}

/// 2(1 − 2/d)/ln(d − 1), continued by its limit 1 at d = 2.
pub fn lsi_depolarizing(d: usize) -> Result<f64> {
    match d {
        0 | 1 => Err(Error::InvalidParameter(format!("dimension {d} must be at least 2"))),
        2 => Ok(1.0),
        _ => {
            let d = d as f64;
            Ok(2.0 * (1.0 - 2.0 / d) / (d - 1.0).ln())
        }
    }
}

/// Outcome of comparing two Dirichlet forms with a common invariant state.
#[derive(Clone, Debug)]
pub struct DirichletComparison {
    pub form: DirichletForm,
    /// Smallest λ with E₁(X, X) ≤ λ E₂(X, X) for all Hermitian X.
    pub lambda: f64,
    /// Largest μ with μ E₂(X, X) ≤ E₁(X, X).
    pub lambda_min: f64,
    pub kernel_dim: usize,
}

impl DirichletComparison {
    /// α(S₂) ≥ α(S₁)/λ.
    pub fn lsi_transfer(&self, alpha1: f64) -> f64 {
        alpha1 / self.lambda
    }
}

/// Gram matrix of a Dirichlet form in the Hilbert-Schmidt orthonormal Hermitian basis.
fn form_matrix(gen: &SemigroupGenerator, form: DirichletForm) -> Result<CMat> {
    let p = gen.powers()?;
    let basis = hermitian_basis(gen.dim());
    let images: Vec<CMat> = basis
        .iter()
        .map(|b| match form {
            DirichletForm::Continuous => gen.channel.apply_adjoint(b),
            DirichletForm::Discrete => p.kms_adjoint(&gen.channel, b),
        })
        .collect();
    let n = basis.len();
    Ok(CMat::from_fn(n, n, |a, b| {
        let base = p.inner(&basis[a], &basis[b]);
        let v = match form {
            DirichletForm::Continuous => {
                base - 0.5 * (p.inner(&basis[a], &images[b]) + p.inner(&images[a], &basis[b]))
            }
            DirichletForm::Discrete => base - p.inner(&images[a], &images[b]),
        };
        c64(v, 0.0)
    }))
}

/// Generalized eigenvalue range of the pair (E₁, E₂) off their common kernel.
pub fn compare_dirichlet(gen1: &SemigroupGenerator, gen2: &SemigroupGenerator, form: DirichletForm) -> Result<DirichletComparison> {
    if gen1.dim() != gen2.dim() {
        return Err(Error::DimensionMismatch("generators act on different spaces".into()));
    }
    let dev = (&gen1.sigma - &gen2.sigma).max_abs();
    if dev > INVARIANCE_TOL {
        return Err(Error::InvalidParameter(format!(
            "generators have different invariant states (deviation {dev:e})"
        )));
    }
    let a1 = form_matrix(gen1, form)?.hermitian_part();
    let a2 = form_matrix(gen2, form)?.hermitian_part();
    let e2 = eigh(&a2)?;
    let e1 = eigh(&a1)?;
    let top = e2.max_eigenvalue().max(e1.max_eigenvalue()).max(1e-300);
    let tol = 1e-9 * top;
    let k1 = e1.eigenvalues.iter().filter(|&&v| v <= tol).count();
    let kernel: Vec<usize> = (0..e2.dim()).filter(|&k| e2.eigenvalues[k] <= tol).collect();
    let inside = kernel.iter().all(|&k| {
        let v = e2.vector(k);
        let av = a1.mul_vec(&v);
        v.iter().zip(&av).map(|(x, y)| (x.conj() * y).re).sum::<f64>().abs() <= tol
    });
    if kernel.len() != k1 || !inside {
        return Err(Error::KernelMismatch(format!(
            "kernel dimensions {k1} and {}",
            kernel.len()
        )));
    }
    let inv_sqrt: Vec<f64> = e2
        .eigenvalues
        .iter()
        .map(|&v| if v <= tol { 0.0 } else { 1.0 / v.sqrt() })
        .collect();
    let w = e2.compose(&inv_sqrt);
    let m = w.matmul(&a1).matmul(&w).hermitian_part();
    let em = eigh(&m)?;
    // The kernel contributes zero eigenvalues; skip that many from the bottom.
    let mut vals = em.eigenvalues.clone();
    vals.sort_by(f64::total_cmp);
    let live = &vals[kernel.len()..];
    Ok(DirichletComparison {
        form,
        lambda: *live.last().unwrap_or(&0.0),
        lambda_min: *live.first().unwrap_or(&0.0),
        kernel_dim: kernel.len(),
    })
}

/// (1 − p)ρ + p Tr(ρ) σ.
pub fn generalized_depolarizing(p: f64, sigma: &CMat) -> Result<QuantumChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, 1]")));
    }
    let d = sigma.rows();
    let id = QuantumChannel::identity(d);
    let rep = build_channel(&ChannelFamily::Replacer {
        dim_in: d,
        tau: sigma.clone(),
    })?;
    mixture(&[1.0 - p, p], &[id, rep])
}

/// Binary relative entropy in nats, accurate for nearby arguments.
fn binary_rel_ent(a: f64, b: f64) -> f64 {
    let term = |u: f64, v: f64| {
        if u == 0.0 {
            0.0
        } else if v == 0.0 {
            f64::INFINITY
        } else {
            -u * ((v - u) / u).ln_1p()
        }
    };
    term(a, b) + term(1.0 - a, 1.0 - b)
}

/// q_y(x) = D(y‖x)/D(x‖y), with value 1 at x = y.
pub fn sdpi_q(y: f64, x: f64) -> f64 {
    if x == y {
        return 1.0;
    }
    binary_rel_ent(y, x) / binary_rel_ent(x, y)
}

/// Optimal relative-entropy contraction of the generalized depolarizing channel.
#[derive(Clone, Debug)]
pub struct SdpiConstant {
    pub s_min: f64,
    /// min over x of q_{s_min}(x).
    pub alpha: f64,
    pub x_min: f64,
    /// (1 − p)^{1 + α}.
    pub constant: f64,
}

const Q_GRID: usize = 2000;
/// Closest approach to x = y on the grid; q is 1 + O(|x − y|) there and its value at y is
/// already a candidate.
const Q_EXCLUSION: f64 = 1e-4;

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// (1 − p)^{1 + α(σ)} with α(σ) = min_{x ∈ [0, 1]} q_{s_min(σ)}(x).
///
/// The minimum is bracketed on a grid and refined by golden-section search.
pub fn depolarizing_sdpi_constant(p: f64, sigma: &CMat) -> Result<SdpiConstant> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, 1]")));
    }
    let ev = eigh(&sigma.hermitian_part())?;
    let s = ev.min_eigenvalue();
    if !(s > RANK_TOL * ev.max_eigenvalue().max(1.0)) {
        return Err(Error::SingularSigma(s));
    }
    let q = |x: f64| sdpi_q(s, x);
    let (mut x_min, mut alpha) = (s, 1.0);
    let mut best_i = None;
    for i in 1..Q_GRID {
        let x = i as f64 / Q_GRID as f64;
        if (x - s).abs() < Q_EXCLUSION {
            continue;
        }
        let v = q(x);
        if v < alpha {
            alpha = v;
            x_min = x;
            best_i = Some(i);
        }
    }
    if let Some(i) = best_i {
        let h = 1.0 / Q_GRID as f64;
        let (mut lo, mut hi) = ((i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
        // Stay on the side of the grid point away from x = s.
        if s > lo && s < hi {
            if x_min > s {
                lo = s + Q_EXCLUSION;
            } else {
                hi = s - Q_EXCLUSION;
            }
        }
        let (x, v) = golden_min(q, lo.max(1e-12), hi.min(1.0 - 1e-12));
        if v < alpha {
            alpha = v;
            x_min = x;
        }
    }
    Ok(SdpiConstant {
        s_min: s,
        alpha,
        x_min,
        constant: (1.0 - p).powf(1.0 + alpha),
    })
}

/// Largest μ with μ·Var_σ(X) ≤ E_S(X, X), so μ ≥ p whenever N_p ⪰ M in the less noisy order.
pub fn variance_comparison(gen: &SemigroupGenerator) -> Result<f64> {
    let sigma = gen.sigma.clone();
    let full = generalized_depolarizing(1.0, &sigma)?;
    let reference = SemigroupGenerator::from_channel(&full)?;
    Ok(compare_dirichlet(gen, &reference, DirichletForm::Continuous)?.lambda_min)
}
