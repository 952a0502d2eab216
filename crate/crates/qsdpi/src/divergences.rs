//! Entropies and distinguishability measures, all in nats.

use crate::error::{Error, Result};
use crate::numerics::funcs::apply_on_eig;
use crate::numerics::{
    eigh, partial_trace, schatten_norm, schatten_norm_hermitian, HermitianEig, ZeroPolicy,
    DEFAULT_CLIP_REL,
};
use crate::{CMat, Eig};

/// Overlap mass on the kernel of σ above which the support condition is considered violated.
pub const SUPPORT_TOL: f64 = 1e-12;
/// Weight of the maximally mixed state mixed into σ in regularized mode.
pub const REGULARIZATION: f64 = 1e-12;

/// How a violated support condition is reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SupportPolicy {
    /// Return +∞ when supp ρ ⊄ supp σ.
    #[default]
    Strict,
    /// Mix σ with a tiny multiple of the maximally mixed state and report the residual.
    Regularized,
}

/// Extended real divergence value with its support diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceValue {
    pub value: f64,
    pub support_ok: bool,
    /// Mass of ρ coupled to the kernel of σ.
    pub residual: f64,
}

impl DivergenceValue {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            support_ok: true,
            residual: 0.0,
        }
    }

    pub fn infinite(residual: f64) -> Self {
        Self {
            value: f64::INFINITY,
            support_ok: false,
            residual,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn thr(e: &Eig) -> f64 {
    DEFAULT_CLIP_REL * e.max_eigenvalue().abs().max(e.min_eigenvalue().abs())
}

/// Shannon entropy of a probability vector (zeros skipped).
pub fn shannon_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

fn entropy_of_eig(e: &Eig) -> f64 {
    let t = thr(e);
    e.eigenvalues
        .iter()
        .filter(|&&x| x > t)
        .map(|&x| -x * x.ln())
        .sum()
}

pub fn von_neumann_entropy(rho: &CMat) -> Result<f64> {
    Ok(entropy_of_eig(&eigh(rho)?))
}

fn check_bipartite(rho: &CMat, dims: [usize; 2]) -> Result<()> {
    if rho.rows() != dims[0] * dims[1] {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} is not {:?}",
            rho.rows(),
            dims
        )));
    }
    Ok(())
}

/// H(A|B) = H(AB) − H(B).
pub fn conditional_entropy(rho_ab: &CMat, dims: [usize; 2]) -> Result<f64> {
    check_bipartite(rho_ab, dims)?;
    let rb = partial_trace(rho_ab, &dims, &[1])?;
    Ok(von_neumann_entropy(rho_ab)? - von_neumann_entropy(&rb)?)
}

/// I(A:B) = H(A) + H(B) − H(AB).
pub fn mutual_information(rho_ab: &CMat, dims: [usize; 2]) -> Result<f64> {
    check_bipartite(rho_ab, dims)?;
    let ra = partial_trace(rho_ab, &dims, &[0])?;
    let rb = partial_trace(rho_ab, &dims, &[1])?;
    Ok(von_neumann_entropy(&ra)? + von_neumann_entropy(&rb)? - von_neumann_entropy(rho_ab)?)
}

/// Σ_u p_u |u⟩⟨u| ⊗ ρ_u with the classical register first.
pub fn cq_state(probs: &[f64], states: &[CMat]) -> CMat {
    let k = probs.len();
    let mut out = CMat::zeros(k * states[0].rows(), k * states[0].rows());
    for (u, (p, s)) in probs.iter().zip(states).enumerate() {
        out += &CMat::basis_projector(k, u).kron(&s.scale_re(*p));
    }
    out
}

/// Holevo quantity H(Σ p ρ) − Σ p H(ρ) = I(U:A) of the cq state.
pub fn holevo_quantity(probs: &[f64], states: &[CMat]) -> Result<f64> {
    let d = states[0].rows();
    let mut avg = CMat::zeros(d, d);
    let mut cond = 0.0;
    for (p, s) in probs.iter().zip(states) {
        avg.axpy(crate::c64(*p, 0.0), s);
        if *p > 0.0 {
            cond += p * von_neumann_entropy(s)?;
        }
    }
    Ok(von_neumann_entropy(&avg)? - cond)
}

/// Eigendecompositions of ρ and σ with the overlap matrix |⟨a_i|b_j⟩|².
#[derive(Clone, Debug)]
pub struct SpectralPair {
    pub eig_rho: Eig,
    pub eig_sigma: Eig,
    /// Row-major, index i·d + j.
    pub overlap: Vec<f64>,
}

impl SpectralPair {
    pub fn new(rho: &CMat, sigma: &CMat) -> Result<Self> {
        if rho.rows() != sigma.rows() {
            return Err(Error::DimensionMismatch(
                "states on different spaces".into(),
            ));
        }
        let eig_rho = eigh(rho)?;
        let eig_sigma = eigh(sigma)?;
        let m = eig_rho
            .eigenvectors
            .adjoint()
            .matmul(&eig_sigma.eigenvectors);
        let overlap = m.data().iter().map(|z| z.norm_sqr()).collect();
        Ok(Self {
            eig_rho,
            eig_sigma,
            overlap,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig_rho.dim()
    }

    /// Largest deviation of row/column sums of the overlap from 1.
    pub fn stochasticity_error(&self) -> f64 {
        let d = self.dim();
        let mut err = 0.0f64;
        for i in 0..d {
            let r: f64 = (0..d).map(|j| self.overlap[i * d + j]).sum();
            let c: f64 = (0..d).map(|j| self.overlap[j * d + i]).sum();
            err = err.max((r - 1.0).abs()).max((c - 1.0).abs());
        }
        err
    }

    /// Mass of ρ coupled to eigenvectors of σ below the clip threshold.
    pub fn kernel_residual(&self) -> f64 {
        let d = self.dim();
        let (ta, tb) = (thr(&self.eig_rho), thr(&self.eig_sigma));
        let mut res = 0.0;
        for i in 0..d {
            let a = self.eig_rho.eigenvalues[i];
            if a <= ta {
                continue;
            }
            for j in 0..d {
                if self.eig_sigma.eigenvalues[j] <= tb {
                    res += a * self.overlap[i * d + j];
                }
            }
        }
        res
    }

    /// Σ_ij ov_ij g(a_i, b_j) over pairs with b_j on the support of σ; eigenvalues
    /// of ρ below the clip threshold enter as exact zeros.
    fn double_sum(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        self.double_sum_cut(thr(&self.eig_sigma), g)
    }

    fn double_sum_cut(&self, tb: f64, g: impl Fn(f64, f64) -> f64) -> f64 {
        let d = self.dim();
        let ta = thr(&self.eig_rho);
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                let b = self.eig_sigma.eigenvalues[j];
                if b <= tb {
                    continue;
                }
                let ov = self.overlap[i * d + j];
                if ov == 0.0 {
                    continue;
                }
                let a = self.eig_rho.eigenvalues[i];
                s += ov * g(if a > ta { a } else { 0.0 }, b);
            }
        }
        s
    }
}

fn regularize(sigma: &CMat) -> CMat {
    let d = sigma.rows();
    let mut s = sigma.scale_re(1.0 - REGULARIZATION);
    s += &CMat::identity(d).scale_re(REGULARIZATION / d as f64);
    s
}

/// Umegaki relative entropy in the Lindblad form Σ|⟨a_i|b_j⟩|²(a_i ln a_i − a_i ln b_j + b_j − a_i).
pub fn relative_entropy(
    rho: &CMat,
    sigma: &CMat,
    policy: SupportPolicy,
) -> Result<DivergenceValue> {
    let pair = SpectralPair::new(rho, sigma)?;
    let residual = pair.kernel_residual();
    if residual > SUPPORT_TOL {
        match policy {
            SupportPolicy::Strict => return Ok(DivergenceValue::infinite(residual)),
            SupportPolicy::Regularized => {
                // The regularized σ is full rank but sits below the clip threshold, so no cut.
                let reg = SpectralPair::new(rho, &regularize(sigma))?;
                let v = lindblad_sum(&reg, 0.0);
                return Ok(DivergenceValue {
                    value: v,
                    support_ok: false,
                    residual,
                });
            }
        }
    }
    Ok(DivergenceValue {
        value: lindblad_sum(&pair, thr(&pair.eig_sigma)),
        support_ok: true,
        residual,
    })
}

/// φ(x) = x ln x − x + 1, with a series near x = 1 where the direct form cancels.
fn phi(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let u = x - 1.0;
    if u.abs() < 0.1 {
        // Σ_{k≥2} (−1)^k u^k / (k(k−1))
        let mut s = 0.0;
        let mut pw = u * u;
        for k in 2..30 {
            let term = pw / (k * (k - 1)) as f64;
            s += if k % 2 == 0 { term } else { -term };
            pw *= u;
        }
        return s;
    }
    x * x.ln() - x + 1.0
}

/// Σ ov_ij b_j φ(a_i/b_j) over σ eigenvalues above `sigma_cut`; every term is non-negative,
/// so small divergences keep their relative accuracy.
fn lindblad_sum(pair: &SpectralPair, sigma_cut: f64) -> f64 {
    let d = pair.dim();
    let mut s = 0.0;
    for i in 0..d {
        let a = pair.eig_rho.eigenvalues[i].max(0.0);
        for j in 0..d {
            let b = pair.eig_sigma.eigenvalues[j];
            let ov = pair.overlap[i * d + j];
            if b <= sigma_cut || b <= 0.0 || ov == 0.0 {
                continue;
            }
            s += ov * b * phi(a / b);
        }
    }
    s
}

/// Relative entropy as a plain number (strict support policy).
pub fn rel_ent(rho: &CMat, sigma: &CMat) -> Result<f64> {
    Ok(relative_entropy(rho, sigma, SupportPolicy::Strict)?.value)
}

fn power_on_support(e: &HermitianEig<f64>, s: f64) -> Result<CMat> {
    apply_on_eig(e, |x| x.powf(s), ZeroPolicy::Exclude, DEFAULT_CLIP_REL)
}

/// Sandwiched Rényi divergence D_p = p/(p−1) ln ‖σ^{−1/2}ρσ^{−1/2}‖_{p,σ}.
pub fn sandwiched_renyi(rho: &CMat, sigma: &CMat, p: f64) -> Result<DivergenceValue> {
    if !(p > 0.0) || p == 1.0 || !p.is_finite() {
        return Err(Error::OutOfRange(format!(
            "Renyi order p = {p} must lie in (0,1)∪(1,∞)"
        )));
    }
    let pair = SpectralPair::new(rho, sigma)?;
    let residual = pair.kernel_residual();
    if p > 1.0 && residual > SUPPORT_TOL {
        return Err(Error::SupportViolation(residual));
    }
    // σ^{(1−p)/2p} ρ σ^{(1−p)/2p}
    let sp = power_on_support(&pair.eig_sigma, (1.0 - p) / (2.0 * p))?;
    let y = sp.matmul(rho).matmul(&sp).hermitian_part();
    let e = eigh(&y)?;
    // Below p = 1 the rounding floor of a rank-deficient y would add about t^p.
    let t = thr(&e);
    let q: f64 = e.eigenvalues.iter().filter(|&&x| x > t).map(|&x| x.powf(p)).sum();
    if q <= 0.0 {
        return Ok(DivergenceValue::infinite(residual));
    }
    let v = q.ln() / (p - 1.0);
    Ok(DivergenceValue {
        value: v,
        support_ok: residual <= SUPPORT_TOL,
        residual,
    })
}

/// ‖X‖_{p,σ} = (tr |σ^{1/2p} X σ^{1/2p}|^p)^{1/p}.
pub fn weighted_norm(x: &CMat, p: f64, sigma: &CMat) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::OutOfRange(format!(
            "weighted norm order p = {p} must be positive"
        )));
    }
    let e = eigh(sigma)?;
    if e.min_eigenvalue() <= thr(&e) {
        return Err(Error::SingularSigma(e.min_eigenvalue()));
    }
    let s = power_on_support(&e, 1.0 / (2.0 * p))?;
    let y = s.matmul(x).matmul(&s);
    if x.is_hermitian(1e-12 * x.max_abs().max(1e-300)) {
        return schatten_norm_hermitian(&y.hermitian_part(), p);
    }
    schatten_norm(&y, p)
}

/// Γ_σ^s(X) = σ^{s/2} X σ^{s/2}, with negative powers taken on the support.
pub fn gamma_power(sigma: &CMat, s: f64, x: &CMat) -> Result<CMat> {
    let e = eigh(sigma)?;
    let half = power_on_support(&e, s / 2.0)?;
    Ok(half.matmul(x).matmul(&half))
}

/// Convex generating functions with f(1) = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConvexFunction {
    /// x ln x
    XLogX,
    /// (x − 1)²
    ChiSquare,
    /// (x^s − 1)/(s − 1), s > 0, s ≠ 1
    Hellinger(f64),
}

impl ConvexFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::XLogX => {
                if x <= 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
            Self::ChiSquare => (x - 1.0) * (x - 1.0),
            Self::Hellinger(s) => (x.max(0.0).powf(s) - 1.0) / (s - 1.0),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Self::XLogX => x.ln() + 1.0,
            Self::ChiSquare => 2.0 * (x - 1.0),
            Self::Hellinger(s) => s * x.powf(s - 1.0) / (s - 1.0),
        }
    }

    /// lim_{x→∞} f(x)/x, governing terms where σ vanishes but ρ does not.
    pub fn slope_at_infinity(&self) -> f64 {
        match *self {
            Self::XLogX | Self::ChiSquare => f64::INFINITY,
            Self::Hellinger(s) => {
                if s < 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn is_operator_convex(&self) -> bool {
        match *self {
            Self::XLogX | Self::ChiSquare => true,
            Self::Hellinger(s) => s > 0.0 && s <= 2.0,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Self::XLogX => "x ln x".into(),
            Self::ChiSquare => "(x-1)^2".into(),
            Self::Hellinger(s) => format!("(x^{s}-1)/({s}-1)"),
        }
    }
}

/// Which quantum f-divergence to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FVariant {
    /// Tr σ^{1/2} f(Δ_{ρ,σ}) σ^{1/2}, evaluated as Σ|⟨a_i|b_j⟩|² b_j f(a_i/b_j).
    Standard,
    /// Tr σ f(σ^{−1/2}ρσ^{−1/2}).
    Maximal,
}

pub fn f_divergence(
    rho: &CMat,
    sigma: &CMat,
    f: ConvexFunction,
    variant: FVariant,
) -> Result<DivergenceValue> {
    let pair = SpectralPair::new(rho, sigma)?;
    let residual = pair.kernel_residual();
    if residual > SUPPORT_TOL {
        let tail = f.slope_at_infinity();
        if tail.is_infinite() {
            return Ok(DivergenceValue::infinite(residual));
        }
        if variant == FVariant::Maximal {
            return Err(Error::SupportViolation(residual));
        }
    }
    let value = match variant {
        FVariant::Standard => {
            let d = pair.dim();
            let tb = thr(&pair.eig_sigma);
            let mut s = pair.double_sum(|a, b| b * f.eval(a / b));
            if residual > SUPPORT_TOL {
                for i in 0..d {
                    for j in 0..d {
                        if pair.eig_sigma.eigenvalues[j] <= tb {
                            s += pair.overlap[i * d + j]
                                * pair.eig_rho.eigenvalues[i].max(0.0)
                                * f.slope_at_infinity();
                        }
                    }
                }
            }
            s
        }
        FVariant::Maximal => {
            let isq = power_on_support(&pair.eig_sigma, -0.5)?;
            let m = isq.matmul(rho).matmul(&isq).hermitian_part();
            let em = eigh(&m)?;
            let tm = thr(&em);
            let fm = em.compose(
                &em.eigenvalues
                    .iter()
                    .map(|&x| f.eval(if x > tm { x } else { 0.0 }))
                    .collect::<Vec<_>>(),
            );
            sigma.trace_product(&fm).re
        }
    };
    Ok(DivergenceValue {
        value,
        support_ok: residual <= SUPPORT_TOL,
        residual,
    })
}

/// Kernel k_α(w) = ½(w^{−α} + w^{α−1}), α ∈ [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelFunction {
    pub alpha: f64,
}

impl KernelFunction {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange(format!(
                "kernel alpha = {alpha} outside [0, 1]"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn eval(&self, w: f64) -> f64 {
        0.5 * (w.powf(-self.alpha) + w.powf(self.alpha - 1.0))
    }
}

/// χ²_k(ρ,σ) = Σ_ij |(ρ−σ)_ij|² k(s_i/s_j)/s_j in the eigenbasis of σ.
pub fn chi2_divergence(rho: &CMat, sigma: &CMat, k: KernelFunction) -> Result<DivergenceValue> {
    if rho.rows() != sigma.rows() {
        return Err(Error::DimensionMismatch(
            "states on different spaces".into(),
        ));
    }
    let e = eigh(sigma)?;
    let t = thr(&e);
    let v = &e.eigenvectors;
    let diff = v.adjoint().matmul(&(rho - sigma)).matmul(v);
    let d = rho.rows();
    let mut total = 0.0;
    let mut residual = 0.0;
    for i in 0..d {
        for j in 0..d {
            let (si, sj) = (e.eigenvalues[i], e.eigenvalues[j]);
            let m = diff[(i, j)].norm_sqr();
            if si <= t || sj <= t {
                residual += m;
                continue;
            }
            total += m * k.eval(si / sj) / sj;
        }
    }
    if residual.sqrt() > 1e-9 {
        return Ok(DivergenceValue::infinite(residual));
    }
    Ok(DivergenceValue {
        value: total,
        support_ok: true,
        residual,
    })
}

/// Divergence selector used by the ratio estimators and order checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Divergence {
    Relative,
    SandwichedRenyi(f64),
    F(ConvexFunction, FVariant),
    Chi2(KernelFunction),
}

impl Default for Divergence {
    fn default() -> Self {
        Self::Relative
    }
}

impl Divergence {
    pub fn eval(&self, rho: &CMat, sigma: &CMat) -> Result<DivergenceValue> {
        match *self {
            Self::Relative => relative_entropy(rho, sigma, SupportPolicy::Strict),
            Self::SandwichedRenyi(p) => match sandwiched_renyi(rho, sigma, p) {
                Err(Error::SupportViolation(r)) => Ok(DivergenceValue::infinite(r)),
                other => other,
            },
            Self::F(f, v) => match f_divergence(rho, sigma, f, v) {
                Err(Error::SupportViolation(r)) => Ok(DivergenceValue::infinite(r)),
                other => other,
            },
            Self::Chi2(k) => chi2_divergence(rho, sigma, k),
        }
    }

    /// Value as a plain number, +∞ on a support violation.
    pub fn value(&self, rho: &CMat, sigma: &CMat) -> Result<f64> {
        Ok(self.eval(rho, sigma)?.value)
    }

    pub fn name(&self) -> String {
        match self {
            Self::Relative => "relative_entropy".into(),
            Self::SandwichedRenyi(p) => format!("sandwiched_renyi({p})"),
            Self::F(f, FVariant::Standard) => format!("f_divergence({})", f.name()),
            Self::F(f, FVariant::Maximal) => format!("maximal_f_divergence({})", f.name()),
            Self::Chi2(k) => format!("chi2(alpha={})", k.alpha),
        }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::OutOfRange(format!("epsilon = {eps} outside [0, 1]")));
    }
    Ok(())
}

/// Binary entropy h(x) in nats.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
}

/// ε̃ = 2ε ln|B| + (2+ε) h(ε/(2+ε)).
pub fn eps_tilde(eps: f64, dim_b: usize) -> Result<f64> {
    check_eps(eps)?;
    Ok(2.0 * eps * (dim_b as f64).ln() + (2.0 + eps) * binary_entropy(eps / (2.0 + eps)))
}

/// ε̂ = ½ε ln(|B|−1) + ε ln|B| + (1+ε/2) h(ε/(2+ε)) + h(ε/2).
pub fn eps_hat(eps: f64, dim_b: usize) -> Result<f64> {
    check_eps(eps)?;
    if dim_b < 2 {
        return Err(Error::OutOfRange(format!(
            "output dimension {dim_b} must be at least 2"
        )));
    }
    let b = dim_b as f64;
    Ok(0.5 * eps * (b - 1.0).ln()
        + eps * b.ln()
        + (1.0 + eps / 2.0) * binary_entropy(eps / (2.0 + eps))
        + binary_entropy(eps / 2.0))
}

/// ε ln(d−1) + h(ε).
pub fn audenaert_bound(eps: f64, dim: usize) -> Result<f64> {
    check_eps(eps)?;
    if dim < 2 {
        return Err(Error::OutOfRange(format!(
            "dimension {dim} must be at least 2"
        )));
    }
    Ok(eps * (dim as f64 - 1.0).ln() + binary_entropy(eps))
}

/// 2ε ln|A| + (1+ε) h(ε/(1+ε)).
pub fn afw_bound(eps: f64, dim_a: usize) -> Result<f64> {
    check_eps(eps)?;
    Ok(2.0 * eps * (dim_a as f64).ln() + (1.0 + eps) * binary_entropy(eps / (1.0 + eps)))
}

/// Conditional min-entropy H_min(A|B) in nats, solved as an SDP.
///
/// The defining program is posed with 2^λ; the optimum min Tr σ̃ s.t. I⊗σ̃ ⪰ ρ
/// equals 2^{−H_min} in bits, so the nats value is −ln of it.
pub fn h_min(rho_ab: &CMat, dims: [usize; 2]) -> Result<f64> {
    check_bipartite(rho_ab, dims)?;
    let t = crate::convex_opt::min_entropy_sdp(rho_ab, dims)?;
    let bits = -t.log2();
    Ok(bits * std::f64::consts::LN_2)
}
