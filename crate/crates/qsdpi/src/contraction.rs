//! Contraction coefficients and strong data-processing constants.
//!
//! Numerical estimates are lower bounds: every reported value is the ratio at an explicit
//! pair of states. Upper bounds come only from closed forms and the bound calculus in
//! [`eta_bounds`].

use crate::channels::{build_channel, compose, tensor, ChannelFamily, QuantumChannel};
use crate::convex_opt::hermitian_basis;
use crate::divergences::{binary_entropy, weighted_norm, Divergence};
use crate::error::{Error, Result};
use crate::numerics::{
    clip_threshold, eigh, inverse, operator_norm, powm_support,
    spectral_radius, superop_from_kraus, DEFAULT_CLIP_REL,
};
use crate::optim::{multi_start, random_start, LocalOptions, StateParameterization};
use crate::{c64, CMat};

/// The complete contraction coefficient (reference system allowed) is always 1.
pub const COMPLETE_ETA: f64 = 1.0;

/// Pairs closer than this in Frobenius norm are excluded from the ratio search.
pub const MIN_SEPARATION: f64 = 1e-6;

/// Denominators below this are dominated by eigenvalue rounding and are skipped.
pub const MIN_DIVERGENCE: f64 = 1e-7;

/// Relative size of the perturbation used by the local (ρ → σ) probe.
const LOCAL_STEP: f64 = 5e-3;

#[derive(Clone, Debug)]
pub struct EtaOptions {
    pub restarts: usize,
    pub seed: u64,
    /// Relative tolerance of the Nelder-Mead polish.
    pub tol: f64,
    pub local: LocalOptions,
}

impl Default for EtaOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            seed: 0,
            tol: 1e-12,
            local: LocalOptions::default(),
        }
    }
}

/// Best ratio found by [`estimate_eta`] or [`domination_factor`].
#[derive(Clone, Debug)]
pub struct EtaEstimate {
    pub divergence: Divergence,
    /// Ratio at the witness; a lower bound on the supremum.
    pub value_lower: f64,
    /// (ρ, σ) attaining `value_lower`.
    pub witness: (CMat, CMat),
    pub restarts: usize,
    pub evaluations: usize,
    /// Whether the winning local search met its step tolerance.
    pub converged: bool,
    /// Best value among the local-limit probes alone.
    pub local_probe: f64,
}

struct RatioProblem<'a> {
    num: &'a QuantumChannel,
    den: Option<&'a QuantumChannel>,
    div: Divergence,
}

impl RatioProblem<'_> {
    /// NaN marks pairs where the ratio is undefined.
    fn ratio(&self, rho: &CMat, sigma: &CMat) -> f64 {
        if (rho - sigma).norm_fro() < MIN_SEPARATION {
            return f64::NAN;
        }
        let top = match self.div.value(&self.num.apply(rho), &self.num.apply(sigma)) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        let bottom = match self.den {
            Some(m) => self.div.value(&m.apply(rho), &m.apply(sigma)),
            None => self.div.value(rho, sigma),
        };
        let bottom = match bottom {
            Ok(v) if v.is_finite() => v,
            _ => return f64::NAN,
        };
        if self.den.is_none() && !top.is_finite() {
            // The relative clip flagged a support violation on N(σ) but not on σ.
            return f64::NAN;
        }
        if bottom < MIN_DIVERGENCE {
            // A vanishing denominator under a clearly positive numerator is a real separation
            // between two channels. For a single channel it can only be rounding near the
            // boundary, since data processing caps the ratio at 1.
            return if self.den.is_some() && bottom < 1e-12 && top > 1e-6 {
                f64::INFINITY
            } else {
                f64::NAN
            };
        }
        top / bottom
    }
}

/// ρ = σ + t·X̂ with X̂ the traceless part of A + A† scaled to unit operator norm and
/// t a fixed fraction of λ_min(σ).
fn local_pair(sigma: &CMat, coords: &[f64]) -> Option<CMat> {
    let d = sigma.rows();
    let a = StateParameterization::from_coords(d, coords).factor;
    let mut x = &a + &a.adjoint();
    let tr = x.trace().re / d as f64;
    x = &x - &CMat::identity(d).scale_re(tr);
    let norm = operator_norm(&x).ok()?;
    if !(norm > 1e-12) {
        return None;
    }
    let lmin = eigh(sigma).ok()?.min_eigenvalue();
    if !(lmin > 1e-9) {
        return None;
    }
    Some(sigma + &x.scale_re(LOCAL_STEP * lmin / norm))
}

/// Coordinates of a matrix A with A + A† = h.
fn direction_coords(h: &CMat) -> Vec<f64> {
    let d = h.rows();
    let mut c = vec![0.0; 2 * d * d];
    for (k, z) in h.data().iter().enumerate() {
        c[k] = 0.5 * z.re;
        c[d * d + k] = 0.5 * z.im;
    }
    c
}

fn state_coords(rho: &CMat) -> Vec<f64> {
    StateParameterization::from_state(rho)
        .map(|p| p.coords)
        .unwrap_or_else(|_| vec![1.0; 2 * rho.rows() * rho.rows()])
}

/// Coordinates of the rank-one factor |ψ⟩⟨0|, which decodes exactly to |ψ⟩⟨ψ|.
fn pure_coords(psi: &[f64]) -> Vec<f64> {
    let d = psi.len();
    let mut c = vec![0.0; 2 * d * d];
    for (r, &v) in psi.iter().enumerate() {
        c[r * d] = v;
    }
    c
}

fn traceless_directions(d: usize) -> Vec<CMat> {
    hermitian_basis(d)
        .into_iter()
        .map(|b| {
            let tr = b.trace().re / d as f64;
            &b - &CMat::identity(d).scale_re(tr)
        })
        .filter(|b| b.norm_fro() > 1e-9)
        .collect()
}

fn basis_vec(d: usize, i: usize) -> Vec<f64> {
    (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect()
}

fn check_sigma(sigma: &CMat, d: usize) -> Result<()> {
    if sigma.rows() != d || !sigma.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "reference state is not {d}-dimensional"
        )));
    }
    let e = eigh(&sigma.hermitian_part())?;
    let t = clip_threshold(&e.eigenvalues, DEFAULT_CLIP_REL);
    if e.min_eigenvalue() <= t {
        return Err(Error::DegenerateInput(format!(
            "fixed reference state has smallest eigenvalue {:e}; the ratio is undefined for most inputs",
            e.min_eigenvalue()
        )));
    }
    Ok(())
}

fn ratio_search(prob: &RatioProblem, sigma: Option<&CMat>, opts: &EtaOptions) -> Result<EtaEstimate> {
    let d = prob.num.dim_in();
    if let Some(s) = sigma {
        check_sigma(s, d)?;
    }
    let nc = StateParameterization::n_coords(d);
    let mixed = CMat::identity(d).scale_re(1.0 / d as f64);

    // Global search over ρ (and σ when free).
    let global = |x: &[f64]| -> f64 {
        let rho = StateParameterization::decode(d, &x[..nc]);
        match sigma {
            Some(s) => prob.ratio(&rho, s),
            None => prob.ratio(&rho, &StateParameterization::decode(d, &x[nc..])),
        }
    };
    // Local probe over the direction X (and σ when free).
    let local = |x: &[f64]| -> f64 {
        let (s, dir) = match sigma {
            Some(s) => (s.clone(), x),
            None => (StateParameterization::decode(d, &x[..nc]), &x[nc..]),
        };
        match local_pair(&s, dir) {
            Some(rho) => prob.ratio(&rho, &s),
            None => f64::NAN,
        }
    };

    let sigma_part = |v: Vec<f64>| -> Vec<f64> {
        if sigma.is_some() {
            v
        } else {
            let mut out = v;
            out.extend(state_coords(&mixed));
            out
        }
    };
    let mut global_starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        global_starts.push(sigma_part(pure_coords(&basis_vec(d, i))));
    }
    let plus: Vec<f64> = vec![1.0 / (d as f64).sqrt(); d];
    global_starts.push(sigma_part(pure_coords(&plus)));
    if sigma.is_none() {
        // Diagonal pair and a pure reference.
        let mut p = vec![0.1 / (d - 1).max(1) as f64; d];
        p[0] = 0.9;
        let mut q = p.clone();
        q.reverse();
        let mut x = state_coords(&CMat::diag(&p));
        x.extend(state_coords(&CMat::diag(&q)));
        global_starts.push(x);
        let mut x = state_coords(&mixed);
        x.extend(pure_coords(&basis_vec(d, 0)));
        global_starts.push(x);
    }
    let mut local_starts: Vec<Vec<f64>> = Vec::new();
    for h in traceless_directions(d) {
        let mut x = match sigma {
            Some(_) => Vec::new(),
            None => state_coords(&mixed),
        };
        x.extend(direction_coords(&h));
        local_starts.push(x);
    }
    let g_len = if sigma.is_some() { nc } else { 2 * nc };
    let l_len = g_len;
    for r in 0..opts.restarts {
        if r % 2 == 0 {
            global_starts.push(random_start(g_len, opts.seed, r as u64));
        } else {
            local_starts.push(random_start(l_len, opts.seed, r as u64));
        }
    }

    let mut lopts = opts.local;
    lopts.ftol = opts.tol;
    let g = multi_start(&global, &global_starts, &lopts);
    let l = multi_start(&local, &local_starts, &lopts);
    let evaluations = g.as_ref().map_or(0, |x| x.2) + l.as_ref().map_or(0, |x| x.2);
    let local_probe = l.as_ref().map_or(f64::NEG_INFINITY, |x| x.1.value);

    let decode_global = |x: &[f64]| -> (CMat, CMat) {
        let rho = StateParameterization::decode(d, &x[..nc]);
        let s = match sigma {
            Some(s) => s.clone(),
            None => StateParameterization::decode(d, &x[nc..]),
        };
        (rho, s)
    };
    let decode_local = |x: &[f64]| -> Option<(CMat, CMat)> {
        let (s, dir) = match sigma {
            Some(s) => (s.clone(), x),
            None => (StateParameterization::decode(d, &x[..nc]), &x[nc..]),
        };
        local_pair(&s, dir).map(|rho| (rho, s))
    };
    let mut best: Option<((CMat, CMat), bool)> = None;
    let mut best_val = f64::NEG_INFINITY;
    if let Some((_, o, _)) = &g {
        if o.value > best_val {
            best_val = o.value;
            best = Some((decode_global(&o.x), o.converged));
        }
    }
    if let Some((_, o, _)) = &l {
        if o.value > best_val {
            if let Some(pair) = decode_local(&o.x) {
                best_val = o.value;
                best = Some((pair, o.converged));
            }
        }
    }
    let Some(((rho, s), converged)) = best else {
        return Err(Error::OptimizerStall(
            "no pair with a well-defined ratio was found".into(),
        ));
    };
    if !(best_val > f64::NEG_INFINITY) {
        return Err(Error::OptimizerStall(
            "no pair with a well-defined ratio was found".into(),
        ));
    }
    let value_lower = prob.ratio(&rho, &s);
    Ok(EtaEstimate {
        divergence: prob.div,
        value_lower,
        witness: (rho, s),
        restarts: opts.restarts,
        evaluations,
        converged,
        local_probe,
    })
}

/// Multi-start lower bound on η(N, σ) = sup D(N(ρ)‖N(σ))/D(ρ‖σ); σ is optimised too when `None`.
pub fn estimate_eta(
    n: &QuantumChannel,
    div: Divergence,
    sigma: Option<&CMat>,
    opts: &EtaOptions,
) -> Result<EtaEstimate> {
    ratio_search(
        &RatioProblem {
            num: n,
            den: None,
            div,
        },
        sigma,
        opts,
    )
}

/// Best found D(N(ρ)‖N(σ))/D(M(ρ)‖M(σ)); a value above 1 rules out M being less noisy than N.
pub fn domination_factor(
    m: &QuantumChannel,
    n: &QuantumChannel,
    div: Divergence,
    sigma: Option<&CMat>,
    opts: &EtaOptions,
) -> Result<EtaEstimate> {
    if m.dim_in() != n.dim_in() {
        return Err(Error::DimensionMismatch(
            "channels have different inputs".into(),
        ));
    }
    ratio_search(
        &RatioProblem {
            num: n,
            den: Some(m),
            div,
        },
        sigma,
        opts,
    )
}

/// Recomputes the ratio at a witness pair.
pub fn ratio_at(
    num: &QuantumChannel,
    den: Option<&QuantumChannel>,
    div: Divergence,
    rho: &CMat,
    sigma: &CMat,
) -> f64 {
    RatioProblem { num, den, div }.ratio(rho, sigma)
}

fn unital_qubit_eta(ch: &QuantumChannel) -> Result<Option<f64>> {
    let (t, m) = crate::channels::pauli_transfer(ch)?;
    if t.iter().any(|x| x.abs() > 1e-12) {
        return Ok(None);
    }
    let tm = CMat::from_fn(3, 3, |r, c| c64(m[r][c], 0.0));
    let s = operator_norm(&tm)?;
    Ok(Some(s * s))
}

/// Exact η for the relative entropy, where one is known.
pub fn closed_form_eta(family: &ChannelFamily) -> Result<f64> {
    match family {
        ChannelFamily::Identity { .. } | ChannelFamily::Isometry { .. } => Ok(1.0),
        ChannelFamily::Replacer { .. } => Ok(0.0),
        ChannelFamily::Erasure { eps, .. } | ChannelFamily::Dephrasure { eps, .. } => {
            build_channel(family)?;
            Ok(1.0 - eps)
        }
        ChannelFamily::Depolarizing { dim: 2, .. }
        | ChannelFamily::DephasingZ { .. }
        | ChannelFamily::BitflipX { .. }
        | ChannelFamily::WeylAdditive { n: 2, .. } => unital_qubit_eta(&build_channel(family)?)?
            .ok_or_else(|| Error::NoClosedForm(family.name().into())),
        _ => Err(Error::NoClosedForm(family.name().into())),
    }
}

/// Exact η of the n-fold tensor power, where one is known.
pub fn closed_form_eta_power(family: &ChannelFamily, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("tensor power must be positive".into()));
    }
    if n == 1 {
        return closed_form_eta(family);
    }
    match family {
        ChannelFamily::Erasure { eps, .. } => {
            build_channel(family)?;
            Ok(1.0 - eps.powi(n as i32))
        }
        ChannelFamily::Identity { .. }
        | ChannelFamily::Isometry { .. }
        | ChannelFamily::Replacer { .. } => closed_form_eta(family),
        _ => Err(Error::NoClosedForm(format!("{} tensor power", family.name()))),
    }
}

/// Channel expression for the bound calculus.
#[derive(Clone, Debug)]
pub enum ChannelExpr {
    /// A family with an optional externally supplied coefficient.
    Leaf {
        family: ChannelFamily,
        eta: Option<f64>,
    },
    /// Outer ∘ inner.
    Compose(Box<ChannelExpr>, Box<ChannelExpr>),
    Tensor(Box<ChannelExpr>, Box<ChannelExpr>),
    TensorPower(Box<ChannelExpr>, usize),
    /// ρ ↦ Σ λ_i N_i(ρ) ⊗ |i⟩⟨i|.
    Flag {
        weights: Vec<f64>,
        parts: Vec<ChannelExpr>,
    },
}

impl ChannelExpr {
    pub fn leaf(family: ChannelFamily) -> Self {
        Self::Leaf { family, eta: None }
    }

    pub fn leaf_with(family: ChannelFamily, eta: f64) -> Self {
        Self::Leaf {
            family,
            eta: Some(eta),
        }
    }

    pub fn compose(outer: Self, inner: Self) -> Self {
        Self::Compose(Box::new(outer), Box::new(inner))
    }

    pub fn tensor(a: Self, b: Self) -> Self {
        Self::Tensor(Box::new(a), Box::new(b))
    }

    pub fn power(a: Self, n: usize) -> Self {
        Self::TensorPower(Box::new(a), n)
    }

    /// The channel the expression denotes.
    pub fn build(&self) -> Result<QuantumChannel> {
        match self {
            Self::Leaf { family, .. } => build_channel(family),
            Self::Compose(a, b) => compose(&a.build()?, &b.build()?),
            Self::Tensor(a, b) => tensor(&a.build()?, &b.build()?),
            Self::TensorPower(a, n) => crate::channels::tensor_power(&a.build()?, *n),
            Self::Flag { weights, parts } => flagged_channel(weights, &parts
                .iter()
                .map(|p| p.build())
                .collect::<Result<Vec<_>>>()?),
        }
    }

    fn family(&self) -> Option<&ChannelFamily> {
        match self {
            Self::Leaf { family, .. } => Some(family),
            _ => None,
        }
    }
}

/// ρ ↦ Σ λ_i N_i(ρ) ⊗ |i⟩⟨i| for channels with common input and output.
pub fn flagged_channel(weights: &[f64], parts: &[QuantumChannel]) -> Result<QuantumChannel> {
    if weights.len() != parts.len() || parts.is_empty() {
        return Err(Error::InvalidParameter(
            "flag weights and channels differ in number".into(),
        ));
    }
    let s: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (s - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(
            "flag weights must be a probability vector".into(),
        ));
    }
    let (din, dout) = (parts[0].dim_in(), parts[0].dim_out());
    if parts.iter().any(|p| p.dim_in() != din || p.dim_out() != dout) {
        return Err(Error::DimensionMismatch(
            "flagged channels act between different spaces".into(),
        ));
    }
    let m = parts.len();
    let mut kraus = Vec::new();
    for (i, (w, p)) in weights.iter().zip(parts).enumerate() {
        let flag = CMat::from_fn(m, 1, |r, _| c64(if r == i { 1.0 } else { 0.0 }, 0.0));
        for k in p.kraus() {
            kraus.push(k.kron(&flag).scale_re(w.sqrt()));
        }
    }
    QuantumChannel::from_kraus(kraus)
}

/// Interval containing η.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaBounds {
    pub lower: f64,
    pub upper: f64,
}

/// Ratio at ρ = |00⟩⟨00| against σ = ½(|00⟩⟨00| + |11⟩⟨11|), a valid lower bound for a
/// product channel with both inputs at least two-dimensional.
fn product_witness(a: &QuantumChannel, b: &QuantumChannel) -> Option<f64> {
    let (da, db) = (a.dim_in(), b.dim_in());
    if da < 2 || db < 2 {
        return None;
    }
    let t = tensor(a, b).ok()?;
    let d = da * db;
    let rho = CMat::basis_projector(d, 0);
    let sigma = &rho.scale_re(0.5) + &CMat::basis_projector(d, db + 1).scale_re(0.5);
    let v = ratio_at(&t, None, Divergence::Relative, &rho, &sigma);
    v.is_finite().then_some(v)
}

fn erasure_eps(e: &ChannelExpr) -> Option<f64> {
    match e.family() {
        Some(ChannelFamily::Erasure { eps, .. }) => Some(*eps),
        _ => None,
    }
}

fn is_replacer(e: &ChannelExpr) -> bool {
    matches!(e.family(), Some(ChannelFamily::Replacer { .. }))
}

fn is_unitary_leaf(e: &ChannelExpr) -> bool {
    match e.family() {
        Some(ChannelFamily::Identity { .. }) => true,
        Some(ChannelFamily::Isometry { v }) => v.is_square(),
        _ => false,
    }
}

fn is_isometry_leaf(e: &ChannelExpr) -> bool {
    matches!(
        e.family(),
        Some(ChannelFamily::Identity { .. } | ChannelFamily::Isometry { .. })
    )
}

/// Recursive interval for η of a composite channel.
pub fn eta_bounds(expr: &ChannelExpr) -> Result<EtaBounds> {
    let b = match expr {
        ChannelExpr::Leaf { family, eta } => {
            let v = match eta {
                Some(v) => *v,
                None => closed_form_eta(family).map_err(|e| match e {
                    Error::NoClosedForm(s) => Error::MissingLeafCoefficient(s),
                    other => other,
                })?,
            };
            EtaBounds { lower: v, upper: v }
        }
        ChannelExpr::Compose(outer, inner) => {
            let (o, i) = (eta_bounds(outer)?, eta_bounds(inner)?);
            let lower = if is_isometry_leaf(outer) {
                i.lower
            } else if is_unitary_leaf(inner) {
                o.lower
            } else {
                0.0
            };
            EtaBounds {
                lower,
                upper: o.upper * i.upper,
            }
        }
        ChannelExpr::Tensor(a, b) => {
            let (x, y) = (eta_bounds(a)?, eta_bounds(b)?);
            let mut lower = x.lower.max(y.lower);
            let mut upper: f64 = 1.0;
            if is_replacer(a) {
                upper = upper.min(y.upper);
            }
            if is_replacer(b) {
                upper = upper.min(x.upper);
            }
            if let Some(e) = erasure_eps(a) {
                upper = upper.min((1.0 - e) + e * y.upper);
            }
            if let Some(e) = erasure_eps(b) {
                upper = upper.min((1.0 - e) + e * x.upper);
            }
            if let (Ok(ca), Ok(cb)) = (a.build(), b.build()) {
                if let Some(w) = product_witness(&ca, &cb) {
                    lower = lower.max(w);
                }
            }
            EtaBounds { lower, upper }
        }
        ChannelExpr::TensorPower(a, n) => {
            if let Some(f) = a.family() {
                if let Ok(v) = closed_form_eta_power(f, *n) {
                    return Ok(EtaBounds { lower: v, upper: v });
                }
            }
            if *n == 0 {
                return Err(Error::InvalidParameter("tensor power must be positive".into()));
            }
            let mut e = (**a).clone();
            for _ in 1..*n {
                e = ChannelExpr::tensor(e, (**a).clone());
            }
            eta_bounds(&e)?
        }
        ChannelExpr::Flag { weights, parts } => {
            if weights.len() != parts.len() {
                return Err(Error::InvalidParameter(
                    "flag weights and channels differ in number".into(),
                ));
            }
            let mut lower: f64 = 0.0;
            let mut upper = 0.0;
            for (w, p) in weights.iter().zip(parts) {
                let b = eta_bounds(p)?;
                lower = lower.max(w * b.lower);
                upper += w * b.upper;
            }
            EtaBounds { lower, upper }
        }
    };
    // The witness bound is a true ratio; trim rounding noise above the upper bound.
    let lower = if b.lower > b.upper && b.lower - b.upper < 1e-9 {
        b.upper
    } else {
        b.lower
    };
    Ok(EtaBounds { lower, ..b })
}

/// Lower and upper bounds on η(E_{1/2} ⊗ D_p) for the qubit depolarizing channel
/// (1−p)ρ + p I/2.
pub fn erasure_depolarizing_bounds(p: f64) -> Result<EtaBounds> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("p = {p} outside [0, 1]")));
    }
    let ln2 = std::f64::consts::LN_2;
    Ok(EtaBounds {
        lower: (ln2 - 0.5 * binary_entropy(p / 2.0)) / ln2,
        upper: 0.5 * (1.0 + (1.0 - p) * (1.0 - p)),
    })
}

fn full_rank_eig(sigma: &CMat) -> Result<crate::Eig> {
    let e = eigh(&sigma.hermitian_part())?;
    let t = clip_threshold(&e.eigenvalues, DEFAULT_CLIP_REL);
    if e.min_eigenvalue() <= t {
        return Err(Error::SingularReference(e.min_eigenvalue()));
    }
    Ok(e)
}

/// Petz recovery map Γ_σ ∘ M* ∘ Γ⁻¹_{M(σ)}, completed to a channel on the kernel of M(σ)
/// by preparing σ there.
pub fn petz_recovery(m: &QuantumChannel, sigma: &CMat) -> Result<QuantumChannel> {
    if sigma.rows() != m.dim_in() {
        return Err(Error::DimensionMismatch(
            "reference state does not match the channel input".into(),
        ));
    }
    let es = full_rank_eig(sigma)?;
    let s_half = es.compose(&es.eigenvalues.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    let out = m.apply(sigma).hermitian_part();
    let eo = eigh(&out)?;
    let t = clip_threshold(&eo.eigenvalues, DEFAULT_CLIP_REL);
    let inv_half = powm_support(&out, -0.5)?;
    let mut kraus: Vec<CMat> = m
        .kraus()
        .iter()
        .map(|k| s_half.matmul(&k.adjoint()).matmul(&inv_half))
        .collect();
    for (k, &lam) in eo.eigenvalues.iter().enumerate() {
        if lam > t {
            continue;
        }
        let ket = eo.vector(k);
        for (j, &sj) in es.eigenvalues.iter().enumerate() {
            let sv = es.vector(j);
            kraus.push(CMat::outer(&sv, &ket).scale_re(sj.sqrt()));
        }
    }
    QuantumChannel::from_kraus(kraus)
}

/// M̂*(X) = M(σ)^{−1/2} M(σ^{1/2} X σ^{1/2}) M(σ)^{−1/2}.
fn petz_adjoint(m: &QuantumChannel, s_half: &CMat, out_inv_half: &CMat, x: &CMat) -> CMat {
    let inner = s_half.matmul(x).matmul(s_half);
    out_inv_half.matmul(&m.apply(&inner)).matmul(out_inv_half)
}

/// Lower bound on ‖M̂*‖_{(p,σ)→(q,M(σ))} from a search over positive operators.
pub fn petz_adjoint_norm(
    m: &QuantumChannel,
    sigma: &CMat,
    p: f64,
    q: f64,
    opts: &EtaOptions,
) -> Result<f64> {
    let es = full_rank_eig(sigma)?;
    let s_half = es.compose(&es.eigenvalues.iter().map(|x| x.sqrt()).collect::<Vec<_>>());
    let out = m.apply(sigma).hermitian_part();
    full_rank_eig(&out)?;
    let inv_half = powm_support(&out, -0.5)?;
    let d = m.dim_in();
    let f = |x: &[f64]| -> f64 {
        let xm = StateParameterization::decode(d, x);
        let y = petz_adjoint(m, &s_half, &inv_half, &xm);
        match (weighted_norm(&y, q, &out), weighted_norm(&xm, p, sigma)) {
            (Ok(a), Ok(b)) if b > 0.0 => a / b,
            _ => f64::NAN,
        }
    };
    let id = CMat::identity(d);
    let mut starts = vec![state_coords(&id.scale_re(1.0 / d as f64))];
    for h in traceless_directions(d) {
        let x = &id + &h.scale_re(0.5 / operator_norm(&h)?);
        starts.push(state_coords(&x.scale_re(1.0 / x.trace().re)));
    }
    for r in 0..opts.restarts {
        starts.push(random_start(2 * d * d, opts.seed, r as u64));
    }
    let mut lopts = opts.local;
    lopts.ftol = opts.tol;
    match multi_start(&f, &starts, &lopts) {
        Some((_, o, _)) if o.value.is_finite() => Ok(o.value),
        _ => Err(Error::OptimizerStall(
            "weighted norm ratio undefined at every start".into(),
        )),
    }
}

/// Norm value for one τ of the hypercontractivity window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperVerdict {
    pub tau: f64,
    /// Best found ‖M̂*(X)‖_{1+τ,M(σ)} / ‖X‖_{1+ητ,σ}.
    pub norm: f64,
}

impl HyperVerdict {
    /// Consistent with the SDPI with constant η at σ.
    pub fn supports_sdpi(&self) -> bool {
        self.norm <= 1.0 + 1e-6
    }
}

/// Evaluates ‖M̂*‖_{(1+ητ,σ)→(1+τ,M(σ))} on a grid of τ ∈ (0, 0.2].
pub fn hypercontractivity_window(
    m: &QuantumChannel,
    sigma: &CMat,
    eta: f64,
    taus: &[f64],
    opts: &EtaOptions,
) -> Result<Vec<HyperVerdict>> {
    if let Some(t) = taus.iter().find(|&&t| !(t > 0.0 && t <= 0.2)) {
        return Err(Error::OutOfRange(format!("tau = {t} outside (0, 0.2]")));
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange(format!("eta = {eta} outside [0, 1]")));
    }
    taus.iter()
        .map(|&tau| {
            Ok(HyperVerdict {
                tau,
                norm: petz_adjoint_norm(m, sigma, 1.0 + eta * tau, 1.0 + tau, opts)?,
            })
        })
        .collect()
}

/// C = ‖Γ^{−1/2}_{M(σ)} ∘ M ∘ N^{−1} ∘ Γ^{1/2}_{N(σ)}‖_{2→2}.
pub fn two_two_condition(m: &QuantumChannel, n: &QuantumChannel, sigma: &CMat) -> Result<f64> {
    if n.dim_in() != n.dim_out() {
        return Err(Error::NotInvertible(format!(
            "{}->{} map cannot be inverted",
            n.dim_in(),
            n.dim_out()
        )));
    }
    if m.dim_in() != n.dim_in() || sigma.rows() != m.dim_in() {
        return Err(Error::DimensionMismatch(
            "channels and reference state do not share an input".into(),
        ));
    }
    let n_inv = inverse(&n.superop()).map_err(|e| Error::NotInvertible(e.to_string()))?;
    let ns = n.apply(sigma).hermitian_part();
    let ms = m.apply(sigma).hermitian_part();
    let right = superop_from_kraus(&[powm_support(&ns, 0.25)?]);
    let left = superop_from_kraus(&[powm_support(&ms, -0.25)?]);
    let total = left.matmul(&m.superop()).matmul(&n_inv).matmul(&right);
    operator_norm(&total)
}

/// Additive term 2n ln C of the tensorized D₂ inequality implied by C = `c`.
pub fn tensorized_d2_additive(c: f64, n: usize) -> f64 {
    2.0 * n as f64 * c.ln()
}

/// Largest p such that the spectrum of M − (1−p)N₀ lies in the disc of radius p,
/// N₀ the completely depolarizing channel.
///
/// The trace functional is a left eigenvector of M − (1−p)N₀ with eigenvalue p, and the rest
/// of the spectrum is that of M − N₀, so the condition reads p ≥ r(M − N₀).
pub fn spectral_gap(m: &QuantumChannel) -> Result<f64> {
    if m.dim_in() != m.dim_out() {
        return Err(Error::DimensionMismatch(
            "spectral gap needs equal input and output".into(),
        ));
    }
    let d = m.dim_in();
    let n0 = build_channel(&ChannelFamily::Depolarizing { dim: d, p: 1.0 })?;
    let r = spectral_radius(&(&m.superop() - &n0.superop()))?;
    Ok(1.0 - r)
}

/// n(1 − exp((1 − 1/d) ln p / ln d)) in nats, with n the number of copies and d the
/// dimension symbol of the logarithm.
pub fn moe_lower_bound(p: f64, n: usize, d: usize) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfRange(format!("p = {p} outside (0, 1]")));
    }
    if d < 2 || n == 0 {
        return Err(Error::OutOfRange(format!("need n ≥ 1 and d ≥ 2, got n = {n}, d = {d}")));
    }
    let d = d as f64;
    Ok(n as f64 * (1.0 - ((1.0 - 1.0 / d) * p.ln() / d.ln()).exp()))
}

/// (slope, additive) = ((p−1)q/(p(q−1)), q/(q−1)·ln C) for 1 < p ≤ q.
pub fn sdpi_from_pq(p: f64, q: f64, c: f64) -> Result<(f64, f64)> {
    if !(p > 1.0 && p <= q && q.is_finite()) {
        return Err(Error::OutOfRange(format!("need 1 < p ≤ q, got p = {p}, q = {q}")));
    }
    if !(c > 0.0) {
        return Err(Error::OutOfRange(format!("norm constant C = {c} must be positive")));
    }
    Ok(((p - 1.0) * q / (p * (q - 1.0)), q / (q - 1.0) * c.ln()))
}
