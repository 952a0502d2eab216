//! Single-mode bosonic channels on a truncated Fock space.
//!
//! Attenuators, amplifiers and additive-noise channels are all phase covariant, so they map
//! the k-th off-diagonal band of a density matrix into the k-th band. A channel is stored as
//! one real transfer matrix per band, which is far smaller than a Choi matrix at the
//! cutoffs needed here.
//!
//! Every phase-covariant channel with energy rule N ↦ τN + y is a quantum-limited amplifier
//! after a pure-loss channel: τ = κ'λ' with y = κ' − 1. Both factors have closed-form Kraus
//! operators, so the only truncation is on the amplifier output.

use std::f64::consts::PI;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::numerics::{eigh, eigvalsh, expm};
use crate::{c64, CMat};

/// Largest thermal tail mass accepted by default.
pub const TAIL_TOL: f64 = 1e-10;
/// Photon numbers kept beyond the cutoff when building displacements.
const DISPLACEMENT_PAD: usize = 40;

/// Annihilation and number operators on span{|0⟩, …, |cutoff−1⟩}.
#[derive(Clone, Debug)]
pub struct FockSpace {
    pub cutoff: usize,
    pub a: CMat,
    pub n_op: CMat,
}

impl FockSpace {
    pub fn new(cutoff: usize) -> Self {
        let a = CMat::from_fn(cutoff, cutoff, |r, c| {
            if c == r + 1 {
                c64((c as f64).sqrt(), 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let n_op = CMat::diag(&(0..cutoff).map(|k| k as f64).collect::<Vec<_>>());
        Self { cutoff, a, n_op }
    }

    pub fn adag(&self) -> CMat {
        self.a.adjoint()
    }
}

/// g(E) = (E+1) ln(E+1) − E ln E, the entropy of σ(E).
pub fn g_function(e: f64) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    (e + 1.0) * (e + 1.0).ln() - e * e.ln()
}

/// ln of the weights (1/(E+1)) (E/(E+1))^k of σ(E), without truncation.
pub fn thermal_log_weight(e: f64, k: usize) -> f64 {
    if e <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -(e + 1.0).ln() + k as f64 * (e / (e + 1.0)).ln()
}

/// Truncated and renormalized state with the discarded mass.
#[derive(Clone, Debug)]
pub struct TruncatedState {
    pub rho: CMat,
    pub tail: f64,
}

fn check_energy(e: f64) -> Result<()> {
    if !(e >= 0.0) || !e.is_finite() {
        return Err(Error::NonPositiveEnergy(e));
    }
    Ok(())
}

/// Mass of σ(E) on photon numbers ≥ cutoff.
pub fn thermal_tail(e: f64, cutoff: usize) -> f64 {
    if e <= 0.0 {
        return 0.0;
    }
    (e / (e + 1.0)).powi(cutoff as i32)
}

/// σ(E) restricted to `cutoff` levels and renormalized.
pub fn thermal_state(e: f64, cutoff: usize) -> Result<TruncatedState> {
    check_energy(e)?;
    let tail = thermal_tail(e, cutoff);
    if tail > TAIL_TOL {
        return Err(Error::CutoffTooSmall {
            tail,
            limit: TAIL_TOL,
        });
    }
    let w: Vec<f64> = (0..cutoff).map(|k| thermal_log_weight(e, k).exp()).collect();
    let s: f64 = w.iter().sum();
    let rho = CMat::diag(&w.iter().map(|x| x / s).collect::<Vec<_>>());
    Ok(TruncatedState { rho, tail })
}

/// D(z) = exp(z a† − z* a), computed with extra levels and then truncated.
pub fn displacement(z: crate::C64, cutoff: usize) -> Result<CMat> {
    let big = FockSpace::new(cutoff + DISPLACEMENT_PAD);
    let gen = &big.adag().scale(z) - &big.a.scale(z.conj());
    let full = expm(&gen)?;
    Ok(full.submatrix(0, 0, cutoff, cutoff))
}

/// D(z) σ(E) D(z)† on `cutoff` levels, renormalized.
pub fn displaced_thermal(e: f64, z: crate::C64, cutoff: usize) -> Result<TruncatedState> {
    let big = cutoff + DISPLACEMENT_PAD;
    let th = thermal_state(e, big)?;
    let d = displacement(z, big)?;
    let full = th.rho.conjugate_by(&d);
    let sub = full.submatrix(0, 0, cutoff, cutoff).hermitian_part();
    let t = sub.trace().re;
    Ok(TruncatedState {
        rho: sub.scale_re(1.0 / t),
        tail: (1.0 - t).max(0.0) + th.tail,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GaussianFamily {
    /// ρ ↦ B_λ(ρ ⊗ σ(E)), λ ∈ [0, 1].
    Attenuator { lambda: f64, e: f64 },
    /// ρ ↦ B_κ(ρ ⊗ σ(E)), κ ≥ 1.
    Amplifier { kappa: f64, e: f64 },
    /// Gaussian average of displacements D(√E z).
    Additive { e: f64 },
}

impl GaussianFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Attenuator { lambda, e } => {
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
                }
                check_energy(e)
            }
            Self::Amplifier { kappa, e } => {
                if !(kappa >= 1.0) || !kappa.is_finite() {
                    return Err(Error::InvalidParameter(format!("kappa = {kappa} below 1")));
                }
                check_energy(e)
            }
            Self::Additive { e } => check_energy(e),
        }
    }

    /// (τ, y) with output energy τ·N + y.
    pub fn energy_rule(&self) -> (f64, f64) {
        match *self {
            Self::Attenuator { lambda, e } => (lambda, (1.0 - lambda) * e),
            Self::Amplifier { kappa, e } => (kappa, (kappa - 1.0) * (e + 1.0)),
            Self::Additive { e } => (1.0, e),
        }
    }

    /// Whether the minimum output entropy statement behind the closed form is proven here.
    pub fn unconditional(&self) -> bool {
        match *self {
            Self::Attenuator { lambda, e } => lambda >= 1.0 || e >= lambda / (1.0 - lambda),
            Self::Amplifier { kappa, e } => kappa > 1.0 && e >= 1.0 / (kappa - 1.0),
            Self::Additive { e } => e >= 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianChannelSpec {
    pub family: GaussianFamily,
    /// Input levels.
    pub cutoff: usize,
    /// Output levels; defaults to cutoff + 30(1 + y), or the cutoff when no amplification is needed.
    pub out_cutoff: Option<usize>,
}

impl GaussianChannelSpec {
    pub fn new(family: GaussianFamily, cutoff: usize) -> Self {
        Self {
            family,
            cutoff,
            out_cutoff: None,
        }
    }
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    for k in 1..=n {
        out[k] = out[k - 1] + (k as f64).ln();
    }
    out
}

fn ln_binom(lf: &[f64], n: usize, k: usize) -> f64 {
    lf[n] - lf[k] - lf[n - k]
}

/// x ln y with 0 ln 0 = 0.
fn xlny(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Phase-covariant channel stored as band transfer matrices.
#[derive(Clone, Debug)]
pub struct GaussianChannel {
    pub family: Option<GaussianFamily>,
    d_in: usize,
    d_out: usize,
    /// bands[k][m * d_in + n]: weight of |n⟩⟨n+k| in the |m⟩⟨m+k| entry of the output.
    bands: Vec<Vec<f64>>,
}

impl GaussianChannel {
    pub fn dim_in(&self) -> usize {
        self.d_in
    }

    pub fn dim_out(&self) -> usize {
        self.d_out
    }

    /// `index(m, n)` is the only Kraus operator with a nonzero ⟨m|K_j|n⟩, which holds for both
    /// closed-form families; `kraus(j, m, n)` is that real entry.
    fn from_kraus_fn(
        d_in: usize,
        d_out: usize,
        index: impl Fn(usize, usize) -> Option<usize>,
        kraus: impl Fn(usize, usize, usize) -> f64,
    ) -> Self {
        let mut bands = Vec::with_capacity(d_in);
        for k in 0..d_in {
            let mut t = vec![0.0; d_out * d_in];
            for n in 0..d_in - k {
                for m in 0..d_out - k.min(d_out) {
                    if let Some(j) = index(m, n) {
                        t[m * d_in + n] = kraus(j, m, n) * kraus(j, m + k, n + k);
                    }
                }
            }
            bands.push(t);
        }
        Self {
            family: None,
            d_in,
            d_out,
            bands,
        }
    }

    /// Pure-loss channel of transmissivity λ; exact on the truncated space.
    pub fn pure_loss(lambda: f64, d: usize) -> Self {
        let lf = ln_factorials(d);
        let kraus = move |j: usize, m: usize, n: usize| -> f64 {
            if m + j != n || m >= d {
                return 0.0;
            }
            let lw = ln_binom(&lf, n, j);
            let v = lw + if m > 0 { m as f64 * lambda.ln() } else { 0.0 } + if j > 0 { j as f64 * (1.0 - lambda).ln() } else { 0.0 };
            (0.5 * v).exp()
        };
        Self::from_kraus_fn(d, d, |m, n| n.checked_sub(m), kraus)
    }

    /// Quantum-limited amplifier of gain κ with output truncated at `d_out` levels.
    pub fn quantum_limited_amplifier(kappa: f64, d_in: usize, d_out: usize) -> Self {
        let lf = ln_factorials(d_out + 1);
        let kraus = move |j: usize, m: usize, n: usize| -> f64 {
            if m != n + j || m >= d_out {
                return 0.0;
            }
            if kappa == 1.0 {
                return if j == 0 { 1.0 } else { 0.0 };
            }
            let v = ln_binom(&lf, n + j, j) - (n + 1) as f64 * kappa.ln() + j as f64 * (1.0 - 1.0 / kappa).ln();
            (0.5 * v).exp()
        };
        Self::from_kraus_fn(d_in, d_out, |m, n| m.checked_sub(n), kraus)
    }

    /// self ∘ inner: band-wise matrix products.
    pub fn after(&self, inner: &GaussianChannel) -> Result<Self> {
        if inner.d_out != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "composing {}-level output into {}-level input",
                inner.d_out, self.d_in
            )));
        }
        let (d_in, d_mid, d_out) = (inner.d_in, inner.d_out, self.d_out);
        let bands = (0..d_in)
            .map(|k| {
                let mut t = vec![0.0; d_out * d_in];
                if k < d_mid {
                    let (a, b) = (&self.bands[k], &inner.bands[k]);
                    for m in 0..d_out {
                        for l in 0..d_mid {
                            let x = a[m * d_mid + l];
                            if x != 0.0 {
                                for n in 0..d_in {
                                    t[m * d_in + n] += x * b[l * d_in + n];
                                }
                            }
                        }
                    }
                }
                t
            })
            .collect();
        Ok(Self {
            family: None,
            d_in,
            d_out,
            bands,
        })
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let (di, dout) = (self.d_in, self.d_out);
        let mut out = CMat::zeros(dout, dout);
        for (k, t) in self.bands.iter().enumerate() {
            for m in 0..dout.saturating_sub(k) {
                let mut up = c64(0.0, 0.0);
                let mut down = c64(0.0, 0.0);
                for n in 0..di - k {
                    let w = t[m * di + n];
                    if w != 0.0 {
                        up += x[(n, n + k)] * w;
                        if k > 0 {
                            down += x[(n + k, n)] * w;
                        }
                    }
                }
                out[(m, m + k)] = up;
                if k > 0 {
                    out[(m + k, m)] = down;
                }
            }
        }
        out
    }

    /// Largest trace lost by the output truncation over input Fock states up to `n_max`.
    pub fn trace_defect(&self, n_max: usize) -> f64 {
        let t = &self.bands[0];
        (0..=n_max.min(self.d_in - 1))
            .map(|n| 1.0 - (0..self.d_out).map(|m| t[m * self.d_in + n]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Dense channel; only sensible for small cutoffs and exactly trace-preserving truncations.
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        if self.d_in * self.d_out > 900 {
            return Err(Error::DimensionTooLarge(format!(
                "{}-to-{} level Choi matrix",
                self.d_in, self.d_out
            )));
        }
        let (di, dout) = (self.d_in, self.d_out);
        let mut choi = CMat::zeros(di * dout, di * dout);
        for n in 0..di {
            for n2 in 0..di {
                let y = self.apply(&CMat::from_fn(di, di, |r, c| {
                    c64(if r == n && c == n2 { 1.0 } else { 0.0 }, 0.0)
                }));
                for m in 0..dout {
                    for m2 in 0..dout {
                        choi[(n * dout + m, n2 * dout + m2)] = y[(m, m2)];
                    }
                }
            }
        }
        QuantumChannel::from_choi(&choi, di, dout)
    }
}

/// Builds the channel as a quantum-limited amplifier after pure loss.
pub fn build_gaussian_channel(spec: &GaussianChannelSpec) -> Result<GaussianChannel> {
    spec.family.validate()?;
    if spec.cutoff < 2 {
        return Err(Error::InvalidParameter("cutoff must be at least 2".into()));
    }
    let (tau, y) = spec.family.energy_rule();
    let kappa = 1.0 + y;
    let lambda = tau / kappa;
    let d = spec.cutoff;
    let d_out = spec.out_cutoff.unwrap_or(if y == 0.0 && tau <= 1.0 {
        d
    } else {
        d + (30.0 * (1.0 + y) + d as f64 * (tau - 1.0).max(0.0)).ceil() as usize
    });
    let loss = GaussianChannel::pure_loss(lambda.min(1.0), d);
    let mut ch = GaussianChannel::quantum_limited_amplifier(kappa, d, d_out).after(&loss)?;
    ch.family = Some(spec.family);
    Ok(ch)
}

/// Attenuator from its beam-splitter dilation, with the environment in σ(E) on `env_cutoff` levels.
///
/// exp[θ(a†b − ab†)] preserves the total photon number, so each photon-number block is
/// exponentiated exactly. Output has cutoff + env_cutoff − 1 levels.
pub fn attenuator_by_dilation(lambda: f64, e: f64, cutoff: usize, env_cutoff: usize) -> Result<GaussianChannel> {
    GaussianFamily::Attenuator { lambda, e }.validate()?;
    let env = thermal_state(e, env_cutoff)?;
    let p: Vec<f64> = (0..env_cutoff).map(|j| env.rho[(j, j)].re).collect();
    let theta = lambda.sqrt().acos();
    let d_out = cutoff + env_cutoff - 1;
    let n_max = cutoff + env_cutoff - 2;
    // blocks[N][(n1_out, n1_in)] for the N-photon block with basis |n1, N−n1⟩.
    let mut blocks = Vec::with_capacity(n_max + 1);
    for nn in 0..=n_max {
        let dim = nn + 1;
        let mut g = CMat::zeros(dim, dim);
        for n1 in 0..dim {
            let n2 = nn - n1;
            if n2 > 0 {
                // a†b |n1, n2⟩ = √((n1+1) n2) |n1+1, n2−1⟩
                g[(n1 + 1, n1)] += c64(theta * (((n1 + 1) * n2) as f64).sqrt(), 0.0);
            }
            if n1 > 0 {
                // −ab† |n1, n2⟩ = −√(n1 (n2+1)) |n1−1, n2+1⟩
                g[(n1 - 1, n1)] -= c64(theta * ((n1 * (n2 + 1)) as f64).sqrt(), 0.0);
            }
        }
        blocks.push(expm(&g)?);
    }
    let kraus = |j: usize, m: usize, n: usize| -> (f64, usize) {
        // Amplitude ⟨m, l|U|n, j⟩ with l = n + j − m.
        let nn = n + j;
        if m > nn {
            return (0.0, 0);
        }
        (blocks[nn][(m, n)].re, nn - m)
    };
    let mut bands = Vec::with_capacity(cutoff);
    for k in 0..cutoff {
        let mut t = vec![0.0; d_out * cutoff];
        for n in 0..cutoff - k {
            for m in 0..d_out - k {
                let mut s = 0.0;
                for (j, pj) in p.iter().enumerate() {
                    let (a, l) = kraus(j, m, n);
                    if a == 0.0 {
                        continue;
                    }
                    let (b, l2) = kraus(j, m + k, n + k);
                    if l == l2 {
                        s += pj * a * b;
                    }
                }
                t[m * cutoff + n] = s;
            }
        }
        bands.push(t);
    }
    Ok(GaussianChannel {
        family: Some(GaussianFamily::Attenuator { lambda, e }),
        d_in: cutoff,
        d_out,
        bands,
    })
}

/// Gauss-Hermite nodes and weights for ∫ f(x) e^{−x²} dx (Golub-Welsch).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let jac = CMat::from_fn(n, n, |r, c| {
        if r + 1 == c || c + 1 == r {
            c64((r.max(c) as f64 / 2.0).sqrt(), 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    let e = eigh(&jac)?;
    let w = (0..n)
        .map(|i| PI.sqrt() * e.eigenvectors[(0, i)].norm_sqr())
        .collect();
    Ok((e.eigenvalues, w))
}

/// Additive-noise output by two-dimensional Gauss-Hermite quadrature over displacements.
pub fn additive_by_quadrature(e: f64, x: &CMat, nodes: usize, d_out: usize) -> Result<CMat> {
    check_energy(e)?;
    let (xs, ws) = gauss_hermite(nodes)?;
    let d = x.rows();
    let mut padded = CMat::zeros(d_out, d_out);
    for r in 0..d.min(d_out) {
        for c in 0..d.min(d_out) {
            padded[(r, c)] = x[(r, c)];
        }
    }
    let mut out = CMat::zeros(d_out, d_out);
    for (xi, wi) in xs.iter().zip(&ws) {
        for (yj, wj) in xs.iter().zip(&ws) {
            let z = c64(e.sqrt() * xi, e.sqrt() * yj);
            let dz = displacement(z, d_out)?;
            out += &padded.conjugate_by(&dz).scale_re(wi * wj / PI);
        }
    }
    Ok(out)
}

/// Lindblad relative entropy of a truncated state against the untruncated σ(E_ref).
///
/// ln σ is diagonal with exact weights, so no tail eigenvalue is ever clipped.
pub fn rel_ent_to_thermal(rho: &CMat, e_ref: f64) -> Result<f64> {
    let ev = eigvalsh(&rho.hermitian_part())?;
    let tr: f64 = ev.iter().sum();
    let neg_ent: f64 = ev.iter().map(|&a| xlny(a.max(0.0), a.max(0.0))).sum();
    let d = rho.rows();
    let cross: f64 = (0..d).map(|k| rho[(k, k)].re * thermal_log_weight(e_ref, k)).sum();
    let ref_mass = 1.0 - thermal_tail(e_ref, d);
    Ok(neg_ent - cross + ref_mass - tr)
}

/// Closed-form relative-entropy contraction coefficient at the thermal references σ(E_j).
#[derive(Clone, Copy, Debug)]
pub struct ClosedFormEta {
    pub value: f64,
    /// False when the value relies on the unproven output-entropy conjecture.
    pub unconditional: bool,
}

pub fn eta_closed_form(family: &GaussianFamily, e_list: &[f64]) -> Result<ClosedFormEta> {
    family.validate()?;
    if e_list.is_empty() {
        return Err(Error::InvalidParameter("empty energy list".into()));
    }
    let (tau, y) = family.energy_rule();
    let mut best = f64::NEG_INFINITY;
    for &ej in e_list {
        if !(ej > 0.0) {
            return Err(Error::NonPositiveEnergy(ej));
        }
        let eo = tau * ej + y;
        let v = if tau == 0.0 {
            0.0
        } else {
            tau * ((eo + 1.0) / eo).ln() / ((ej + 1.0) / ej).ln()
        };
        best = best.max(v);
    }
    Ok(ClosedFormEta {
        value: best,
        unconditional: family.unconditional(),
    })
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub delta: f64,
    pub ratio: f64,
    /// Same ratio at cutoff + 20.
    pub ratio_refined: f64,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct SweepTable {
    pub family: GaussianFamily,
    pub e1: f64,
    pub cutoff: usize,
    pub rows: Vec<SweepRow>,
    /// Ratios increase as δ decreases.
    pub increasing: bool,
    pub closed_form: ClosedFormEta,
}

/// Tolerance for agreement between a cutoff and cutoff + 20.
pub const CUTOFF_TOL: f64 = 1e-5;

fn sweep_ratio(family: &GaussianFamily, e1: f64, delta: f64, cutoff: usize) -> Result<f64> {
    let ch = build_gaussian_channel(&GaussianChannelSpec::new(*family, cutoff))?;
    let rho = displaced_thermal(e1 - delta, c64(delta.sqrt(), 0.0), cutoff)?;
    let (tau, y) = family.energy_rule();
    let den = rel_ent_to_thermal(&rho.rho, e1)?;
    let num = rel_ent_to_thermal(&ch.apply(&rho.rho), tau * e1 + y)?;
    Ok(num / den)
}

/// Ratios D(G(ρ_δ)‖G(σ(E₁)))/D(ρ_δ‖σ(E₁)) for ρ_δ = σ(E₁−δ) displaced by |z|² = δ.
///
/// Each ρ_δ has mean energy E₁, and the ratio tends to the closed form as δ → 0.
pub fn eta_lower_sweep(family: &GaussianFamily, e1: f64, deltas: &[f64], cutoff: usize) -> Result<SweepTable> {
    family.validate()?;
    if !(e1 > 0.0) {
        return Err(Error::NonPositiveEnergy(e1));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < e1)) || deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "deltas must be decreasing and inside (0, E1)".into(),
        ));
    }
    let rows = std::thread::scope(|s| {
        let handles: Vec<_> = deltas
            .iter()
            .map(|&delta| {
                s.spawn(move || -> Result<SweepRow> {
                    let ratio = sweep_ratio(family, e1, delta, cutoff)?;
                    let ratio_refined = sweep_ratio(family, e1, delta, cutoff + 20)?;
                    Ok(SweepRow {
                        delta,
                        ratio,
                        ratio_refined,
                        converged: (ratio - ratio_refined).abs() <= CUTOFF_TOL,
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let increasing = rows.windows(2).all(|w| w[1].ratio >= w[0].ratio - 1e-12);
    Ok(SweepTable {
        family: *family,
        e1,
        cutoff,
        rows,
        increasing,
        closed_form: eta_closed_form(family, &[e1])?,
    })
}

/// Which scalar inequality on g to check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GInequality {
    /// g(ν+α) − g(ν+β) ≤ [ln((ν+α+1)/(ν+α)) / ln((α+1)/α)] (g(α) − g(β)).
    Additive,
    /// The same with α → ηα, β → ηβ, ν → |1−η|ν and an extra factor η.
    Attenuator { eta: f64 },
}

/// Largest value of lhs − rhs over ν, α, β from `grid` with β ≤ α.
pub fn g_inequality_check(kind: GInequality, grid: &[f64]) -> f64 {
    g_inequality_check_grids(kind, grid, grid)
}

/// As [`g_inequality_check`] with ν drawn from its own grid.
///
/// For η > 1 the attenuator form fails at small ν (about 0.049 at η = 1.8, ν = 0.25); the
/// amplifier only needs ν = E + 1 ≥ 1, where it holds.
pub fn g_inequality_check_grids(kind: GInequality, nu_grid: &[f64], grid: &[f64]) -> f64 {
    let ratio = |x: f64, a: f64| ((x + 1.0) / x).ln() / ((a + 1.0) / a).ln();
    let mut worst = f64::NEG_INFINITY;
    for &nu in nu_grid {
        for &alpha in grid {
            for &beta in grid.iter().filter(|&&b| b <= alpha) {
                let v = match kind {
                    GInequality::Additive => {
                        let lhs = g_function(nu + alpha) - g_function(nu + beta);
                        lhs - ratio(nu + alpha, alpha) * (g_function(alpha) - g_function(beta))
                    }
                    GInequality::Attenuator { eta } => {
                        let shift = (1.0 - eta).abs() * nu;
                        let top = eta * alpha + shift;
                        let lhs = g_function(top) - g_function(eta * beta + shift);
                        if top == 0.0 {
                            lhs
                        } else {
                            lhs - eta * ratio(top, alpha) * (g_function(alpha) - g_function(beta))
                        }
                    }
                };
                worst = worst.max(v);
            }
        }
    }
    worst
}
