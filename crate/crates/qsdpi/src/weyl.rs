//! Weyl-covariant channels on Z_n × Z_n.
//!
//! The clock is V = Σ_c e^{−2πic/n}|c⟩⟨c|, which makes
//! W_{a,b}W_{c,d} = e^{2πi(ad−bc)/n} W_{c,d}W_{a,b} and
//! W_{a',b'} W_{a,b} W_{a',b'}† = e^{2πi(a'b−b'a)/n} W_{a,b}.

use std::f64::consts::PI;

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::{c64, CMat, C64};

/// Largest modulus accepted by default (channel dimension n, superoperator n⁴).
pub const MAX_N: usize = 6;
/// Tolerance for deciding that an inverse transform is a pmf.
pub const PMF_TOL: f64 = 1e-9;
/// Magnitude below which a transform value counts as zero.
const ZERO_TOL: f64 = 1e-12;

fn phase(k: i64, n: usize) -> C64 {
    let t = 2.0 * PI * (k.rem_euclid(n as i64) as f64) / n as f64;
    c64(t.cos(), t.sin())
}

/// Shift, clock and the table of displacement operators W_{a,b} = U^a V^b.
#[derive(Clone, Debug)]
pub struct WeylSystem {
    pub n: usize,
    pub u: CMat,
    pub v: CMat,
    w: Vec<CMat>,
}

impl WeylSystem {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "Weyl modulus must be at least 2, got {n}"
            )));
        }
        let u = CMat::from_fn(n, n, |r, c| {
            if r == (c + 1) % n {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        let v = CMat::diag_complex(&(0..n).map(|c| phase(-(c as i64), n)).collect::<Vec<_>>());
        let mut w = Vec::with_capacity(n * n);
        let mut ua = CMat::identity(n);
        for _a in 0..n {
            let mut vb = CMat::identity(n);
            for _b in 0..n {
                w.push(ua.matmul(&vb));
                vb = vb.matmul(&v);
            }
            ua = ua.matmul(&u);
        }
        Ok(Self { n, u, v, w })
    }

    pub fn w(&self, a: usize, b: usize) -> &CMat {
        &self.w[(a % self.n) * self.n + (b % self.n)]
    }

    /// Phase α with W_{a,b}W_{c,d} = α W_{c,d}W_{a,b}.
    pub fn commutation_phase(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        phase((a * d) as i64 - (b * c) as i64, self.n)
    }

    /// Channel X ↦ W_{a,b} X W_{a,b}†.
    pub fn rotation(&self, a: usize, b: usize) -> QuantumChannel {
        QuantumChannel::isometry(self.w(a, b).clone()).expect("Weyl operators are unitary")
    }
}

/// Probability mass function on Z_n × Z_n, stored row-major in (a, b).
#[derive(Clone, Debug, PartialEq)]
pub struct PmfZnZn {
    n: usize,
    table: Vec<f64>,
}

impl PmfZnZn {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self> {
        if table.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "pmf on Z_{n}×Z_{n} needs {} entries",
                n * n
            )));
        }
        if table.iter().any(|&x| !(x >= 0.0)) {
            return Err(Error::InvalidParameter(
                "pmf entries must be nonnegative".into(),
            ));
        }
        let s: f64 = table.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("pmf sums to {s}")));
        }
        Ok(Self { n, table })
    }

    pub fn point_mass(n: usize, a: usize, b: usize) -> Self {
        let mut table = vec![0.0; n * n];
        table[a * n + b] = 1.0;
        Self { n, table }
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            n,
            table: vec![1.0 / (n * n) as f64; n * n],
        }
    }

    /// ω_δ: weight 1−δ on (0,0), δ/(n²−1) elsewhere.
    pub fn omega_delta(n: usize, delta: f64) -> Result<Self> {
        let m = (n * n - 1) as f64;
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} outside [0, 1]"
            )));
        }
        let mut table = vec![delta / m; n * n];
        table[0] = 1.0 - delta;
        Self::new(n, table)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.table[a * self.n + b]
    }

    /// Pmf of W_{c,d} ∘ M_f, i.e. f shifted by (c, d).
    pub fn shifted(&self, c: usize, d: usize) -> Self {
        let n = self.n;
        let mut table = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[((a + c) % n) * n + (b + d) % n] += self.get(a, b);
            }
        }
        Self { n, table }
    }

    /// Pmf of M_self ∘ M_other; Weyl phases cancel under conjugation, so this is convolution.
    pub fn convolve(&self, other: &PmfZnZn) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch("pmfs on different groups".into()));
        }
        let n = self.n;
        let mut table = vec![0.0; n * n];
        for a in 0..n {
            for b in 0..n {
                let p = self.get(a, b);
                if p == 0.0 {
                    continue;
                }
                for c in 0..n {
                    for d in 0..n {
                        table[((a + c) % n) * n + (b + d) % n] += p * other.get(c, d);
                    }
                }
            }
        }
        Ok(Self { n, table })
    }

    pub fn mix(weights: &[f64], pmfs: &[PmfZnZn]) -> Result<Self> {
        let n = pmfs
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?
            .n;
        let mut table = vec![0.0; n * n];
        for (w, p) in weights.iter().zip(pmfs) {
            if p.n != n {
                return Err(Error::DimensionMismatch("pmfs on different groups".into()));
            }
            for (t, x) in table.iter_mut().zip(&p.table) {
                *t += w * x;
            }
        }
        Self::new(n, table)
    }
}

/// Depolarizing weight on ρ realized by ω_δ: M_δ(ρ) = pρ + (1−p)I/n with p = 1 − δn²/(n²−1).
pub fn depolarizing_weight(n: usize, delta: f64) -> f64 {
    let n2 = (n * n) as f64;
    1.0 - delta * n2 / (n2 - 1.0)
}

/// M_f(ρ) = Σ f(a,b) W_{a,b} ρ W_{a,b}†.
pub fn additive_channel(f: &PmfZnZn) -> Result<QuantumChannel> {
    if f.n > MAX_N {
        return Err(Error::DimensionTooLarge(format!(
            "Weyl modulus {} above cap {MAX_N}",
            f.n
        )));
    }
    let sys = WeylSystem::new(f.n)?;
    let mut kraus = Vec::new();
    for a in 0..f.n {
        for b in 0..f.n {
            let p = f.get(a, b);
            if p > 0.0 {
                kraus.push(sys.w(a, b).scale_re(p.sqrt()));
            }
        }
    }
    QuantumChannel::from_kraus(kraus)
}

/// A_f(a,b) = Σ f(a',b') e^{2πi(a'b−b'a)/n}, the eigenvalue of M_f on W_{a,b}.
pub fn weyl_eigenvalues(f: &PmfZnZn) -> Vec<C64> {
    let n = f.n;
    let mut out = vec![c64(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut s = c64(0.0, 0.0);
            for a2 in 0..n {
                for b2 in 0..n {
                    let p = f.get(a2, b2);
                    if p != 0.0 {
                        s += phase((a2 * b) as i64 - (b2 * a) as i64, n) * p;
                    }
                }
            }
            out[a * n + b] = s;
        }
    }
    out
}

/// Inverse of [`weyl_eigenvalues`]; returns complex values so callers can test pmf-ness.
pub fn inverse_transform(n: usize, a_table: &[C64]) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); n * n];
    let norm = 1.0 / (n * n) as f64;
    for a2 in 0..n {
        for b2 in 0..n {
            let mut s = c64(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    s += a_table[a * n + b] * phase((b2 * a) as i64 - (a2 * b) as i64, n);
                }
            }
            out[a2 * n + b2] = s * norm;
        }
    }
    out
}

/// Outcome of the degradation test for Weyl-covariant channels.
#[derive(Clone, Debug, PartialEq)]
pub enum DegradationWitness {
    /// M_f = M_k ∘ M_h with this pmf k.
    Pmf(PmfZnZn),
    /// The quotient transform is not a pmf; `worst` is the most negative (or most imaginary) entry.
    NotPmf { worst: f64, at: (usize, usize) },
}

impl DegradationWitness {
    pub fn is_degradable(&self) -> bool {
        matches!(self, Self::Pmf(_))
    }
}

/// Looks for k with M_f = M_k ∘ M_h via A_k = A_f / A_h (0/0 taken as 0).
pub fn degradation_witness(f: &PmfZnZn, h: &PmfZnZn) -> Result<DegradationWitness> {
    if f.n != h.n {
        return Err(Error::DimensionMismatch("pmfs on different groups".into()));
    }
    let n = f.n;
    let af = weyl_eigenvalues(f);
    let ah = weyl_eigenvalues(h);
    let mut ak = vec![c64(0.0, 0.0); n * n];
    for i in 0..n * n {
        if ah[i].norm() <= ZERO_TOL {
            if af[i].norm() > ZERO_TOL {
                return Err(Error::DivisionUndefined {
                    a: i / n,
                    b: i % n,
                    value: af[i].norm(),
                });
            }
        } else {
            ak[i] = af[i] / ah[i];
        }
    }
    let k = inverse_transform(n, &ak);
    let mut worst = 0.0f64;
    let mut at = (0, 0);
    for (i, z) in k.iter().enumerate() {
        let bad = (-z.re).max(z.im.abs());
        if bad > worst {
            worst = bad;
            at = (i / n, i % n);
        }
    }
    if worst > PMF_TOL {
        return Ok(DegradationWitness::NotPmf { worst: -worst, at });
    }
    let table: Vec<f64> = k.iter().map(|z| z.re.max(0.0)).collect();
    let s: f64 = table.iter().sum();
    let table = table.into_iter().map(|x| x / s).collect();
    Ok(DegradationWitness::Pmf(PmfZnZn::new(n, table)?))
}

/// γ₀ = (1−δ)/(1−δ + δ/(n²−1)²).
pub fn gamma0(n: usize, delta: f64) -> Result<f64> {
    let n2 = (n * n) as f64;
    let hi = (n2 - 1.0) / n2;
    if !(0.0..=hi).contains(&delta) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} outside [0, {hi}]"
        )));
    }
    let m = n2 - 1.0;
    Ok((1.0 - delta) / (1.0 - delta + delta / (m * m)))
}

/// Interval of γ for which M_δ ⪰_deg M_γ in the depolarizing family: [δ, 1 − δ/(n²−1)].
pub fn depolarizing_degradation_interval(n: usize, delta: f64) -> (f64, f64) {
    (delta, 1.0 - delta / ((n * n) as f64 - 1.0))
}

/// Base channel of one mixture component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MixtureBase {
    /// M_δ itself.
    Delta,
    /// M_{γ₀}, which M_δ does not degrade to.
    Gamma0,
}

/// One term λ · W_{a,b} ∘ M_base of a mixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixtureComponent {
    pub weight: f64,
    pub base: MixtureBase,
    pub a: usize,
    pub b: usize,
}

/// ½ M_δ + ½ W_{1,1} ∘ M_{γ₀}.
pub fn equal_mixture() -> Vec<MixtureComponent> {
    vec![
        MixtureComponent {
            weight: 0.5,
            base: MixtureBase::Delta,
            a: 0,
            b: 0,
        },
        MixtureComponent {
            weight: 0.5,
            base: MixtureBase::Gamma0,
            a: 1,
            b: 1,
        },
    ]
}

/// Pmf of Σ λ_i W_{a_i,b_i} ∘ M_{base_i}.
pub fn mixture_pmf(n: usize, delta: f64, mixture: &[MixtureComponent]) -> Result<PmfZnZn> {
    let g0 = gamma0(n, delta)?;
    let total: f64 = mixture.iter().map(|c| c.weight).sum();
    if mixture.iter().any(|c| !(c.weight >= 0.0)) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "mixture weights must be nonnegative and sum to 1".into(),
        ));
    }
    let parts = mixture
        .iter()
        .map(|c| {
            let base = match c.base {
                MixtureBase::Delta => delta,
                MixtureBase::Gamma0 => g0,
            };
            Ok(PmfZnZn::omega_delta(n, base)?.shifted(c.a, c.b))
        })
        .collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = mixture.iter().map(|c| c.weight).collect();
    PmfZnZn::mix(&weights, &parts)
}

/// Runs the less-noisy falsifier for M_δ ⪰ M_f with M_f the given mixture.
///
/// The relation holds, so the expected verdict is undecided. `trials` random pairs are
/// sampled, with a handful of local searches from the best of them.
pub fn check_ln_mixture(
    n: usize,
    delta: f64,
    mixture: &[MixtureComponent],
    trials: usize,
    seed: u64,
) -> Result<crate::orders::OrderVerdict> {
    use crate::orders::{falsify_less_noisy, FalsifyOptions, LnVariant};
    let f = mixture_pmf(n, delta, mixture)?;
    let m = additive_channel(&PmfZnZn::omega_delta(n, delta)?)?;
    let mf = additive_channel(&f)?;
    let opts = FalsifyOptions {
        trials,
        seed,
        ..Default::default()
    };
    let mut v = falsify_less_noisy(&m, &mf, LnVariant::Ln, &opts)?;
    v.note = format!("M_delta with delta = {delta} against a {}-term Weyl mixture", mixture.len());
    Ok(v)
}
