//! Channel representations, validation, named families, composition and
//! complementary channels.
//!
//! Choi convention: J = Σ_ij |i⟩⟨j| ⊗ N(|i⟩⟨j|), input factor first, unnormalized,
//! so Tr_out J = I for trace-preserving maps.

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::numerics::{eigh, eigvalsh, partial_trace, superop_from_kraus, DEFAULT_CLIP_REL};
use crate::{c64, CMat, C64};

/// Tolerance for the trace-preservation and Choi checks on channels.
pub const CHANNEL_TOL: f64 = 1e-9;
/// Tolerance for the state checks on density matrices.
pub const STATE_TOL: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(matrix: CMat) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(
                "density matrix must be square".into(),
            ));
        }
        if !matrix.is_hermitian(STATE_TOL) {
            return Err(Error::NonHermitian(matrix.hermiticity_error()));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidParameter(format!(
                "trace {tr} differs from 1"
            )));
        }
        let min = eigvalsh(&matrix)?.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidParameter(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(Self {
            dim: matrix.rows(),
            matrix: matrix.hermitian_part(),
        })
    }

    /// Normalizes a PSD matrix by its trace.
    pub fn from_psd(matrix: CMat) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidParameter("PSD matrix has zero trace".into()));
        }
        Self::new(matrix.scale_re(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            dim: d,
            matrix: CMat::identity(d).scale_re(1.0 / d as f64),
        }
    }

    pub fn basis(d: usize, i: usize) -> Self {
        Self {
            dim: d,
            matrix: CMat::basis_projector(d, i),
        }
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v: Vec<C64> = psi.iter().map(|z| z / n).collect();
        Ok(Self {
            dim: v.len(),
            matrix: CMat::outer(&v, &v),
        })
    }

    pub fn diagonal(p: &[f64]) -> Result<Self> {
        Self::new(CMat::diag(p))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }
}

impl Deref for DensityMatrix {
    type Target = CMat;
    fn deref(&self) -> &CMat {
        &self.matrix
    }
}

impl AsRef<CMat> for DensityMatrix {
    fn as_ref(&self) -> &CMat {
        &self.matrix
    }
}

/// Completely positive map stored as Kraus operators with its Choi matrix.
///
/// Trace preservation is validated unless the map was built with [`QuantumChannel::from_kraus_cp`].
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
    choi: CMat,
    trace_preserving: bool,
}

impl QuantumChannel {
    /// Builds and validates a CPTP map from Kraus operators of shape dim_out×dim_in.
    pub fn from_kraus(kraus: Vec<CMat>) -> Result<Self> {
        let ch = Self::from_kraus_cp(kraus)?;
        ch.check_trace_preserving()?;
        Ok(Self {
            trace_preserving: true,
            ..ch
        })
    }

    /// Builds a completely positive map without requiring trace preservation.
    pub fn from_kraus_cp(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if kraus
            .iter()
            .any(|k| k.rows() != dim_out || k.cols() != dim_in)
        {
            return Err(Error::DimensionMismatch(
                "Kraus operators have different shapes".into(),
            ));
        }
        let choi = choi_from_kraus(&kraus, dim_in, dim_out);
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            choi,
            trace_preserving: false,
        })
    }

    /// Recovers a minimal Kraus list from a Choi matrix, cutting eigenvalues below 1e-10·λmax.
    pub fn from_choi(choi: &CMat, dim_in: usize, dim_out: usize) -> Result<Self> {
        if choi.rows() != dim_in * dim_out || !choi.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix {}x{} does not match {dim_in}->{dim_out}",
                choi.rows(),
                choi.cols()
            )));
        }
        let eig = eigh(choi)?;
        let top = eig.max_eigenvalue().max(0.0);
        if eig.min_eigenvalue() < -CHANNEL_TOL * top.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "Choi matrix not PSD (eigenvalue {:e})",
                eig.min_eigenvalue()
            )));
        }
        let cut = DEFAULT_CLIP_REL * top;
        let mut kraus = Vec::new();
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam <= cut {
                continue;
            }
            let v = eig.vector(k);
            let s = lam.sqrt();
            kraus.push(CMat::from_fn(dim_out, dim_in, |a, i| {
                v[i * dim_out + a] * s
            }));
        }
        if kraus.is_empty() {
            kraus.push(CMat::zeros(dim_out, dim_in));
        }
        Self::from_kraus(kraus)
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(vec![CMat::identity(d)]).expect("identity is CPTP")
    }

    /// Unitary or isometric channel X ↦ V X V†.
    pub fn isometry(v: CMat) -> Result<Self> {
        Self::from_kraus(vec![v])
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Environment dimension of the Stinespring dilation built from the Kraus list.
    pub fn dim_env(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn choi(&self) -> &CMat {
        &self.choi
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        assert_eq!(x.rows(), self.dim_in, "channel input dimension mismatch");
        let mut out = CMat::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += &k.matmul(x).matmul(&k.adjoint());
        }
        out
    }

    pub fn try_apply(&self, x: &CMat) -> Result<CMat> {
        if x.rows() != self.dim_in || !x.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "input {}x{} for channel with input dimension {}",
                x.rows(),
                x.cols(),
                self.dim_in
            )));
        }
        Ok(self.apply(x))
    }

    /// Heisenberg-picture dual N*(Y) = Σ K† Y K.
    pub fn apply_adjoint(&self, y: &CMat) -> CMat {
        assert_eq!(y.rows(), self.dim_out, "dual input dimension mismatch");
        let mut out = CMat::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += &k.adjoint().matmul(y).matmul(k);
        }
        out
    }

    /// Row-major superoperator matrix.
    pub fn superop(&self) -> CMat {
        superop_from_kraus(&self.kraus)
    }

    fn check_trace_preserving(&self) -> Result<()> {
        let mut s = CMat::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            s += &k.adjoint().matmul(k);
        }
        let dev = (&s - &CMat::identity(self.dim_in)).max_abs();
        if dev > CHANNEL_TOL {
            return Err(Error::InvalidParameter(format!(
                "not trace preserving (deviation {dev:e})"
            )));
        }
        Ok(())
    }

    /// Full CPTP validation against the Choi matrix.
    pub fn validate(&self) -> Result<()> {
        self.check_trace_preserving()?;
        let min = eigvalsh(&self.choi)?.last().copied().unwrap_or(0.0);
        if min < -CHANNEL_TOL {
            return Err(Error::InvalidParameter(format!(
                "Choi matrix has eigenvalue {min:e}"
            )));
        }
        let marg = partial_trace(&self.choi, &[self.dim_in, self.dim_out], &[0])?;
        let dev = (&marg - &CMat::identity(self.dim_in)).max_abs();
        if dev > CHANNEL_TOL {
            return Err(Error::InvalidParameter(format!(
                "Tr_out J deviates from identity by {dev:e}"
            )));
        }
        Ok(())
    }

    /// Re-derives a minimal Kraus list when the current one is longer than dim_in·dim_out.
    fn compressed(self) -> Result<Self> {
        if self.kraus.len() <= self.dim_in * self.dim_out {
            return Ok(self);
        }
        if self.trace_preserving {
            Self::from_choi(&self.choi, self.dim_in, self.dim_out)
        } else {
            Ok(self)
        }
    }

    /// Complementary channel onto the environment of the Stinespring isometry V = Σ_k K_k ⊗ |k⟩.
    pub fn complementary(&self) -> Result<Self> {
        let r = self.kraus.len();
        let kraus: Vec<CMat> = (0..self.dim_out)
            .map(|b| CMat::from_fn(r, self.dim_in, |k, i| self.kraus[k][(b, i)]))
            .collect();
        Self::from_kraus(kraus)
    }

    /// Stinespring isometry V: C^{d_in} → C^{d_out} ⊗ C^{d_env}.
    pub fn stinespring(&self) -> CMat {
        let r = self.kraus.len();
        CMat::from_fn(self.dim_out * r, self.dim_in, |row, i| {
            let (b, k) = (row / r, row % r);
            self.kraus[k][(b, i)]
        })
    }

    /// Applies the channel to one tensor factor of a multipartite operator.
    pub fn apply_to_factor(&self, x: &CMat, dims: &[usize], factor: usize) -> Result<CMat> {
        if dims[factor] != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "factor {factor} has dimension {} but channel input is {}",
                dims[factor], self.dim_in
            )));
        }
        let left: usize = dims[..factor].iter().product();
        let right: usize = dims[factor + 1..].iter().product();
        let kraus: Vec<CMat> = self
            .kraus
            .iter()
            .map(|k| CMat::identity(left).kron(k).kron(&CMat::identity(right)))
            .collect();
        let total: usize = dims.iter().product();
        if x.rows() != total {
            return Err(Error::DimensionMismatch(
                "operator does not match factor dimensions".into(),
            ));
        }
        let out_dim = left * self.dim_out * right;
        let mut out = CMat::zeros(out_dim, out_dim);
        for k in &kraus {
            out += &k.matmul(x).matmul(&k.adjoint());
        }
        Ok(out)
    }

    /// Applies id_R ⊗ N to an operator on R ⊗ A.
    pub fn apply_with_reference(&self, x: &CMat, dim_ref: usize) -> Result<CMat> {
        self.apply_to_factor(x, &[dim_ref, self.dim_in], 1)
    }
}

fn choi_from_kraus(kraus: &[CMat], dim_in: usize, dim_out: usize) -> CMat {
    let n = dim_in * dim_out;
    let mut j = CMat::zeros(n, n);
    for k in kraus {
        // |K⟩⟩ with entry (i·d_out + a) = K[a][i]
        let v: Vec<C64> = (0..n)
            .map(|idx| k[(idx % dim_out, idx / dim_out)])
            .collect();
        j += &CMat::outer(&v, &v);
    }
    j
}

/// A ∘ B: applies `b` first, then `a`.
pub fn compose(a: &QuantumChannel, b: &QuantumChannel) -> Result<QuantumChannel> {
    if a.dim_in != b.dim_out {
        return Err(Error::DimensionMismatch(format!(
            "compose: outer input {} vs inner output {}",
            a.dim_in, b.dim_out
        )));
    }
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(ka.matmul(kb));
        }
    }
    let ch = if a.trace_preserving && b.trace_preserving {
        QuantumChannel::from_kraus(kraus)?
    } else {
        QuantumChannel::from_kraus_cp(kraus)?
    };
    ch.compressed()
}

/// A ⊗ B acting on A_in ⊗ B_in.
pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> Result<QuantumChannel> {
    let mut kraus = Vec::with_capacity(a.kraus.len() * b.kraus.len());
    for ka in &a.kraus {
        for kb in &b.kraus {
            kraus.push(ka.kron(kb));
        }
    }
    let ch = if a.trace_preserving && b.trace_preserving {
        QuantumChannel::from_kraus(kraus)?
    } else {
        QuantumChannel::from_kraus_cp(kraus)?
    };
    ch.compressed()
}

/// n-fold tensor power.
pub fn tensor_power(a: &QuantumChannel, n: usize) -> Result<QuantumChannel> {
    let mut acc = a.clone();
    for _ in 1..n.max(1) {
        acc = tensor(&acc, a)?;
    }
    Ok(acc)
}

/// Convex mixture Σ w_i N_i of channels with equal dimensions.
pub fn mixture(weights: &[f64], channels: &[QuantumChannel]) -> Result<QuantumChannel> {
    if weights.len() != channels.len() || channels.is_empty() {
        return Err(Error::DimensionMismatch(
            "weights and channels differ in length".into(),
        ));
    }
    if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(
            "mixture weights must form a probability vector".into(),
        ));
    }
    let (di, dout) = (channels[0].dim_in, channels[0].dim_out);
    if channels.iter().any(|c| c.dim_in != di || c.dim_out != dout) {
        return Err(Error::DimensionMismatch(
            "mixture of channels with different dimensions".into(),
        ));
    }
    let mut kraus = Vec::new();
    for (w, c) in weights.iter().zip(channels) {
        if *w == 0.0 {
            continue;
        }
        for k in &c.kraus {
            kraus.push(k.scale_re(w.sqrt()));
        }
    }
    QuantumChannel::from_kraus(kraus)?.compressed()
}

/// Named channel families.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelFamily {
    Identity {
        dim: usize,
    },
    /// (1−p)ρ + p·I/d, CPTP for p ∈ [0, d²/(d²−1)].
    Depolarizing {
        dim: usize,
        p: f64,
    },
    /// (1−p)ρ + p ZρZ on a qubit.
    DephasingZ {
        p: f64,
    },
    /// (1−p)ρ + p XρX on a qubit.
    BitflipX {
        p: f64,
    },
    /// (1−ε)ρ ⊕ ε|e⟩⟨e| with the flag as the last basis vector.
    Erasure {
        dim: usize,
        eps: f64,
    },
    /// Erasure ε after Z-dephasing p on a qubit.
    Dephrasure {
        eps: f64,
        p: f64,
    },
    AmplitudeDamping {
        gamma: f64,
    },
    /// ρ ↦ τ Tr ρ.
    Replacer {
        dim_in: usize,
        tau: CMat,
    },
    /// ρ ↦ VρV† for an isometry V.
    Isometry {
        v: CMat,
    },
    /// Weyl-covariant channel on Z_n × Z_n with pmf table f (row-major in (a, b)).
    WeylAdditive {
        n: usize,
        pmf: Vec<f64>,
    },
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Identity { .. } => "identity",
            Self::Depolarizing { .. } => "depolarizing",
            Self::DephasingZ { .. } => "dephasing_z",
            Self::BitflipX { .. } => "bitflip_x",
            Self::Erasure { .. } => "erasure",
            Self::Dephrasure { .. } => "dephrasure",
            Self::AmplitudeDamping { .. } => "amplitude_damping",
            Self::Replacer { .. } => "replacer",
            Self::Isometry { .. } => "isometry",
            Self::WeylAdditive { .. } => "weyl_additive",
        }
    }
}

fn check_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if !(x >= lo && x <= hi) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {x} outside [{lo}, {hi}]"
        )));
    }
    Ok(())
}

pub fn pauli_x() -> CMat {
    CMat::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
}

pub fn pauli_y() -> CMat {
    CMat::new(
        2,
        2,
        vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
    )
    .unwrap()
}

pub fn pauli_z() -> CMat {
    CMat::diag(&[1.0, -1.0])
}

/// Erasure flag embedding of dimension d into d+1.
fn embedding(d: usize) -> CMat {
    CMat::from_fn(
        d + 1,
        d,
        |i, j| if i == j { c64(1.0, 0.0) } else { c64(0.0, 0.0) },
    )
}

pub fn build_channel(family: &ChannelFamily) -> Result<QuantumChannel> {
    match family {
        ChannelFamily::Identity { dim } => Ok(QuantumChannel::identity(*dim)),
        ChannelFamily::Depolarizing { dim, p } => {
            let d = *dim as f64;
            check_range("p", *p, 0.0, d * d / (d * d - 1.0))?;
            let n = dim * dim;
            let omega: Vec<C64> = (0..n)
                .map(|idx| {
                    if idx / dim == idx % dim {
                        c64(1.0, 0.0)
                    } else {
                        c64(0.0, 0.0)
                    }
                })
                .collect();
            let mut j = CMat::outer(&omega, &omega).scale_re(1.0 - p);
            j += &CMat::identity(n).scale_re(p / d);
            QuantumChannel::from_choi(&j, *dim, *dim)
        }
        ChannelFamily::DephasingZ { p } => pauli_mixture(*p, pauli_z()),
        ChannelFamily::BitflipX { p } => pauli_mixture(*p, pauli_x()),
        ChannelFamily::Erasure { dim, eps } => {
            check_range("eps", *eps, 0.0, 1.0)?;
            let d = *dim;
            let mut kraus = vec![embedding(d).scale_re((1.0 - eps).sqrt())];
            for i in 0..d {
                let mut k = CMat::zeros(d + 1, d);
                k[(d, i)] = c64(eps.sqrt(), 0.0);
                kraus.push(k);
            }
            if *eps == 0.0 {
                kraus.truncate(1);
            } else if *eps == 1.0 {
                kraus.remove(0);
            }
            QuantumChannel::from_kraus(kraus)
        }
        ChannelFamily::Dephrasure { eps, p } => {
            let e = build_channel(&ChannelFamily::Erasure { dim: 2, eps: *eps })?;
            let z = build_channel(&ChannelFamily::DephasingZ { p: *p })?;
            compose(&e, &z)
        }
        ChannelFamily::AmplitudeDamping { gamma } => {
            check_range("gamma", *gamma, 0.0, 1.0)?;
            let k0 = CMat::from_real(2, 2, &[1.0, 0.0, 0.0, (1.0 - gamma).sqrt()])?;
            let k1 = CMat::from_real(2, 2, &[0.0, gamma.sqrt(), 0.0, 0.0])?;
            QuantumChannel::from_kraus(vec![k0, k1])
        }
        ChannelFamily::Replacer { dim_in, tau } => {
            let tau = DensityMatrix::new(tau.clone())?;
            let e = eigh(&tau)?;
            let mut kraus = Vec::new();
            for (k, &lam) in e.eigenvalues.iter().enumerate() {
                if lam <= DEFAULT_CLIP_REL * e.max_eigenvalue() {
                    continue;
                }
                let v = e.vector(k);
                for i in 0..*dim_in {
                    let mut bra = vec![c64(0.0, 0.0); *dim_in];
                    bra[i] = c64(1.0, 0.0);
                    kraus.push(CMat::outer(&v, &bra).scale_re(lam.sqrt()));
                }
            }
            QuantumChannel::from_kraus(kraus)
        }
        ChannelFamily::Isometry { v } => QuantumChannel::isometry(v.clone()),
        ChannelFamily::WeylAdditive { n, pmf } => {
            let f = crate::weyl::PmfZnZn::new(*n, pmf.clone())?;
            crate::weyl::additive_channel(&f)
        }
    }
}

fn pauli_mixture(p: f64, pauli: CMat) -> Result<QuantumChannel> {
    check_range("p", p, 0.0, 1.0)?;
    let mut kraus = Vec::new();
    if p < 1.0 {
        kraus.push(CMat::identity(2).scale_re((1.0 - p).sqrt()));
    }
    if p > 0.0 {
        kraus.push(pauli.scale_re(p.sqrt()));
    }
    QuantumChannel::from_kraus(kraus)
}

/// Pauli transfer matrix T of a qubit channel: N(I + w·σ)/2 = (I + (t + T w)·σ)/2.
pub fn pauli_transfer(ch: &QuantumChannel) -> Result<([f64; 3], [[f64; 3]; 3])> {
    if ch.dim_in != 2 || ch.dim_out != 2 {
        return Err(Error::DimensionMismatch(
            "Pauli transfer matrix needs a qubit channel".into(),
        ));
    }
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let half_id = CMat::identity(2).scale_re(0.5);
    let n_id = ch.apply(&half_id);
    let mut t = [0.0; 3];
    for (i, p) in paulis.iter().enumerate() {
        t[i] = p.inner_re(&n_id);
    }
    let mut m = [[0.0; 3]; 3];
    for (j, pj) in paulis.iter().enumerate() {
        let out = ch.apply(&pj.scale_re(0.5));
        for (i, pi) in paulis.iter().enumerate() {
            m[i][j] = pi.inner_re(&out);
        }
    }
    Ok((t, m))
}
