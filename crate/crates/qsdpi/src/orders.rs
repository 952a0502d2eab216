//! Partial orders between channels: degradability certificates and searches for violations
//! of the less-noisy and more-capable families.
//!
//! Only degradability can be certified. Every other check is a falsifier: a positive gap at
//! an explicit witness disproves the order, while "undecided" just records the budget spent
//! and the largest gap seen.

use std::fmt;

use crate::channels::{tensor_power, QuantumChannel};
use crate::convex_opt::{diamond_distance, min_degrading_eps};
use crate::divergences::{eps_hat, eps_tilde, holevo_quantity, mutual_information, rel_ent};
use crate::error::{Error, Result};
use crate::optim::{multi_start, random_start, LocalOptions, StateParameterization};
use crate::{c64, CMat};

/// Gaps at or below this are treated as no violation.
pub const FALSIFY_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderKind {
    Deg,
    Ln,
    /// Less noisy for n-fold tensor powers.
    LnReg(usize),
    /// Completely less noisy with a reference of the given dimension.
    LnComplete(usize),
    LnFq,
    Mc,
    McFq,
    /// The order with the two channels exchanged.
    Anti(Box<OrderKind>),
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Deg => write!(f, "deg"),
            Self::Ln => write!(f, "ln"),
            Self::LnReg(n) => write!(f, "ln_reg({n})"),
            Self::LnComplete(r) => write!(f, "ln_complete({r})"),
            Self::LnFq => write!(f, "ln_fq"),
            Self::Mc => write!(f, "mc"),
            Self::McFq => write!(f, "mc_fq"),
            Self::Anti(k) => write!(f, "anti_{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderStatus {
    Certified,
    Falsified,
    Undecided,
}

impl fmt::Display for OrderStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Certified => "certified",
            Self::Falsified => "falsified",
            Self::Undecided => "undecided",
        })
    }
}

/// Input at which an order inequality was evaluated.
#[derive(Clone, Debug)]
pub enum Witness {
    /// D(N(ρ)‖N(σ)) − D(M(ρ)‖M(σ)).
    Pair { rho: CMat, sigma: CMat },
    /// χ of (N ⊗ id_R) minus χ of (M ⊗ id_R) for an ensemble on A ⊗ R.
    Ensemble {
        probs: Vec<f64>,
        states: Vec<CMat>,
        dim_ref: usize,
    },
    /// I(R:B')_N − I(R:B)_M for a state on R ⊗ A.
    Bipartite { state: CMat, dim_ref: usize },
}

#[derive(Clone, Debug)]
pub struct OrderVerdict {
    pub kind: OrderKind,
    pub status: OrderStatus,
    pub witness: Option<Witness>,
    /// Largest violation found (falsifiers) or the degrading distance (deg).
    pub gap: f64,
    pub eps: Option<f64>,
    pub trials: usize,
    pub restarts: usize,
    pub seed: u64,
    pub note: String,
}

/// The less-noisy family member a falsifier targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LnVariant {
    Ln,
    Fq,
    Mc,
    McFq,
}

impl LnVariant {
    pub fn kind(self) -> OrderKind {
        match self {
            Self::Ln => OrderKind::Ln,
            Self::Fq => OrderKind::LnFq,
            Self::Mc => OrderKind::Mc,
            Self::McFq => OrderKind::McFq,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ln" => Ok(Self::Ln),
            "fq" | "ln_fq" => Ok(Self::Fq),
            "mc" => Ok(Self::Mc),
            "mc_fq" => Ok(Self::McFq),
            other => Err(Error::UnknownKind(other.into())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FalsifyOptions {
    /// Random inputs sampled before any local search.
    pub trials: usize,
    /// Local searches started from the best samples.
    pub restarts: usize,
    pub seed: u64,
    pub local: LocalOptions,
    /// Ensemble size for the more-capable and complete searches.
    pub ensemble_size: Option<usize>,
}

impl Default for FalsifyOptions {
    fn default() -> Self {
        Self {
            trials: 200,
            restarts: 4,
            seed: 0,
            local: LocalOptions {
                ascent_evals: 2000,
                polish_evals: 500,
                ..Default::default()
            },
            ensemble_size: None,
        }
    }
}

/// Value of the order inequality at a witness: positive means N beats M there.
pub fn gap_at(m: &QuantumChannel, n: &QuantumChannel, w: &Witness) -> Result<f64> {
    match w {
        Witness::Pair { rho, sigma } => {
            let dn = rel_ent(&n.apply(rho), &n.apply(sigma))?;
            let dm = rel_ent(&m.apply(rho), &m.apply(sigma))?;
            Ok(match (dn.is_finite(), dm.is_finite()) {
                (true, true) => dn - dm,
                (false, true) => f64::INFINITY,
                (true, false) => f64::NEG_INFINITY,
                (false, false) => f64::NAN,
            })
        }
        Witness::Ensemble {
            probs,
            states,
            dim_ref,
        } => {
            let chi = |ch: &QuantumChannel| -> Result<f64> {
                let outs = states
                    .iter()
                    .map(|s| ch.apply_to_factor(s, &[ch.dim_in(), *dim_ref], 0))
                    .collect::<Result<Vec<_>>>()?;
                holevo_quantity(probs, &outs)
            };
            Ok(chi(n)? - chi(m)?)
        }
        Witness::Bipartite { state, dim_ref } => {
            let mi = |ch: &QuantumChannel| -> Result<f64> {
                let out = ch.apply_with_reference(state, *dim_ref)?;
                mutual_information(&out, [*dim_ref, ch.dim_out()])
            };
            Ok(mi(n)? - mi(m)?)
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Search {
    Pair,
    Ensemble {
        k: usize,
        dim_ref: usize,
        pure: bool,
        classical_ref: bool,
    },
    Bipartite {
        pure: bool,
    },
}

fn softmax(x: &[f64]) -> Vec<f64> {
    let mx = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = x.iter().map(|v| (v - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

fn pure_from(coords: &[f64]) -> CMat {
    let d = coords.len() / 2;
    let mut v: Vec<_> = (0..d).map(|i| c64(coords[i], coords[d + i])).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(norm > 1e-300) {
        v = (0..d).map(|i| c64(if i == 0 { 1.0 } else { 0.0 }, 0.0)).collect();
    } else {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    CMat::outer(&v, &v)
}

impl Search {
    fn n_coords(&self, d: usize) -> usize {
        match *self {
            Self::Pair => 4 * d * d,
            Self::Ensemble {
                k,
                dim_ref,
                pure,
                classical_ref,
            } => {
                let dd = d * dim_ref;
                let member = if pure {
                    2 * dd
                } else if classical_ref {
                    dim_ref + dim_ref * 2 * d * d
                } else {
                    2 * dd * dd
                };
                k + k * member
            }
            Self::Bipartite { pure } => {
                let dd = d * d;
                if pure {
                    2 * dd
                } else {
                    2 * dd * dd
                }
            }
        }
    }

    fn decode(&self, d: usize, x: &[f64]) -> Witness {
        match *self {
            Self::Pair => {
                let nc = 2 * d * d;
                Witness::Pair {
                    rho: StateParameterization::decode(d, &x[..nc]),
                    sigma: StateParameterization::decode(d, &x[nc..]),
                }
            }
            Self::Ensemble {
                k,
                dim_ref,
                pure,
                classical_ref,
            } => {
                let probs = softmax(&x[..k]);
                let dd = d * dim_ref;
                let mut states = Vec::with_capacity(k);
                let mut off = k;
                for _ in 0..k {
                    let s = if pure {
                        let s = pure_from(&x[off..off + 2 * dd]);
                        off += 2 * dd;
                        s
                    } else if classical_ref {
                        let q = softmax(&x[off..off + dim_ref]);
                        off += dim_ref;
                        let mut s = CMat::zeros(dd, dd);
                        for (r, qr) in q.iter().enumerate() {
                            let block = StateParameterization::decode(d, &x[off..off + 2 * d * d]);
                            off += 2 * d * d;
                            s += &block.kron(&CMat::basis_projector(dim_ref, r)).scale_re(*qr);
                        }
                        s
                    } else {
                        let s = StateParameterization::decode(dd, &x[off..off + 2 * dd * dd]);
                        off += 2 * dd * dd;
                        s
                    };
                    states.push(s);
                }
                Witness::Ensemble {
                    probs,
                    states,
                    dim_ref,
                }
            }
            Self::Bipartite { pure } => {
                let state = if pure {
                    pure_from(x)
                } else {
                    StateParameterization::decode(d * d, x)
                };
                Witness::Bipartite { state, dim_ref: d }
            }
        }
    }
}

fn pair_coords(rho: &CMat, sigma: &CMat) -> Option<Vec<f64>> {
    let mut x = StateParameterization::from_state(rho).ok()?.coords;
    x.extend(StateParameterization::from_state(sigma).ok()?.coords);
    Some(x)
}

fn run_search(
    m: &QuantumChannel,
    n: &QuantumChannel,
    kind: OrderKind,
    search: Search,
    extra_starts: Vec<Vec<f64>>,
    opts: &FalsifyOptions,
) -> Result<OrderVerdict> {
    if m.dim_in() != n.dim_in() {
        return Err(Error::DimensionMismatch(
            "channels have different inputs".into(),
        ));
    }
    let d = m.dim_in();
    let nc = search.n_coords(d);
    let f = |x: &[f64]| -> f64 {
        gap_at(m, n, &search.decode(d, x)).unwrap_or(f64::NAN)
    };
    // Monte-Carlo sampling first, then local searches from the best samples.
    let mut samples: Vec<(f64, usize, Vec<f64>)> = (0..opts.trials)
        .map(|t| {
            let x = random_start(nc, opts.seed, t as u64);
            let v = f(&x);
            (if v.is_nan() { f64::NEG_INFINITY } else { v }, t, x)
        })
        .collect();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut best_val = f64::NEG_INFINITY;
    let mut best_x: Option<Vec<f64>> = None;
    if let Some((v, _, x)) = samples.first() {
        best_val = *v;
        best_x = Some(x.clone());
    }
    let mut starts: Vec<Vec<f64>> = extra_starts;
    starts.extend(samples.iter().take(opts.restarts).map(|s| s.2.clone()));
    if let Some((_, o, _)) = multi_start(&f, &starts, &opts.local) {
        if o.value > best_val || best_x.is_none() {
            best_x = Some(o.x);
        }
    }
    let Some(x) = best_x else {
        return Ok(OrderVerdict {
            kind,
            status: OrderStatus::Undecided,
            witness: None,
            gap: f64::NEG_INFINITY,
            eps: None,
            trials: opts.trials,
            restarts: opts.restarts,
            seed: opts.seed,
            note: "empty search budget".into(),
        });
    };
    let witness = search.decode(d, &x);
    let gap = gap_at(m, n, &witness)?;
    let status = if gap > FALSIFY_THRESHOLD {
        OrderStatus::Falsified
    } else {
        OrderStatus::Undecided
    };
    Ok(OrderVerdict {
        kind,
        status,
        witness: Some(witness),
        gap,
        eps: None,
        trials: opts.trials,
        restarts: opts.restarts,
        seed: opts.seed,
        note: String::new(),
    })
}

fn variant_search(variant: LnVariant, d: usize, opts: &FalsifyOptions) -> Search {
    match variant {
        LnVariant::Ln => Search::Pair,
        LnVariant::Fq => Search::Bipartite { pure: false },
        LnVariant::Mc => Search::Ensemble {
            k: opts.ensemble_size.unwrap_or(d * d),
            dim_ref: 1,
            pure: true,
            classical_ref: false,
        },
        LnVariant::McFq => Search::Bipartite { pure: true },
    }
}

/// Searches for an input where N carries more information than M, disproving M ⪰ N.
pub fn falsify_less_noisy(
    m: &QuantumChannel,
    n: &QuantumChannel,
    variant: LnVariant,
    opts: &FalsifyOptions,
) -> Result<OrderVerdict> {
    let search = variant_search(variant, m.dim_in(), opts);
    run_search(m, n, variant.kind(), search, Vec::new(), opts)
}

/// The anti order: the same search with the roles of M and N exchanged.
pub fn falsify_anti(
    m: &QuantumChannel,
    n: &QuantumChannel,
    variant: LnVariant,
    opts: &FalsifyOptions,
) -> Result<OrderVerdict> {
    let mut v = falsify_less_noisy(n, m, variant, opts)?;
    v.kind = OrderKind::Anti(Box::new(v.kind));
    Ok(v)
}

/// Largest tensor power the regularized check accepts.
pub const MAX_REG_POWER: usize = 3;

/// Runs the less-noisy falsifier on M^⊗k versus N^⊗k for k = 1..=n_max.
///
/// A witness (ρ, σ) found at k−1 is lifted to (ρ ⊗ I/d, σ ⊗ I/d) as a start at k, which
/// reproduces the same gap, so a falsification never disappears as k grows.
pub fn check_regularized_ln(
    m: &QuantumChannel,
    n: &QuantumChannel,
    n_max: usize,
    opts: &FalsifyOptions,
) -> Result<Vec<OrderVerdict>> {
    if n_max > MAX_REG_POWER {
        return Err(Error::DimensionTooLarge(format!(
            "tensor power {n_max} exceeds {MAX_REG_POWER}"
        )));
    }
    let d = m.dim_in();
    let dout = m.dim_out().max(n.dim_out());
    if d.pow(n_max as u32) > 8 || dout.pow(n_max as u32) > 27 {
        return Err(Error::DimensionTooLarge(format!(
            "{n_max} copies of a {d}->{dout} channel"
        )));
    }
    let mut out: Vec<OrderVerdict> = Vec::new();
    for k in 1..=n_max {
        let mk = tensor_power(m, k)?;
        let nk = tensor_power(n, k)?;
        let mut extra = Vec::new();
        if let Some(Witness::Pair { rho, sigma }) = out.last().and_then(|v| v.witness.clone()) {
            let mix = CMat::identity(d).scale_re(1.0 / d as f64);
            if let Some(x) = pair_coords(&rho.kron(&mix), &sigma.kron(&mix)) {
                extra.push(x);
            }
        }
        let mut v = run_search(&mk, &nk, OrderKind::LnReg(k), Search::Pair, extra, opts)?;
        if let Some(prev) = out.last() {
            if prev.status == OrderStatus::Falsified && v.status != OrderStatus::Falsified {
                return Err(Error::NumericalFailure(format!(
                    "lifted witness lost its violation at n = {k}"
                )));
            }
        }
        v.note = format!("{k} copies");
        out.push(v);
    }
    Ok(out)
}

/// Falsifier for the completely less noisy order at a fixed reference dimension.
///
/// With `classical_ref` the reference is restricted to diagonal states, which makes the
/// order equivalent to plain less noisy. A trivial reference is exactly the plain order.
pub fn check_complete_ln(
    m: &QuantumChannel,
    n: &QuantumChannel,
    dim_ref: usize,
    classical_ref: bool,
    opts: &FalsifyOptions,
) -> Result<OrderVerdict> {
    if dim_ref == 0 {
        return Err(Error::InvalidParameter("reference dimension must be positive".into()));
    }
    let kind = OrderKind::LnComplete(dim_ref);
    let mut v = if dim_ref == 1 {
        let mut v = falsify_less_noisy(m, n, LnVariant::Ln, opts)?;
        v.kind = kind;
        v
    } else {
        let search = Search::Ensemble {
            k: opts.ensemble_size.unwrap_or(2),
            dim_ref,
            pure: false,
            classical_ref,
        };
        run_search(m, n, kind, search, Vec::new(), opts)?
    };
    v.note = format!(
        "at reference dimension {dim_ref}{}",
        if classical_ref { " (classical reference)" } else { "" }
    );
    Ok(v)
}

/// Certifies M ⪰_deg N when the minimal degrading distance is at most `tol`.
pub fn check_degradable(m: &QuantumChannel, n: &QuantumChannel, tol: f64) -> Result<OrderVerdict> {
    let fit = min_degrading_eps(m, n)?;
    let status = if fit.eps <= tol {
        OrderStatus::Certified
    } else {
        OrderStatus::Falsified
    };
    Ok(OrderVerdict {
        kind: OrderKind::Deg,
        status,
        witness: None,
        gap: fit.eps,
        eps: Some(fit.eps),
        trials: 0,
        restarts: 0,
        seed: 0,
        note: format!("min over channels Θ of ‖N − Θ∘M‖⋄ = {:.6e}", fit.eps),
    })
}

/// ε levels implied by approximate degradability and by diamond-norm closeness.
#[derive(Clone, Debug)]
pub struct ApproxOrderReport {
    /// min over Θ of ‖N − Θ∘M‖⋄.
    pub eps_deg: f64,
    /// Output dimension of N.
    pub dim_b: usize,
    /// Completely less noisy level 2ε ln|B| + (2+ε)h(ε/(2+ε)).
    pub eps_tilde: f64,
    /// Fully quantum less noisy level.
    pub eps_hat: f64,
    /// ‖M − N‖⋄ when both act between the same spaces.
    pub diamond: Option<f64>,
    /// Comparable completely-less-noisy level from the diamond distance.
    pub comparable_eps: Option<f64>,
}

impl ApproxOrderReport {
    /// Implication chains with the numeric levels filled in.
    pub fn chain(&self) -> Vec<String> {
        let t = self.eps_tilde;
        let h = self.eps_hat;
        let mut lines = vec![
            format!(
                "||N - Theta o M||_diamond <= {:.6} => M >=_c-ln^{t:.6} N => M >=_reg-ln^{t:.6} N => M >=_ln^{t:.6} N",
                self.eps_deg
            ),
            format!(
                "||N - Theta o M||_diamond <= {:.6} => M >=_fq-ln^{h:.6} N => M >=_ln^{h:.6} N",
                self.eps_deg
            ),
        ];
        if let (Some(dd), Some(c)) = (self.diamond, self.comparable_eps) {
            lines.push(format!(
                "||M - N||_diamond <= {dd:.6} => M, N comparably {c:.6}-completely less noisy"
            ));
        }
        lines
    }
}

pub fn approx_orders_from_diamond(m: &QuantumChannel, n: &QuantumChannel) -> Result<ApproxOrderReport> {
    let fit = min_degrading_eps(m, n)?;
    let dim_b = n.dim_out();
    if dim_b < 2 {
        return Err(Error::InvalidParameter(
            "output dimension must be at least 2".into(),
        ));
    }
    let eps = fit.eps.min(1.0);
    let same = m.dim_in() == n.dim_in() && m.dim_out() == n.dim_out();
    let diamond = if same {
        Some(diamond_distance(m, n)?)
    } else {
        None
    };
    let comparable_eps = match diamond {
        Some(dd) if dd <= 1.0 => Some(eps_tilde(dd, dim_b)?),
        _ => None,
    };
    Ok(ApproxOrderReport {
        eps_deg: fit.eps,
        dim_b,
        eps_tilde: eps_tilde(eps, dim_b)?,
        eps_hat: eps_hat(eps, dim_b)?,
        diamond,
        comparable_eps,
    })
}
