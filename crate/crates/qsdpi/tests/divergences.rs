use std::f64::consts::LN_2;

use proptest::prelude::*;
use qsdpi::channels::{build_channel, ChannelFamily, QuantumChannel};
use qsdpi::divergences::*;
use qsdpi::numerics::powm_support;
use qsdpi::random::{random_density, random_full_rank_density, random_kraus, random_pure_state, stream_rng};
use qsdpi::{c64, CMat};

fn ket_plus() -> CMat {
    CMat::from_fn(2, 2, |_, _| c64(0.5, 0.0))
}

fn bell() -> CMat {
    let mut m = CMat::zeros(4, 4);
    for &i in &[0usize, 3] {
        for &j in &[0usize, 3] {
            m[(i, j)] = c64(0.5, 0.0);
        }
    }
    m
}

fn erasure(d: usize, eps: f64) -> QuantumChannel {
    build_channel(&ChannelFamily::Erasure { dim: d, eps }).unwrap()
}

#[test]
fn entropy_examples() {
    assert!((von_neumann_entropy(&CMat::identity(2).scale_re(0.5)).unwrap() - LN_2).abs() < 1e-12);
    assert!((mutual_information(&bell(), [2, 2]).unwrap() - 2.0 * LN_2).abs() < 1e-10);
    assert!((conditional_entropy(&bell(), [2, 2]).unwrap() + LN_2).abs() < 1e-10);
}

#[test]
fn cq_mutual_information_matches_ensemble_sum() {
    let states = [CMat::basis_projector(2, 0), ket_plus()];
    let rho = cq_state(&[0.5, 0.5], &states);
    let i = mutual_information(&rho, [2, 2]).unwrap();
    let avg = &states[0].scale_re(0.5) + &states[1].scale_re(0.5);
    let oracle: f64 = states.iter().map(|s| 0.5 * rel_ent(s, &avg).unwrap()).sum();
    assert!((i - oracle).abs() < 1e-9, "{i} vs {oracle}");
    assert!((holevo_quantity(&[0.5, 0.5], &states).unwrap() - i).abs() < 1e-10);
}

#[test]
fn mutual_information_is_relative_entropy_to_product() {
    let mut rng = stream_rng(11, 0);
    for _ in 0..10 {
        let rho = random_density(6, 3, &mut rng);
        let ra = qsdpi::numerics::partial_trace(&rho, &[2, 3], &[0]).unwrap();
        let rb = qsdpi::numerics::partial_trace(&rho, &[2, 3], &[1]).unwrap();
        let d = rel_ent(&rho, &ra.kron(&rb)).unwrap();
        assert!((mutual_information(&rho, [2, 3]).unwrap() - d).abs() < 1e-8);
    }
}

#[test]
fn relative_entropy_examples() {
    let mut rng = stream_rng(12, 0);
    let r = random_density(3, 2, &mut rng);
    assert!(rel_ent(&r, &r).unwrap().abs() < 1e-10);
    let v = rel_ent(&CMat::basis_projector(2, 0), &CMat::identity(2).scale_re(0.5)).unwrap();
    assert!((v - LN_2).abs() < 1e-12);
    let e = erasure(2, 0.5);
    let a = e.apply(&CMat::identity(2).scale_re(0.5));
    let b = e.apply(&CMat::basis_projector(2, 1));
    let d = relative_entropy(&a, &b, SupportPolicy::Strict).unwrap();
    assert!(d.value.is_infinite() && !d.support_ok);
}

#[test]
fn regularized_policy_is_finite_and_flags_residual() {
    let d = relative_entropy(&CMat::basis_projector(2, 0), &CMat::basis_projector(2, 1), SupportPolicy::Regularized)
        .unwrap();
    assert!(d.value.is_finite() && d.value > 20.0);
    assert!(!d.support_ok && (d.residual - 1.0).abs() < 1e-12);
}

#[test]
fn relative_entropy_matches_trace_formula() {
    let mut rng = stream_rng(13, 0);
    for _ in 0..10 {
        let r = random_density(3, 3, &mut rng);
        let s = random_full_rank_density(3, &mut rng);
        let ln_r = qsdpi::numerics::logm_support(&r).unwrap();
        let ln_s = qsdpi::numerics::logm_support(&s).unwrap();
        let oracle = r.trace_product(&(&ln_r - &ln_s)).re;
        assert!((rel_ent(&r, &s).unwrap() - oracle).abs() < 1e-9);
    }
}

#[test]
fn spectral_pair_overlap_is_doubly_stochastic() {
    let mut rng = stream_rng(14, 0);
    let p = SpectralPair::new(&random_density(4, 2, &mut rng), &random_density(4, 4, &mut rng)).unwrap();
    assert!(p.stochasticity_error() < 1e-9);
}

#[test]
fn sandwiched_examples_and_limits() {
    let mut rng = stream_rng(15, 0);
    let r = random_density(2, 2, &mut rng);
    assert!(sandwiched_renyi(&r, &r, 2.0).unwrap().value.abs() < 1e-10);
    let v = sandwiched_renyi(&CMat::basis_projector(2, 0), &CMat::identity(2).scale_re(0.5), 2.0).unwrap();
    assert!((v.value - LN_2).abs() < 1e-10);
    for _ in 0..10 {
        let r = random_density(3, 3, &mut rng);
        let s = random_full_rank_density(3, &mut rng);
        let d = rel_ent(&r, &s).unwrap();
        for p in [1.0 - 1e-4, 1.0 + 1e-4] {
            assert!((sandwiched_renyi(&r, &s, p).unwrap().value - d).abs() < 1e-3);
        }
    }
    assert!(matches!(
        sandwiched_renyi(&CMat::basis_projector(2, 0), &CMat::basis_projector(2, 1), 2.0),
        Err(qsdpi::Error::SupportViolation(_))
    ));
    assert!(sandwiched_renyi(&r, &r, 1.0).is_err());
}

#[test]
fn sandwiched_is_monotone_in_order() {
    let mut rng = stream_rng(16, 0);
    for _ in 0..50 {
        let r = random_density(2, 2, &mut rng);
        let s = random_full_rank_density(2, &mut rng);
        let v: Vec<f64> = [1.5, 2.0, 3.0].iter().map(|&p| sandwiched_renyi(&r, &s, p).unwrap().value).collect();
        assert!(v[0] <= v[1] + 1e-10 && v[1] <= v[2] + 1e-10, "{v:?}");
    }
}

#[test]
fn weighted_norm_examples() {
    let mut rng = stream_rng(17, 0);
    for p in [0.5, 1.0, 2.0, 3.5] {
        let s = random_full_rank_density(3, &mut rng);
        assert!((weighted_norm(&CMat::identity(3), p, &s).unwrap() - 1.0).abs() < 1e-10);
    }
    for _ in 0..10 {
        let r = random_density(3, 2, &mut rng);
        let s = random_full_rank_density(3, &mut rng);
        let isq = powm_support(&s, -0.5).unwrap();
        let x = isq.matmul(&r).matmul(&isq);
        let n = weighted_norm(&x, 2.0, &s).unwrap();
        let d2 = sandwiched_renyi(&r, &s, 2.0).unwrap().value;
        assert!((2.0 * n.ln() - d2).abs() < 1e-9);
        let c = c64(-1.7, 0.4);
        let lhs = weighted_norm(&x.scale(c), 2.5, &s).unwrap();
        assert!((lhs - c.norm() * weighted_norm(&x, 2.5, &s).unwrap()).abs() < 1e-9 * lhs.max(1.0));
        let y = random_density(3, 3, &mut rng);
        let tri = weighted_norm(&(&x + &y), 2.0, &s).unwrap();
        assert!(tri <= n + weighted_norm(&y, 2.0, &s).unwrap() + 1e-10);
    }
    assert!(matches!(
        weighted_norm(&CMat::identity(2), 2.0, &CMat::basis_projector(2, 0)),
        Err(qsdpi::Error::SingularSigma(_))
    ));
}

#[test]
fn f_divergence_classical_examples() {
    let r = CMat::diag(&[0.7, 0.3]);
    let s = CMat::diag(&[0.5, 0.5]);
    let kl = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.5).ln();
    for variant in [FVariant::Standard, FVariant::Maximal] {
        let v = f_divergence(&r, &s, ConvexFunction::XLogX, variant).unwrap().value;
        assert!((v - kl).abs() < 1e-12);
        assert!((v - 0.0823).abs() < 1e-4);
        let c = f_divergence(&r, &s, ConvexFunction::ChiSquare, variant).unwrap().value;
        assert!((c - 0.16).abs() < 1e-12);
    }
    for f in [ConvexFunction::XLogX, ConvexFunction::ChiSquare, ConvexFunction::Hellinger(0.5)] {
        assert!(f.eval(1.0).abs() < 1e-15);
        assert!(f_divergence(&r, &r, f, FVariant::Standard).unwrap().value.abs() < 1e-12);
    }
}

#[test]
fn standard_x_log_x_is_relative_entropy_and_maximal_dominates() {
    let mut rng = stream_rng(18, 0);
    for _ in 0..20 {
        let r = random_density(3, 3, &mut rng);
        let s = random_full_rank_density(3, &mut rng);
        let st = f_divergence(&r, &s, ConvexFunction::XLogX, FVariant::Standard).unwrap().value;
        assert!((st - rel_ent(&r, &s).unwrap()).abs() < 1e-9);
        for f in [ConvexFunction::XLogX, ConvexFunction::ChiSquare, ConvexFunction::Hellinger(0.5)] {
            let a = f_divergence(&r, &s, f, FVariant::Standard).unwrap().value;
            let b = f_divergence(&r, &s, f, FVariant::Maximal).unwrap().value;
            assert!(b >= a - 1e-9, "{f:?}: {b} < {a}");
        }
    }
}

#[test]
fn kernel_axioms() {
    for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let k = KernelFunction::new(alpha).unwrap();
        assert!((k.eval(1.0) - 1.0).abs() < 1e-15);
        for w in [0.01, 0.3, 1.7, 9.0, 120.0] {
            assert!((k.eval(1.0 / w) - w * k.eval(w)).abs() < 1e-12 * w.max(1.0));
        }
    }
    assert!(KernelFunction::new(1.5).is_err());
}

#[test]
fn chi2_examples() {
    let r = CMat::diag(&[0.7, 0.3]);
    let s = CMat::diag(&[0.5, 0.5]);
    let mut rng = stream_rng(19, 0);
    for alpha in [0.0, 0.25, 0.5, 1.0] {
        let k = KernelFunction::new(alpha).unwrap();
        assert!((chi2_divergence(&r, &s, k).unwrap().value - 0.16).abs() < 1e-12);
        let sig = random_full_rank_density(3, &mut rng);
        assert!(chi2_divergence(&sig, &sig, k).unwrap().value.abs() < 1e-14);
    }
    let k0 = KernelFunction::new(0.0).unwrap();
    let kh = KernelFunction::new(0.5).unwrap();
    for _ in 0..50 {
        let r = random_density(2, 2, &mut rng);
        let s = random_full_rank_density(2, &mut rng);
        assert!(chi2_divergence(&r, &s, k0).unwrap().value >= chi2_divergence(&r, &s, kh).unwrap().value - 1e-12);
    }
    let inf = chi2_divergence(&CMat::identity(2).scale_re(0.5), &CMat::basis_projector(2, 0), k0).unwrap();
    assert!(inf.value.is_infinite());
}

#[test]
fn scalar_bounds() {
    assert_eq!(eps_tilde(0.0, 5).unwrap(), 0.0);
    let v = eps_tilde(0.1, 2).unwrap();
    let oracle = 0.2 * LN_2 + 2.1 * binary_entropy(0.1 / 2.1);
    assert!((v - oracle).abs() < 1e-14);
    assert!((v - 0.5407).abs() < 1e-4);
    for d in [2usize, 3, 7] {
        assert!((audenaert_bound(1.0, d).unwrap() - (d as f64 - 1.0).ln()).abs() < 1e-14);
    }
    assert!((binary_entropy(0.5) - LN_2).abs() < 1e-15);
    assert!(eps_hat(0.1, 2).unwrap() > 0.0);
    assert!(afw_bound(0.0, 3).unwrap() == 0.0);
    assert!(matches!(eps_tilde(1.2, 2), Err(qsdpi::Error::OutOfRange(_))));
    assert!(audenaert_bound(-0.1, 2).is_err());
}

#[test]
fn min_entropy_of_classical_copy_is_zero() {
    let rho = cq_state(&[0.5, 0.5], &[CMat::basis_projector(2, 0), CMat::basis_projector(2, 1)]);
    assert!(h_min(&rho, [2, 2]).unwrap().abs() < 1e-7);
}

#[test]
fn two_point_cq_embedding() {
    let mut rng = stream_rng(20, 0);
    let r = random_density(2, 2, &mut rng);
    let s = random_full_rank_density(2, &mut rng);
    for f in [ConvexFunction::XLogX, ConvexFunction::ChiSquare] {
        let dfull = f_divergence(&r, &s, f, FVariant::Standard).unwrap().value;
        let info = |lam: f64| {
            let r1 = (&s - &r.scale_re(lam)).scale_re(1.0 / (1.0 - lam));
            let cq = cq_state(&[lam, 1.0 - lam], &[r.clone(), r1.clone()]);
            let prod = CMat::diag(&[lam, 1.0 - lam]).kron(&s);
            let i = f_divergence(&cq, &prod, f, FVariant::Standard).unwrap().value;
            let split = lam * dfull + (1.0 - lam) * f_divergence(&r1, &s, f, FVariant::Standard).unwrap().value;
            (i, split)
        };
        for lam in [0.05, 0.01] {
            let (i, split) = info(lam);
            assert!((i - split).abs() < 1e-9);
        }
        let (i3, _) = info(1e-3);
        let (i4, _) = info(1e-4);
        // First-order Richardson extrapolation of I_f/λ to λ = 0.
        let (g3, g4) = (i3 / 1e-3, i4 / 1e-4);
        let extrap = (10.0 * g4 - g3) / 9.0;
        assert!((extrap - dfull).abs() < 1e-4, "{extrap} vs {dfull}");
    }
}

#[test]
fn erasure_scales_f_divergences() {
    let mut rng = stream_rng(21, 0);
    let e = erasure(3, 0.35);
    for _ in 0..5 {
        let r = random_density(3, 2, &mut rng);
        let s = random_full_rank_density(3, &mut rng);
        for f in [ConvexFunction::XLogX, ConvexFunction::ChiSquare, ConvexFunction::Hellinger(0.5)] {
            for variant in [FVariant::Standard, FVariant::Maximal] {
                let a = f_divergence(&e.apply(&r), &e.apply(&s), f, variant).unwrap().value;
                let b = f_divergence(&r, &s, f, variant).unwrap().value;
                assert!((a - 0.65 * b).abs() < 1e-9, "{f:?} {variant:?}");
            }
        }
    }
}

#[test]
fn erasure_mutual_information_identity() {
    let mut rng = stream_rng(22, 0);
    for _ in 0..10 {
        let eps = 0.3;
        let states: Vec<CMat> = (0..3).map(|_| random_density(4, 2, &mut rng)).collect();
        let probs = [0.2, 0.5, 0.3];
        let cq = cq_state(&probs, &states);
        let e = erasure(2, eps);
        let out = e.apply_to_factor(&cq, &[3, 2, 2], 1).unwrap();
        let lhs = mutual_information(&out, [3, 6]).unwrap();
        let i_ab = mutual_information(&cq, [3, 4]).unwrap();
        let ub = qsdpi::numerics::partial_trace(&cq, &[3, 2, 2], &[0, 2]).unwrap();
        let i_b = mutual_information(&ub, [3, 2]).unwrap();
        assert!((lhs - ((1.0 - eps) * i_ab + eps * i_b)).abs() < 1e-8);
    }
}

fn random_setup(seed: u64, d: usize) -> (QuantumChannel, CMat, CMat) {
    let mut rng = stream_rng(seed, 0);
    let n_kraus = 1 + (seed as usize % 3);
    let ch = QuantumChannel::from_kraus(random_kraus(d, d, n_kraus, &mut rng)).unwrap();
    let rho = if seed % 2 == 0 { random_pure_state(d, &mut rng) } else { random_density(d, d, &mut rng) };
    let sigma = random_full_rank_density(d, &mut rng);
    (ch, rho, sigma)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn data_processing(seed in 0u64..1_000_000, d in 2usize..=4) {
        let (ch, r, s) = random_setup(seed, d);
        let (nr, ns) = (ch.apply(&r), ch.apply(&s));
        prop_assert!(rel_ent(&nr, &ns).unwrap() <= rel_ent(&r, &s).unwrap() + 1e-8);
        let d2 = |a: &CMat, b: &CMat| sandwiched_renyi(a, b, 2.0).unwrap().value;
        prop_assert!(d2(&nr, &ns) <= d2(&r, &s) + 1e-8);
        for f in [ConvexFunction::XLogX, ConvexFunction::ChiSquare] {
            let a = f_divergence(&nr, &ns, f, FVariant::Standard).unwrap().value;
            let b = f_divergence(&r, &s, f, FVariant::Standard).unwrap().value;
            prop_assert!(a <= b + 1e-8 * b.max(1.0));
        }
        for alpha in [0.0, 0.25, 0.5] {
            let k = KernelFunction::new(alpha).unwrap();
            let a = chi2_divergence(&nr, &ns, k).unwrap().value;
            let b = chi2_divergence(&r, &s, k).unwrap().value;
            prop_assert!(a <= b + 1e-8 * b.max(1.0), "alpha {}: {} > {}", alpha, a, b);
        }
    }

    #[test]
    fn entropy_in_range(seed in 0u64..1_000_000, d in 2usize..=5) {
        let mut rng = stream_rng(seed, 1);
        let r = random_density(d, 1 + seed as usize % d, &mut rng);
        let h = von_neumann_entropy(&r).unwrap();
        prop_assert!(h >= -1e-12 && h <= (d as f64).ln() + 1e-12);
    }
}
