use proptest::prelude::*;
use qsdpi::channels::*;
use qsdpi::divergences::von_neumann_entropy;
use qsdpi::numerics::{partial_trace, permute_subsystems};
use qsdpi::random::{random_density, random_kraus, random_pure_state, random_unitary, stream_rng};
use qsdpi::weyl::PmfZnZn;
use qsdpi::{c64, CMat};

fn erasure(d: usize, eps: f64) -> QuantumChannel {
    build_channel(&ChannelFamily::Erasure { dim: d, eps }).unwrap()
}

#[test]
fn erasure_zero_is_embedding() {
    let e = erasure(3, 0.0);
    assert_eq!(e.dim_out(), 4);
    let mut rng = stream_rng(1, 0);
    let rho = random_density(3, 3, &mut rng);
    let out = e.apply(&rho);
    let expect = rho.direct_sum(&CMat::zeros(1, 1));
    assert!(out.approx_eq(&expect, 1e-14));
}

#[test]
fn erasure_flag_is_last_basis_vector() {
    let e = erasure(2, 0.4);
    let out = e.apply(&CMat::basis_projector(2, 0));
    assert!((out[(2, 2)].re - 0.4).abs() < 1e-14);
    assert!((out[(0, 0)].re - 0.6).abs() < 1e-14);
}

#[test]
fn dephrasure_is_erasure_after_dephasing() {
    let d = build_channel(&ChannelFamily::Dephrasure { eps: 0.3, p: 0.2 }).unwrap();
    let e = erasure(2, 0.3);
    let z = build_channel(&ChannelFamily::DephasingZ { p: 0.2 }).unwrap();
    let c = compose(&e, &z).unwrap();
    assert!(d.choi().approx_eq(c.choi(), 1e-10));
}

#[test]
fn replacer_outputs_its_state() {
    let tau = CMat::identity(2).scale_re(0.5);
    let r = build_channel(&ChannelFamily::Replacer { dim_in: 2, tau: tau.clone() }).unwrap();
    let mut rng = stream_rng(2, 0);
    for _ in 0..5 {
        assert!(r.apply(&random_density(2, 1, &mut rng)).approx_eq(&tau, 1e-14));
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(matches!(
        build_channel(&ChannelFamily::Depolarizing { dim: 2, p: 1.5 }),
        Err(qsdpi::Error::InvalidParameter(_))
    ));
    assert!(build_channel(&ChannelFamily::Erasure { dim: 2, eps: -0.1 }).is_err());
    assert!(build_channel(&ChannelFamily::AmplitudeDamping { gamma: 1.2 }).is_err());
    // Depolarizing beyond p = 1 is still CPTP up to d²/(d²−1).
    assert!(build_channel(&ChannelFamily::Depolarizing { dim: 2, p: 4.0 / 3.0 }).is_ok());
}

#[test]
fn every_family_validates() {
    let mut rng = stream_rng(3, 0);
    let v = random_unitary(3, &mut rng);
    let fams = vec![
        ChannelFamily::Identity { dim: 3 },
        ChannelFamily::Depolarizing { dim: 3, p: 0.7 },
        ChannelFamily::DephasingZ { p: 0.1 },
        ChannelFamily::BitflipX { p: 0.9 },
        ChannelFamily::Erasure { dim: 4, eps: 0.5 },
        ChannelFamily::Dephrasure { eps: 0.1, p: 0.4 },
        ChannelFamily::AmplitudeDamping { gamma: 0.3 },
        ChannelFamily::Replacer { dim_in: 3, tau: random_density(2, 2, &mut rng) },
        ChannelFamily::Isometry { v },
        ChannelFamily::WeylAdditive { n: 3, pmf: PmfZnZn::uniform(3).table().to_vec() },
    ];
    for f in fams {
        build_channel(&f).unwrap().validate().unwrap_or_else(|e| panic!("{}: {e}", f.name()));
    }
}

#[test]
fn complement_of_unitary_is_rank_one() {
    let mut rng = stream_rng(4, 0);
    let u = QuantumChannel::isometry(random_unitary(3, &mut rng)).unwrap();
    let c = u.complementary().unwrap();
    assert_eq!(c.dim_out(), 1);
    for _ in 0..5 {
        let out = c.apply(&random_density(3, 2, &mut rng));
        assert!((out[(0, 0)].re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn erasure_complement_has_equal_entropies() {
    let e = erasure(2, 0.3);
    let c = e.complementary().unwrap();
    let e_comp = erasure(2, 0.7);
    let mut rng = stream_rng(5, 0);
    for _ in 0..10 {
        let rho = random_density(2, 2, &mut rng);
        let a = von_neumann_entropy(&c.apply(&rho)).unwrap();
        let b = von_neumann_entropy(&e_comp.apply(&rho)).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn entropy_exchange_for_amplitude_damping() {
    let ad = build_channel(&ChannelFamily::AmplitudeDamping { gamma: 0.3 }).unwrap();
    let c = ad.complementary().unwrap();
    let mut rng = stream_rng(6, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let psi = random_pure_state(2, &mut rng);
        let a = von_neumann_entropy(&ad.apply(&psi)).unwrap();
        let b = von_neumann_entropy(&c.apply(&psi)).unwrap();
        worst = worst.max((a - b).abs());
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn stinespring_reproduces_channel_and_complement() {
    let mut rng = stream_rng(7, 0);
    let ch = QuantumChannel::from_kraus(random_kraus(2, 3, 2, &mut rng)).unwrap();
    let v = ch.stinespring();
    let rho = random_density(2, 2, &mut rng);
    let big = v.matmul(&rho).matmul(&v.adjoint());
    let r = ch.dim_env();
    let b = partial_trace(&big, &[3, r], &[0]).unwrap();
    let e = partial_trace(&big, &[3, r], &[1]).unwrap();
    assert!(b.approx_eq(&ch.apply(&rho), 1e-12));
    assert!(e.approx_eq(&ch.complementary().unwrap().apply(&rho), 1e-12));
}

#[test]
fn composition_examples() {
    let mut rng = stream_rng(8, 0);
    let n = QuantumChannel::from_kraus(random_kraus(2, 3, 2, &mut rng)).unwrap();
    let c = compose(&QuantumChannel::identity(3), &n).unwrap();
    assert!(c.choi().approx_eq(n.choi(), 1e-12));
    let (a, b) = (0.2, 0.35);
    // The second erasure acts on the 3-dimensional output, flag included.
    let ea = erasure(2, a);
    let eb3 = erasure(3, b);
    // Both flags are sent to the single flag of the direct erasure.
    let merge = QuantumChannel::from_kraus(vec![
        CMat::from_fn(3, 4, |r, c| c64(if r == c { 1.0 } else { 0.0 }, 0.0)),
        CMat::unit(4, 2, 3).submatrix(0, 0, 3, 4),
    ])
    .unwrap();
    let composed = compose(&merge, &compose(&eb3, &ea).unwrap()).unwrap();
    let direct = erasure(2, a + b - a * b);
    assert!(composed.choi().approx_eq(direct.choi(), 1e-10));
    assert!(matches!(compose(&n, &n), Err(qsdpi::Error::DimensionMismatch(_))));
}

#[test]
fn tensor_with_replacer_factorizes() {
    let mut rng = stream_rng(9, 0);
    let n = QuantumChannel::from_kraus(random_kraus(2, 2, 3, &mut rng)).unwrap();
    let tau = random_density(2, 2, &mut rng);
    let r = build_channel(&ChannelFamily::Replacer { dim_in: 3, tau: tau.clone() }).unwrap();
    let t = tensor(&n, &r).unwrap();
    let rho = random_density(6, 4, &mut rng);
    let rho1 = partial_trace(&rho, &[2, 3], &[0]).unwrap();
    assert!(t.apply(&rho).approx_eq(&n.apply(&rho1).kron(&tau), 1e-10));
}

#[test]
fn tensor_is_associative_up_to_relabeling() {
    let mut rng = stream_rng(10, 0);
    let a = QuantumChannel::from_kraus(random_kraus(2, 2, 2, &mut rng)).unwrap();
    let b = QuantumChannel::from_kraus(random_kraus(2, 3, 2, &mut rng)).unwrap();
    let c = QuantumChannel::from_kraus(random_kraus(3, 2, 2, &mut rng)).unwrap();
    let left = tensor(&tensor(&a, &b).unwrap(), &c).unwrap();
    let right = tensor(&a, &tensor(&b, &c).unwrap()).unwrap();
    // Same input/output grouping, so the Choi matrices agree exactly.
    assert!(left.choi().approx_eq(right.choi(), 1e-12));
    // Choi of a⊗b with factors (in_a, in_b, out_a, out_b) permuted to (in_a, out_a, in_b, out_b)
    // is J_a ⊗ J_b.
    let ab = tensor(&a, &b).unwrap();
    let perm = permute_subsystems(ab.choi(), &[2, 2, 2, 3], &[0, 2, 1, 3]).unwrap();
    assert!(perm.approx_eq(&a.choi().kron(b.choi()), 1e-12));
}

#[test]
fn pauli_transfer_of_depolarizing() {
    let d = build_channel(&ChannelFamily::Depolarizing { dim: 2, p: 0.3 }).unwrap();
    let (t, m) = pauli_transfer(&d).unwrap();
    assert!(t.iter().all(|x| x.abs() < 1e-14));
    for i in 0..3 {
        for j in 0..3 {
            let e = if i == j { 0.7 } else { 0.0 };
            assert!((m[i][j] - e).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kraus_choi_round_trip(seed in 0u64..1_000_000, din in 1usize..=3, dout in 1usize..=3, k in 1usize..=4) {
        prop_assume!(k * dout >= din);
        let mut rng = stream_rng(seed, 0);
        let ch = QuantumChannel::from_kraus(random_kraus(din, dout, k, &mut rng)).unwrap();
        let back = QuantumChannel::from_choi(ch.choi(), din, dout).unwrap();
        prop_assert!(back.dim_env() <= din * dout);
        for _ in 0..20 {
            let rho = random_density(din, din, &mut rng);
            prop_assert!(back.apply(&rho).approx_eq(&ch.apply(&rho), 1e-10));
        }
    }

    #[test]
    fn outputs_are_states(seed in 0u64..1_000_000, d in 2usize..=4) {
        let mut rng = stream_rng(seed, 1);
        let ch = QuantumChannel::from_kraus(random_kraus(d, d, 2, &mut rng)).unwrap();
        let rho = random_density(d, 1, &mut rng);
        let out = ch.apply(&rho);
        prop_assert!(qsdpi::channels::DensityMatrix::new(out).is_ok());
    }
}
