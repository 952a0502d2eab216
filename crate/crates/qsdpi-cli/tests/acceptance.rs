//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the lines are printed even when output is captured.

use std::f64::consts::LN_2;
use std::path::Path;
use std::time::Instant;

use clap::Parser;
use qsdpi::capacities::{capacity_bounds, BoundKind};
use qsdpi::channels::{build_channel, compose, ChannelFamily, QuantumChannel};
use qsdpi::contraction::{closed_form_eta, estimate_eta, petz_recovery, EtaOptions};
use qsdpi::divergences::*;
use qsdpi::functional::{depolarizing_sdpi_constant, estimate_lsi, lsi_depolarizing, DirichletForm, SemigroupGenerator};
use qsdpi::gaussian::*;
use qsdpi::orders::{check_degradable, falsify_less_noisy, FalsifyOptions, LnVariant, OrderStatus};
use qsdpi::random::{random_density, random_full_rank_density, random_kraus, random_pure_state, stream_rng};
use qsdpi::weyl::*;
use qsdpi::CMat;
use qsdpi_cli::{run, Report, RunConfig};

type Check = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn cli(args: &[&str]) -> Result<Report, String> {
    let cfg = RunConfig::try_parse_from(std::iter::once("qsdpi").chain(args.iter().copied())).map_err(|e| e.to_string())?;
    run(&cfg).map_err(|e| e.to_string())
}

fn channel(f: ChannelFamily) -> QuantumChannel {
    build_channel(&f).expect("valid family")
}

/// Binary entropy in nats.
fn h(x: f64) -> f64 {
    let t = |y: f64| if y <= 0.0 { 0.0 } else { -y * y.ln() };
    t(x) + t(1.0 - x)
}

fn closed_form_suite() -> Check {
    let opts = EtaOptions::default();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut est = |f: ChannelFamily| -> Result<(f64, f64), String> {
        let e = ok(estimate_eta(&channel(f.clone()), Divergence::Relative, None, &opts))?.value_lower;
        let c = ok(closed_form_eta(&f))?;
        worst_excess = worst_excess.max(e - c);
        Ok((e, c))
    };
    let mut dep_err = 0.0f64;
    for p in [0.1, 0.3, 0.5, 0.7] {
        let (e, _) = est(ChannelFamily::Depolarizing { dim: 2, p })?;
        dep_err = dep_err.max((e - (1.0 - p) * (1.0 - p)).abs());
    }
    let mut er_err = 0.0f64;
    for eps in [0.2, 0.5, 0.8] {
        let (e, _) = est(ChannelFamily::Erasure { dim: 2, eps })?;
        er_err = er_err.max((e - (1.0 - eps)).abs());
    }
    let mut deph = f64::INFINITY;
    for p in [0.2, 0.5] {
        deph = deph.min(est(ChannelFamily::DephasingZ { p })?.0);
    }
    ensure!(dep_err <= 1e-2, "depolarizing error {dep_err:.3e}");
    ensure!(er_err <= 1e-3, "erasure error {er_err:.3e}");
    ensure!(deph >= 0.999, "dephasing estimate {deph}");
    ensure!(worst_excess <= 1e-6, "estimate above closed form by {worst_excess:.3e}");
    Ok(format!(
        "depolarizing err {dep_err:.1e}, erasure err {er_err:.1e}, dephasing min {deph:.6}, max excess {worst_excess:.1e}"
    ))
}

fn figure2_suite(dir: &Path) -> Check {
    let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
    let r = cli(&["figure2", "--p-grid", "0,0.25,0.5,0.75,1"])?;
    let table = r.table.as_ref().ok_or("figure2 has no table")?;
    let col = |name: &str| table.column(name).ok_or(format!("missing column {name}"));
    let (ps, lower, tight, uloose, lloose) = (col("p")?, col("lower")?, col("upper_tight")?, col("upper_loose")?, col("lower_loose")?);
    let mut worst = 0.0f64;
    for (i, &p) in grid.iter().enumerate() {
        let q = (1.0 - p) * (1.0 - p);
        let want = [
            p,
            (LN_2 - 0.5 * h(p / 2.0)) / LN_2,
            0.5 * (1.0 + q),
            1.5 * q.max(0.5),
            q.max(0.5),
        ];
        let got = [ps[i], lower[i], tight[i], uloose[i], lloose[i]];
        for (a, b) in want.iter().zip(&got) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure!(worst <= 1e-12, "figure2 deviates by {worst:.3e}");
    ensure!((lower[2] - 0.5943609377704336).abs() <= 1e-12 && tight[2] == 0.625, "p = 0.5 row {} {}", lower[2], tight[2]);
    let csv = ok(r.render(qsdpi_cli::OutputFormat::Csv))?;
    ensure!(
        csv.starts_with("p,lower,upper_tight,upper_loose,lower_loose\n") && !csv.contains('\r'),
        "csv header or line endings"
    );

    let path = dir.join("ed.json");
    ok(std::fs::write(
        &path,
        r#"{"kind": "tensor", "factors": [{"kind": "erasure", "eps": 0.5}, {"kind": "depolarizing", "p": 0.5}]}"#,
    ))?;
    let e = cli(&["eta", "--channel", path.to_str().unwrap()])?;
    let v = e.get_f64("estimate").ok_or("no estimate")?;
    ensure!(v >= lower[2] - 1e-3 && v <= tight[2] + 1e-6, "estimate {v} outside [{}, {}]", lower[2], tight[2]);
    Ok(format!("max deviation {worst:.1e}, E_1/2 x D_0.5 estimate {v:.6} in [{:.6}, {:.6}]", lower[2], tight[2]))
}

fn degradability_suite() -> Check {
    let mut rng = stream_rng(2024, 0);
    let mut worst = 0.0f64;
    for k in 0..10 {
        let (din, dm, dl) = (2 + k % 2, 2 + (k / 2) % 2, 2 + (k / 4) % 2);
        let m = ok(QuantumChannel::from_kraus(random_kraus(din, dm, 2, &mut rng)))?;
        let lambda = ok(QuantumChannel::from_kraus(random_kraus(dm, dl, 2, &mut rng)))?;
        let n = ok(compose(&lambda, &m))?;
        let v = ok(check_degradable(&m, &n, 1e-6))?;
        ensure!(v.status == OrderStatus::Certified, "pair {k}: eps {:?}", v.eps);
        worst = worst.max(v.eps.unwrap_or(f64::INFINITY));
    }
    let e = channel(ChannelFamily::Erasure { dim: 2, eps: 0.25 });
    let v = ok(check_degradable(&e, &ok(e.complementary())?, 1e-6))?;
    ensure!(v.status == OrderStatus::Certified, "erasure complement eps {:?}", v.eps);

    let (lo, hi) = depolarizing_degradation_interval(2, 0.2);
    let m = ok(additive_channel(&ok(PmfZnZn::omega_delta(2, 0.2))?))?;
    let mut gammas = Vec::new();
    for g in [0.5, 0.96] {
        let n = ok(additive_channel(&ok(PmfZnZn::omega_delta(2, g))?))?;
        let v = ok(check_degradable(&m, &n, 1e-6))?;
        let eps = v.eps.unwrap_or(f64::NAN);
        if (lo..=hi).contains(&g) {
            ensure!(v.status == OrderStatus::Certified && eps <= 1e-6, "gamma {g} inside, eps {eps}");
        } else {
            ensure!(eps > 1e-3, "gamma {g} outside, eps {eps}");
        }
        gammas.push(format!("{g}: {eps:.1e}"));
    }
    Ok(format!("10 pairs max eps {worst:.1e}, erasure complement {:.1e}, depolarizing {}", v.eps.unwrap_or(0.0), gammas.join(", ")))
}

fn approx_order_suite() -> Check {
    // ε̃ = 2ε ln|B| + (2+ε) h(ε/(2+ε)) with (2+ε) h(ε/(2+ε)) = (2+ε) ln(2+ε) − ε ln ε − 2 ln 2.
    let (eps, b) = (0.1f64, 2.0f64);
    let tilde_oracle = 2.0 * eps * b.ln() + (2.0 + eps) * (2.0 + eps).ln() - eps * eps.ln() - 2.0 * 2f64.ln();
    let hat_oracle = 0.5 * eps * (b - 1.0).ln() + eps * b.ln() + 0.5 * ((2.0 + eps) * (2.0 + eps).ln() - eps * eps.ln() - 2.0 * 2f64.ln())
        + h(eps / 2.0);
    let t = ok(eps_tilde(eps, 2))?;
    let hh = ok(eps_hat(eps, 2))?;
    ensure!((t - 0.540662).abs() <= 1e-6 && (t - tilde_oracle).abs() <= 1e-12, "eps_tilde {t} oracle {tilde_oracle}");
    ensure!((hh - 0.46876).abs() <= 1e-3 && (hh - hat_oracle).abs() <= 1e-12, "eps_hat {hh} oracle {hat_oracle}");
    let set = ok(capacity_bounds(BoundKind::Deg, eps, 2))?;
    let lines: Vec<String> = set.inequalities.iter().map(|i| i.to_string()).collect();
    ensure!(lines.iter().any(|l| l == "Q <= P <= Q + 0.540662"), "rendered {lines:?}");
    ensure!(lines.contains(&format!("Q1 <= P1 <= Q1 + {hh:.6}")), "rendered {lines:?}");
    ensure!(lines.iter().any(|l| l == "P1 <= P <= P1 + 1.081324"), "rendered {lines:?}");
    Ok(format!("eps_tilde {t:.6}, eps_hat {hh:.6}; {}", lines.join("; ")))
}

fn weyl_suite() -> Check {
    let mut worst = 0.0f64;
    for n in 2..=5 {
        let mut rng = stream_rng(n as u64, 7);
        let d = random_full_rank_density(n * n, &mut rng);
        let f = ok(PmfZnZn::new(n, (0..n * n).map(|i| d[(i, i)].re).collect()))?;
        let back = inverse_transform(n, &weyl_eigenvalues(&f));
        for (x, z) in f.table().iter().zip(&back) {
            worst = worst.max((z.re - x).abs().max(z.im.abs()));
        }
    }
    ensure!(worst <= 1e-10, "round trip error {worst:.3e}");

    for (n, delta) in [(2usize, 0.2), (3, 0.3)] {
        let (lo, hi) = depolarizing_degradation_interval(n, delta);
        let base = ok(PmfZnZn::omega_delta(n, delta))?;
        for i in 0..10 {
            let g = 0.05 + 0.1 * i as f64;
            let w = ok(degradation_witness(&ok(PmfZnZn::omega_delta(n, g))?, &base))?;
            ensure!(w.is_degradable() == (lo..=hi).contains(&g), "n {n} delta {delta} gamma {g}: {w:?}");
        }
    }

    let g0 = ok(gamma0(2, 0.3))?;
    ensure!((g0 - 0.9545).abs() < 1e-4, "gamma0 {g0}");
    let w = ok(degradation_witness(&ok(PmfZnZn::omega_delta(2, g0))?, &ok(PmfZnZn::omega_delta(2, 0.3))?))?;
    ensure!(!w.is_degradable(), "gamma0 component degraded: {w:?}");
    let v = ok(check_ln_mixture(2, 0.3, &equal_mixture(), 10_000, 0))?;
    ensure!(v.gap <= 1e-6 && v.status != OrderStatus::Falsified, "mixture gap {}", v.gap);
    Ok(format!("round trip {worst:.1e}, 20 gamma verdicts match, gamma0 {g0:.4} not degraded, mixture gap {:.1e}", v.gap))
}

fn gaussian_suite() -> Check {
    let g = |e: f64| (e + 1.0) * (e + 1.0).ln() - e * e.ln();
    let mut ent_err = 0.0f64;
    for e in [0.5, 1.0, 2.0] {
        let th = ok(thermal_state(e, 60))?;
        ent_err = ent_err.max((ok(von_neumann_entropy(&th.rho))? - g(e)).abs());
    }
    ensure!(ent_err <= 1e-8, "thermal entropy error {ent_err:.3e}");

    let mut rule_err = 0.0f64;
    let e1 = 0.8;
    for fam in [
        GaussianFamily::Attenuator { lambda: 0.5, e: 2.0 },
        GaussianFamily::Amplifier { kappa: 1.5, e: 0.5 },
        GaussianFamily::Additive { e: 1.0 },
    ] {
        let ch = ok(build_gaussian_channel(&GaussianChannelSpec::new(fam, 60)))?;
        let out = ch.apply(&ok(thermal_state(e1, 60))?.rho);
        let (tau, y) = fam.energy_rule();
        let want = ok(thermal_state(tau * e1 + y, out.rows()))?.rho;
        let diff = (&out - &want).max_abs();
        rule_err = rule_err.max(diff);
    }
    ensure!(rule_err <= 1e-5, "thermal rule error {rule_err:.3e}");

    let t = ok(eta_lower_sweep(&GaussianFamily::Additive { e: 1.0 }, 1.0, &[0.1, 0.03, 0.01], 60))?;
    let last = t.rows.last().ok_or("empty sweep")?.ratio;
    let gaps: Vec<f64> = t.rows.iter().map(|r| (r.ratio - 0.58496).abs()).collect();
    ensure!((last - 0.58496).abs() <= 1e-3, "final ratio {last}");
    ensure!(t.increasing && gaps.windows(2).all(|w| w[1] < w[0]), "sweep not monotone: {gaps:?}");

    let grid: Vec<f64> = (1..=20).map(|i| 0.25 * i as f64).collect();
    let mut worst = g_inequality_check(GInequality::Additive, &grid);
    for eta in [0.2, 0.7, 1.0] {
        worst = worst.max(g_inequality_check(GInequality::Attenuator { eta }, &grid));
    }
    let nu_amp: Vec<f64> = grid.iter().cloned().filter(|&v| v >= 1.0).collect();
    for eta in [1.1, 1.8, 3.0] {
        worst = worst.max(g_inequality_check_grids(GInequality::Attenuator { eta }, &nu_amp, &grid));
    }
    ensure!(worst <= 1e-12, "g inequality violation {worst:.3e}");
    Ok(format!(
        "entropy err {ent_err:.1e}, rule err {rule_err:.1e}, sweep {last:.6} (closed form {:.6}), g-grid max {worst:.1e}",
        t.closed_form.value
    ))
}

fn functional_suite() -> Check {
    let c4 = ok(lsi_depolarizing(4))?;
    ensure!((c4 - 0.91024).abs() <= 1e-5, "lsi_depolarizing(4) = {c4}");
    let gen = ok(SemigroupGenerator::from_channel(&channel(ChannelFamily::Depolarizing { dim: 2, p: 1.0 })))?;
    let mut ests = Vec::new();
    for form in [DirichletForm::Continuous, DirichletForm::Discrete] {
        let e = ok(estimate_lsi(&gen, form, 6, 0))?.value;
        ensure!(e <= 1.0 + 1e-3, "{form} estimate {e}");
        ests.push(format!("{form} {e:.6}"));
    }
    let half = CMat::identity(2).scale_re(0.5);
    let mut worst = 0.0f64;
    for p in [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
        let c = ok(depolarizing_sdpi_constant(p, &half))?.constant;
        worst = worst.max((c - (1.0 - p) * (1.0 - p)).abs());
    }
    ensure!(worst <= 1e-12, "sdpi constant error {worst:.3e}");
    Ok(format!("lsi_depolarizing(4) {c4:.6}, estimates {}, sdpi err {worst:.1e}", ests.join(", ")))
}

fn property_suite() -> Check {
    let mut dpi_worst = f64::NEG_INFINITY;
    let divs = [
        Divergence::Relative,
        Divergence::SandwichedRenyi(0.5),
        Divergence::SandwichedRenyi(2.0),
        Divergence::F(ConvexFunction::XLogX, FVariant::Standard),
        Divergence::F(ConvexFunction::ChiSquare, FVariant::Standard),
        Divergence::F(ConvexFunction::Hellinger(0.5), FVariant::Standard),
        Divergence::F(ConvexFunction::XLogX, FVariant::Maximal),
        Divergence::F(ConvexFunction::ChiSquare, FVariant::Maximal),
        Divergence::Chi2(ok(KernelFunction::new(0.0))?),
        Divergence::Chi2(ok(KernelFunction::new(0.5))?),
        Divergence::Chi2(ok(KernelFunction::new(1.0))?),
    ];
    for seed in 0..100u64 {
        let mut rng = stream_rng(seed, 11);
        let d = 2 + (seed % 3) as usize;
        let ch = ok(QuantumChannel::from_kraus(random_kraus(d, d, 1 + (seed % 3) as usize, &mut rng)))?;
        let r = random_density(d, 1 + (seed as usize) % d, &mut rng);
        let s = random_full_rank_density(d, &mut rng);
        for div in &divs {
            let before = ok(div.eval(&r, &s))?.value;
            let after = ok(div.eval(&ch.apply(&r), &ch.apply(&s)))?.value;
            dpi_worst = dpi_worst.max(after - before);
        }
    }
    ensure!(dpi_worst <= 1e-8, "DPI violated by {dpi_worst:.3e}");

    // I(U:N(·))/I(U:·) on λ|0⟩⟨0|⊗ρ + (1−λ)|1⟩⟨1|⊗σ under λ → λ/10.
    let mut rng = stream_rng(6, 12);
    let rho = random_density(2, 2, &mut rng);
    let sigma = random_full_rank_density(2, &mut rng);
    let n = channel(ChannelFamily::AmplitudeDamping { gamma: 0.4 });
    let mi_ratio = |lam: f64| -> Result<f64, String> {
        let cq = |a: &CMat, b: &CMat| cq_state(&[lam, 1.0 - lam], &[a.clone(), b.clone()]);
        let top = ok(mutual_information(&cq(&n.apply(&rho), &n.apply(&sigma)), [2, 2]))?;
        let bottom = ok(mutual_information(&cq(&rho, &sigma), [2, 2]))?;
        Ok(top / bottom)
    };
    let refine = (mi_ratio(1e-3)? - mi_ratio(1e-4)?).abs();
    ensure!(refine <= 1e-3, "cq embedding refinement {refine:.3e}");

    let mut exch = 0.0f64;
    let mut petz = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = stream_rng(seed, 13);
        let (din, dout) = (2 + (seed % 2) as usize, 2 + ((seed / 2) % 2) as usize);
        let ch = ok(QuantumChannel::from_kraus(random_kraus(din, dout, 2, &mut rng)))?;
        let psi = random_pure_state(din, &mut rng);
        let a = ok(von_neumann_entropy(&ch.apply(&psi)))?;
        let b = ok(von_neumann_entropy(&ok(ch.complementary())?.apply(&psi)))?;
        exch = exch.max((a - b).abs());
        let s = random_full_rank_density(din, &mut rng);
        let rec = ok(petz_recovery(&ch, &s))?;
        petz = petz.max((&rec.apply(&ch.apply(&s)) - &s).max_abs());
    }
    ensure!(exch <= 1e-8, "entropy exchange error {exch:.3e}");
    ensure!(petz <= 1e-8, "Petz fixed point error {petz:.3e}");

    let opts = FalsifyOptions { seed: 3, ..Default::default() };
    for seed in 0..3u64 {
        let mut rng = stream_rng(seed, 14);
        let m = ok(QuantumChannel::from_kraus(random_kraus(2, 2, 2, &mut rng)))?;
        let lambda = ok(QuantumChannel::from_kraus(random_kraus(2, 2, 2, &mut rng)))?;
        let n = ok(compose(&lambda, &m))?;
        ensure!(ok(check_degradable(&m, &n, 1e-6))?.status == OrderStatus::Certified, "pair {seed} not certified");
        for variant in [LnVariant::Ln, LnVariant::Fq, LnVariant::Mc] {
            let v = ok(falsify_less_noisy(&m, &n, variant, &opts))?;
            ensure!(v.status != OrderStatus::Falsified, "pair {seed} {variant:?} falsified, gap {}", v.gap);
        }
    }
    Ok(format!(
        "DPI max {dpi_worst:.1e} over 100 triples x {} divergences, cq refinement {refine:.1e}, exchange {exch:.1e}, Petz {petz:.1e}, 3 certified pairs unfalsified",
        divs.len()
    ))
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<Criterion> = vec![
        ("closed-form coefficients", Box::new(closed_form_suite)),
        ("bounds for erasure x depolarizing", Box::new(|| figure2_suite(dir.path()))),
        ("degradability SDP", Box::new(degradability_suite)),
        ("approximate-order formulas", Box::new(approx_order_suite)),
        ("Weyl-covariant channels", Box::new(weyl_suite)),
        ("Gaussian channels", Box::new(gaussian_suite)),
        ("log-Sobolev and depolarizing constants", Box::new(functional_suite)),
        ("property suites", Box::new(property_suite)),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name} ({secs:.1} s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name} ({secs:.1} s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
