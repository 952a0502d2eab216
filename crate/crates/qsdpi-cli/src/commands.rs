use std::path::Path;

use qsdpi::capacities::{
    capacity_bounds, holevo_chi, private_info_p1, q1, BoundKind, CapacityEstimate, CapacityOptions,
};
use qsdpi::channels::{ChannelFamily, QuantumChannel};
use qsdpi::contraction::{closed_form_eta, erasure_depolarizing_bounds, estimate_eta, eta_bounds, EtaOptions};
use qsdpi::convex_opt::min_degrading_eps;
use qsdpi::divergences::Divergence;
use qsdpi::functional::{
    compare_dirichlet, depolarizing_sdpi_constant, estimate_lsi, lsi_depolarizing, DirichletForm, SemigroupGenerator,
};
use qsdpi::gaussian::{eta_closed_form, eta_lower_sweep, g_inequality_check_grids, GInequality, GaussianFamily};
use qsdpi::orders::{
    approx_orders_from_diamond, check_complete_ln, check_degradable, check_regularized_ln, falsify_anti,
    falsify_less_noisy, FalsifyOptions, LnVariant, OrderStatus, OrderVerdict, Witness,
};
use qsdpi::weyl::{degradation_witness, depolarizing_degradation_interval, depolarizing_weight, equal_mixture};
use qsdpi::weyl::{check_ln_mixture, gamma0, DegradationWitness, PmfZnZn};
use serde_json::{json, Value};

use crate::channel_file::{load_matrix, ChannelFile};
use crate::report::{matrix, num, Report, Table, Units};
use crate::{
    CapacityArgs, CliError, EtaArgs, FamilyChoice, FormChoice, GKind, GaussianCommand,
    GaussianFamilyArgs, LnChoice, LsiArgs, McChoice, OrderCommand, PairArgs, Quantity, RunConfig, WeylCommand,
    WithContext,
};

fn units(cfg: &RunConfig) -> Units {
    Units { bits: cfg.bits }
}

fn load(path: &Path) -> Result<(ChannelFile, QuantumChannel), CliError> {
    let file = ChannelFile::load(path)?;
    let ch = file.build()?;
    Ok((file, ch))
}

fn echo(file: &ChannelFile) -> Value {
    serde_json::to_value(file).unwrap_or(Value::Null)
}

pub fn cmd_eta(cfg: &RunConfig, args: &EtaArgs) -> Result<Report, CliError> {
    let (file, n) = load(&args.channel)?;
    let sigma = args.sigma.as_deref().map(load_matrix).transpose()?;
    let opts = EtaOptions {
        restarts: cfg.restarts.unwrap_or(20),
        seed: cfg.seed,
        ..Default::default()
    };
    let est = estimate_eta(&n, Divergence::Relative, sigma.as_ref(), &opts).context("eta estimate")?;

    let mut r = Report::new("eta");
    r.set("channel", echo(&file));
    r.set("sigma", sigma.as_ref().map_or(Value::Null, matrix));
    r.set("seed", cfg.seed);
    r.set("restarts", opts.restarts);
    r.set("divergence", est.divergence.name());
    r.set("estimate", num(est.value_lower));
    r.set("local_probe", num(est.local_probe));
    r.set("converged", est.converged);
    r.set("evaluations", est.evaluations);
    r.set("witness", json!({"rho": matrix(&est.witness.0), "sigma": matrix(&est.witness.1)}));
    let closed = match file.family()? {
        Some(f) if sigma.is_none() => closed_form_eta(&f).ok(),
        _ => None,
    };
    r.set("closed_form", closed.map_or(Value::Null, num));
    let bounds = match (file.expr()?, &sigma) {
        (Some(e), None) => eta_bounds(&e).ok(),
        _ => None,
    };
    r.set(
        "bounds",
        bounds.map_or(Value::Null, |b| json!({"lower": num(b.lower), "upper": num(b.upper)})),
    );
    Ok(r)
}

fn falsify_options(cfg: &RunConfig) -> FalsifyOptions {
    let d = FalsifyOptions::default();
    FalsifyOptions {
        trials: cfg.trials.unwrap_or(d.trials),
        restarts: cfg.restarts.unwrap_or(d.restarts),
        seed: cfg.seed,
        ..d
    }
}

fn witness_json(w: &Witness, u: Units) -> Value {
    let _ = u;
    match w {
        Witness::Pair { rho, sigma } => json!({"type": "pair", "rho": matrix(rho), "sigma": matrix(sigma)}),
        Witness::Ensemble { probs, states, dim_ref } => json!({
            "type": "ensemble",
            "probs": probs.iter().map(|&p| num(p)).collect::<Vec<_>>(),
            "states": states.iter().map(matrix).collect::<Vec<_>>(),
            "dim_ref": dim_ref,
        }),
        Witness::Bipartite { state, dim_ref } => json!({"type": "bipartite", "state": matrix(state), "dim_ref": dim_ref}),
    }
}

fn verdict_json(v: &OrderVerdict, u: Units) -> Value {
    json!({
        "order": v.kind.to_string(),
        "status": v.status.to_string(),
        "gap": u.entropic(v.gap),
        "eps": v.eps.map_or(Value::Null, num),
        "trials": v.trials,
        "restarts": v.restarts,
        "seed": v.seed,
        "note": v.note,
        "witness": v.witness.as_ref().map_or(Value::Null, |w| witness_json(w, u)),
    })
}

fn pair_report(cfg: &RunConfig, name: &str, pair: &PairArgs) -> Result<(Report, QuantumChannel, QuantumChannel), CliError> {
    let (fm, m) = load(&pair.channel)?;
    let (fn_, n) = load(&pair.channel2)?;
    let mut r = Report::new(name);
    r.set("channel", echo(&fm));
    r.set("channel2", echo(&fn_));
    r.set("seed", cfg.seed);
    r.set("units", units(cfg).name());
    Ok((r, m, n))
}

fn finish(mut r: Report, verdicts: &[OrderVerdict], assert: bool, u: Units) -> Report {
    let falsified = verdicts.iter().any(|v| v.status == OrderStatus::Falsified);
    if verdicts.len() == 1 {
        r.set("verdict", verdict_json(&verdicts[0], u));
    } else {
        r.set("verdicts", verdicts.iter().map(|v| verdict_json(v, u)).collect::<Vec<_>>());
    }
    r.assertion_failed = assert && falsified;
    r
}

pub fn cmd_order(cfg: &RunConfig, cmd: &OrderCommand) -> Result<Report, CliError> {
    let u = units(cfg);
    let opts = falsify_options(cfg);
    match cmd {
        OrderCommand::Degrade(pair) => {
            let (mut r, m, n) = pair_report(cfg, "order degrade", pair)?;
            r.set("tol", cfg.tol);
            let v = check_degradable(&m, &n, cfg.tol).context("degradability")?;
            Ok(finish(r, &[v], pair.assert, u))
        }
        OrderCommand::LessNoisy { pair, variant, anti } => {
            let v = match variant {
                LnChoice::Ln => LnVariant::Ln,
                LnChoice::Fq => LnVariant::Fq,
            };
            falsifier(cfg, "order less-noisy", pair, v, *anti, &opts)
        }
        OrderCommand::MoreCapable { pair, variant, anti } => {
            let v = match variant {
                McChoice::Mc => LnVariant::Mc,
                McChoice::McFq => LnVariant::McFq,
            };
            falsifier(cfg, "order more-capable", pair, v, *anti, &opts)
        }
        OrderCommand::Complete { pair, dim_ref, classical } => {
            let (mut r, m, n) = pair_report(cfg, "order complete", pair)?;
            r.set("dim_ref", *dim_ref);
            r.set("classical_reference", *classical);
            let v = check_complete_ln(&m, &n, *dim_ref, *classical, &opts).context("complete less noisy")?;
            Ok(finish(r, &[v], pair.assert, u))
        }
        OrderCommand::Regularized { pair, copies } => {
            let (mut r, m, n) = pair_report(cfg, "order regularized", pair)?;
            r.set("copies", *copies);
            let vs = check_regularized_ln(&m, &n, *copies, &opts).context("regularized less noisy")?;
            Ok(finish(r, &vs, pair.assert, u))
        }
        OrderCommand::Approx { channel, channel2 } => {
            let (fm, m) = load(channel)?;
            let (fn_, n) = load(channel2)?;
            let a = approx_orders_from_diamond(&m, &n).context("approximate orders")?;
            let mut r = Report::new("order approx");
            r.set("channel", echo(&fm));
            r.set("channel2", echo(&fn_));
            r.set("units", u.name());
            r.set("eps_deg", num(a.eps_deg));
            r.set("dim_b", a.dim_b);
            r.set("eps_tilde", u.entropic(a.eps_tilde));
            r.set("eps_hat", u.entropic(a.eps_hat));
            r.set("diamond", a.diamond.map_or(Value::Null, num));
            r.set("comparable_eps", a.comparable_eps.map_or(Value::Null, |x| u.entropic(x)));
            r.set("chain", a.chain());
            Ok(r)
        }
    }
}

fn falsifier(
    cfg: &RunConfig,
    name: &str,
    pair: &PairArgs,
    variant: LnVariant,
    anti: bool,
    opts: &FalsifyOptions,
) -> Result<Report, CliError> {
    let (mut r, m, n) = pair_report(cfg, name, pair)?;
    r.set("trials", opts.trials);
    r.set("restarts", opts.restarts);
    let v = if anti {
        falsify_anti(&m, &n, variant, opts)
    } else {
        falsify_less_noisy(&m, &n, variant, opts)
    }
    .context("falsifier")?;
    Ok(finish(r, &[v], pair.assert, units(cfg)))
}

fn estimate_json(e: &CapacityEstimate, u: Units) -> Value {
    json!({
        "value": u.entropic(e.value),
        "restarts": e.restarts,
        "evaluations": e.evaluations,
        "probs": e.ensemble.probs.iter().map(|&p| num(p)).collect::<Vec<_>>(),
        "states": e.ensemble.states.iter().map(matrix).collect::<Vec<_>>(),
    })
}

pub fn cmd_capacity(cfg: &RunConfig, args: &CapacityArgs) -> Result<Report, CliError> {
    let u = units(cfg);
    let (file, n) = load(&args.channel)?;
    let opts = CapacityOptions {
        restarts: cfg.restarts.unwrap_or(8),
        seed: cfg.seed,
        ..Default::default()
    };
    let mut r = Report::new("capacity");
    r.set("channel", echo(&file));
    r.set("seed", cfg.seed);
    r.set("restarts", opts.restarts);
    r.set("units", u.name());
    r.set("ensemble_size", args.ensemble_size);
    for q in &args.quantity {
        let (key, est) = match q {
            Quantity::Q1 => ("q1", q1(&n, &opts).context("q1")?),
            Quantity::Chi => ("chi", holevo_chi(&n, args.ensemble_size, &opts).context("holevo quantity")?),
            Quantity::P1 => ("p1", private_info_p1(&n, args.ensemble_size, &opts).context("private information")?),
        };
        r.set(key, estimate_json(&est, u));
    }
    if let Some(kind) = &args.bounds {
        let kind: BoundKind = kind.parse().context("bound kind")?;
        let (eps, dim_b) = match (args.eps, kind) {
            (Some(e), _) => (e, n.dim_out()),
            (None, BoundKind::Deg | BoundKind::AntiDeg) => {
                let nc = n.complementary()?;
                let (dominant, dominated) = if kind == BoundKind::Deg { (&n, &nc) } else { (&nc, &n) };
                let fit = min_degrading_eps(dominant, dominated).context("degrading distance")?;
                (fit.eps.min(1.0), dominated.dim_out())
            }
            (None, _) => return Err(CliError::Parse(format!("--eps is required for bound kind {kind}"))),
        };
        let b = capacity_bounds(kind, eps, dim_b).context("capacity bounds")?;
        r.set(
            "bounds",
            json!({
                "kind": b.kind.to_string(),
                "eps": num(b.eps),
                "dim_b": dim_b,
                "eps_hat": b.eps_hat.map_or(Value::Null, |x| u.entropic(x)),
                "eps_tilde": b.eps_tilde.map_or(Value::Null, |x| u.entropic(x)),
                "inequalities": b.inequalities.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            }),
        );
    }
    Ok(r)
}

pub fn cmd_weyl(cfg: &RunConfig, cmd: &WeylCommand) -> Result<Report, CliError> {
    match cmd {
        WeylCommand::Build { n, delta, shift } => {
            if shift.len() != 2 {
                return Err(CliError::Parse("--shift takes two values a,b".into()));
            }
            let pmf = PmfZnZn::omega_delta(*n, *delta).context("omega_delta")?.shifted(shift[0], shift[1]);
            let file = ChannelFile::Weyl {
                n: *n,
                pmf: pmf.table().to_vec(),
            };
            file.build()?;
            let mut r = Report::new("weyl build");
            r.set("n", *n);
            r.set("delta", *delta);
            r.set("shift", shift.clone());
            r.set("depolarizing_weight", num(depolarizing_weight(*n, *delta)));
            r.set("channel", echo(&file));
            Ok(r)
        }
        WeylCommand::DegradeTest { n, delta, gamma } => {
            let (lo, hi) = depolarizing_degradation_interval(*n, *delta);
            let f = PmfZnZn::omega_delta(*n, *delta).context("omega_delta")?;
            let mut table = Table::new(&["gamma", "degradable", "expected", "worst_entry"]);
            for &g in gamma {
                let h = PmfZnZn::omega_delta(*n, g).context("omega_gamma")?;
                // M_δ degrades to M_γ when ω_γ = k * ω_δ for a pmf k.
                let w = degradation_witness(&h, &f).context("degradation witness")?;
                let worst = match &w {
                    DegradationWitness::Pmf(_) => 0.0,
                    DegradationWitness::NotPmf { worst, .. } => *worst,
                };
                let expected = g >= lo - 1e-12 && g <= hi + 1e-12;
                table.push(vec![num(g), json!(w.is_degradable()), json!(expected), num(worst)]);
            }
            let mut r = Report::new("weyl degrade-test");
            r.set("n", *n);
            r.set("delta", *delta);
            r.set("interval", json!([num(lo), num(hi)]));
            r.table = Some(table);
            Ok(r)
        }
        WeylCommand::Gamma0 { n, delta } => {
            let g = gamma0(*n, *delta).context("gamma0")?;
            let (lo, hi) = depolarizing_degradation_interval(*n, *delta);
            let mut r = Report::new("weyl gamma0");
            r.set("n", *n);
            r.set("delta", *delta);
            r.set("gamma0", num(g));
            r.set("interval", json!([num(lo), num(hi)]));
            r.set("inside_interval", g >= lo && g <= hi);
            Ok(r)
        }
        WeylCommand::LnMixture { n, delta } => {
            let trials = cfg.trials.unwrap_or(10_000);
            let v = check_ln_mixture(*n, *delta, &equal_mixture(), trials, cfg.seed).context("ln mixture")?;
            let g0 = gamma0(*n, *delta).context("gamma0")?;
            let f = PmfZnZn::omega_delta(*n, *delta).context("omega_delta")?;
            let h = PmfZnZn::omega_delta(*n, g0).context("omega_gamma0")?;
            let deg = degradation_witness(&h, &f).context("degradation witness")?;
            let mut r = Report::new("weyl ln-mixture");
            r.set("n", *n);
            r.set("delta", *delta);
            r.set("gamma0", num(g0));
            r.set("trials", trials);
            r.set("seed", cfg.seed);
            r.set("gamma0_degradable", deg.is_degradable());
            r.set("verdict", verdict_json(&v, units(cfg)));
            Ok(r)
        }
    }
}

fn gaussian_family(a: &GaussianFamilyArgs) -> Result<GaussianFamily, CliError> {
    let need = |x: Option<f64>, name: &str| x.ok_or_else(|| CliError::Parse(format!("--{name} is required")));
    let f = match a.family {
        FamilyChoice::Attenuator => GaussianFamily::Attenuator {
            lambda: need(a.lambda, "lambda")?,
            e: a.e,
        },
        FamilyChoice::Amplifier => GaussianFamily::Amplifier {
            kappa: need(a.kappa, "kappa")?,
            e: a.e,
        },
        FamilyChoice::Additive => GaussianFamily::Additive { e: a.e },
    };
    f.validate().context("gaussian family")?;
    Ok(f)
}

fn family_json(f: &GaussianFamily) -> Value {
    match f {
        GaussianFamily::Attenuator { lambda, e } => json!({"family": "attenuator", "lambda": num(*lambda), "E": num(*e)}),
        GaussianFamily::Amplifier { kappa, e } => json!({"family": "amplifier", "kappa": num(*kappa), "E": num(*e)}),
        GaussianFamily::Additive { e } => json!({"family": "additive", "E": num(*e)}),
    }
}

pub fn cmd_gaussian(cfg: &RunConfig, cmd: &GaussianCommand) -> Result<Report, CliError> {
    match cmd {
        GaussianCommand::Eta { family, e1 } => {
            let f = gaussian_family(family)?;
            let c = eta_closed_form(&f, e1).context("closed form")?;
            let mut r = Report::new("gaussian eta");
            r.set("family", family_json(&f));
            r.set("E1", e1.iter().map(|&x| num(x)).collect::<Vec<_>>());
            r.set("closed_form", num(c.value));
            r.set("unconditional", c.unconditional);
            Ok(r)
        }
        GaussianCommand::Sweep { family, e1, delta } => {
            let f = gaussian_family(family)?;
            let cutoff = cfg.cutoff.unwrap_or(60);
            let t = eta_lower_sweep(&f, *e1, delta, cutoff).context("sweep")?;
            let mut table = Table::new(&["delta", "ratio", "ratio_refined", "converged"]);
            for row in &t.rows {
                table.push(vec![num(row.delta), num(row.ratio), num(row.ratio_refined), json!(row.converged)]);
            }
            let mut r = Report::new("gaussian sweep");
            r.set("family", family_json(&f));
            r.set("E1", num(*e1));
            r.set("cutoff", t.cutoff);
            r.set("closed_form", num(t.closed_form.value));
            r.set("unconditional", t.closed_form.unconditional);
            r.set("increasing", t.increasing);
            r.table = Some(table);
            Ok(r)
        }
        GaussianCommand::GCheck { kind, eta, points, max, nu_min } => {
            if *points == 0 || !(*max > 0.0) {
                return Err(CliError::Parse("--points and --max must be positive".into()));
            }
            let grid: Vec<f64> = (1..=*points).map(|i| max * i as f64 / *points as f64).collect();
            let nu: Vec<f64> = grid.iter().cloned().filter(|&v| nu_min.is_none_or(|m| v >= m)).collect();
            let k = match kind {
                GKind::Additive => GInequality::Additive,
                GKind::Attenuator => GInequality::Attenuator { eta: *eta },
            };
            let worst = g_inequality_check_grids(k, &nu, &grid);
            let mut r = Report::new("gaussian g-check");
            r.set("kind", format!("{kind:?}").to_lowercase());
            if *kind == GKind::Attenuator {
                r.set("eta", num(*eta));
            }
            r.set("points", *points);
            r.set("max", num(*max));
            r.set("nu_min", nu_min.map_or(Value::Null, num));
            r.set("max_violation", num(worst));
            Ok(r)
        }
    }
}

fn forms(choice: FormChoice) -> Vec<DirichletForm> {
    match choice {
        FormChoice::Continuous => vec![DirichletForm::Continuous],
        FormChoice::Discrete => vec![DirichletForm::Discrete],
        FormChoice::Both => vec![DirichletForm::Continuous, DirichletForm::Discrete],
    }
}

pub fn cmd_lsi(cfg: &RunConfig, args: &LsiArgs) -> Result<Report, CliError> {
    let (file, n) = load(&args.channel)?;
    let gen = SemigroupGenerator::from_channel(&n).context("generator")?;
    let restarts = cfg.restarts.unwrap_or(6);
    let mut r = Report::new("lsi");
    r.set("channel", echo(&file));
    r.set("seed", cfg.seed);
    r.set("restarts", restarts);
    r.set("sigma", matrix(&gen.sigma));
    r.set("primitive", gen.primitive);
    r.set("reversible", gen.reversible);
    r.set("warnings", gen.warnings());
    if gen.primitive {
        let mut est = serde_json::Map::new();
        for form in forms(args.form) {
            let e = estimate_lsi(&gen, form, restarts, cfg.seed).context("log-Sobolev estimate")?;
            est.insert(form.to_string(), json!({"value": num(e.value), "witness": matrix(&e.witness)}));
        }
        r.set("estimate", Value::Object(est));
    }
    if let Some(ChannelFamily::Depolarizing { dim, p }) = file.family()? {
        let c = lsi_depolarizing(dim).context("closed form")?;
        r.set("closed_form", num(p * c));
        r.set(
            "closed_form_note",
            "p * 2(1 - 2/d)/ln(d - 1); with the 2-entropy and Dirichlet form used here the variational value is half of it",
        );
    }
    if let Some(path) = &args.channel2 {
        let (f2, n2) = load(path)?;
        let g2 = SemigroupGenerator::from_channel(&n2).context("second generator")?;
        let mut cmp = serde_json::Map::new();
        for form in forms(args.form) {
            let c = compare_dirichlet(&gen, &g2, form).context("Dirichlet comparison")?;
            cmp.insert(
                form.to_string(),
                json!({
                    "lambda": num(c.lambda),
                    "lambda_min": num(c.lambda_min),
                    "kernel_dim": c.kernel_dim,
                    "lsi_transfer_factor": num(1.0 / c.lambda),
                }),
            );
        }
        r.set("channel2", echo(&f2));
        r.set("comparison", Value::Object(cmp));
    }
    if let Some(p) = args.sdpi_p {
        let sigma = match &args.sigma {
            Some(path) => load_matrix(path)?,
            None => gen.sigma.clone(),
        };
        let c = depolarizing_sdpi_constant(p, &sigma).context("depolarizing contraction constant")?;
        r.set(
            "sdpi",
            json!({"p": num(p), "s_min": num(c.s_min), "alpha": num(c.alpha), "x_min": num(c.x_min), "constant": num(c.constant)}),
        );
    }
    Ok(r)
}

/// Columns p, lower, upper_tight, upper_loose, lower_loose.
pub fn cmd_figure2(p_grid: &[f64]) -> Result<Report, CliError> {
    let mut table = Table::new(&["p", "lower", "upper_tight", "upper_loose", "lower_loose"]);
    for &p in p_grid {
        let b = erasure_depolarizing_bounds(p).context("erasure-depolarizing bounds")?;
        let q = (1.0 - p) * (1.0 - p);
        let loose = q.max(0.5);
        table.push(vec![num(p), num(b.lower), num(b.upper), num(1.5 * loose), num(loose)]);
    }
    let mut r = Report::new("figure2");
    r.table = Some(table);
    Ok(r)
}
