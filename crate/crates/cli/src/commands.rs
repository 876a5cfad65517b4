//! The five subcommands. Each returns its primary output as a string so the
//! binary can route it to stdout or a file; reruns with the same config and
//! seed are byte-identical.

use crate::config::{RunConfig, SigmaFormChoice};
use crate::fmt::sig12;
use qrelax::dynamics::EvolutionRecord;
use qrelax::error::{Error, Result};
use qrelax::hilbert::InverseTemperature;
use qrelax::liouvillian::ThermalScenario;
use qrelax::qubit_oracle::{
    oracle_activity, oracle_c1, oracle_gibbs, oracle_lambda1, oracle_population, oracle_sigma0,
    QubitScenario, SigmaForm,
};
use qrelax::spectral::{decompose, ModeClass};
use qrelax::thermo::{
    asymmetry_scan, dynamical_activity, sigma0_protocols, sigma_time_averaged, tkur_bound,
    alpha_time_averaged, Protocol,
};
use qrelax::trajectories::{sample_trajectories, verify_tkur, TkurVerdict, TrajectoryConfig};

fn beta(x: f64) -> Result<InverseTemperature<f64>> {
    InverseTemperature::new(x)
}

fn scenario(cfg: &RunConfig, beta0: f64, beta_target: f64) -> Result<ThermalScenario<f64>> {
    ThermalScenario::new(cfg.build_system()?, cfg.gamma, cfg.omega, beta(beta0)?, beta(beta_target)?)
}

/// Eigenvalue table of the generator at the bath temperature.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<String> {
    let sc = scenario(cfg, cfg.beta0, cfg.beta)?;
    let s = decompose(&sc.liouvillian()?)?;
    let mut out = String::from("index,re_lambda,im_lambda,class,gap\n");
    for j in 0..s.n_modes() {
        let class = match s.class(j) {
            ModeClass::Stationary => "stationary",
            ModeClass::Decay => "decay",
            ModeClass::Coherence => "coherence",
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            j,
            sig12(s.eigenvalue(j).re),
            sig12(s.eigenvalue(j).im),
            class,
            sig12(s.gap())
        ));
    }
    Ok(out)
}

/// Relaxation record β₀ → β on a uniform time grid.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<String> {
    let sc = scenario(cfg, cfg.beta0, cfg.beta)?;
    let s = decompose(&sc.liouvillian()?)?;
    let t_max = cfg.t_max.unwrap_or(50.0 / s.gap());
    let n = cfg.n_points;
    let grid: Vec<f64> = (0..n).map(|k| t_max * k as f64 / (n - 1) as f64).collect();
    let rec = EvolutionRecord::compute(&sc, &grid)?;

    let d = sc.system.dim();
    let mut header = String::from("t");
    for k in 0..d {
        header.push_str(&format!(",p_{k}"));
    }
    header.push_str(",D,sigma_exact,sigma_clausius,sigma_modes,sigma_slowest,heat_current,activity_inst\n");
    let mut out = header;
    for i in 0..rec.times.len() {
        let mut line = sig12(rec.times[i]);
        for p in rec.states[i].populations() {
            line.push(',');
            line.push_str(&sig12(p));
        }
        for v in [
            rec.rel_entropy[i],
            rec.sigma_exact[i],
            rec.sigma_clausius[i],
            rec.sigma_modes[i],
            rec.sigma_slowest[i],
            rec.heat_current[i],
            rec.activity_inst[i],
        ] {
            line.push(',');
            line.push_str(&sig12(v));
        }
        line.push('\n');
        out.push_str(&line);
    }
    Ok(out)
}

fn inv_or_inf(x: f64, num: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        num / x
    }
}

const ASYM_HEADER: &str = "beta,two_over_sigma0_definitional,two_over_sigma0_paper,one_over_alpha,tkur_rhs_avg,gap,c1,W1,protocol,divergent\n";

/// Asymmetry scan over the β grid at fixed β₀, with summary rows for the
/// symmetric pair closest to the grid edges.
pub fn cmd_asymmetry(cfg: &RunConfig) -> Result<(String, Option<String>)> {
    let system = cfg.build_system()?;
    let betas: Vec<f64> = (0..cfg.n_beta)
        .map(|k| {
            cfg.beta_min + (cfg.beta_max - cfg.beta_min) * k as f64 / (cfg.n_beta - 1) as f64
        })
        .collect();
    let rows = asymmetry_scan(&system, cfg.gamma, cfg.omega, beta(cfg.beta0)?, &betas)?;

    let mut out = String::from(ASYM_HEADER);
    for r in &rows {
        let divergent = r.protocol == Protocol::Degenerate;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            sig12(r.beta),
            sig12(inv_or_inf(r.sigma0_definitional, 2.0)),
            sig12(inv_or_inf(r.sigma0_paper, 2.0)),
            sig12(inv_or_inf(r.alpha_stationary, 1.0)),
            sig12(r.tkur_rhs_avg.unwrap_or(f64::INFINITY)),
            sig12(r.gap),
            sig12(r.c1),
            sig12(r.w1),
            r.protocol.label(),
            u8::from(divergent),
        ));
    }

    // Summary: the symmetric (β₀ − δ, β₀ + δ) pair with the largest δ the
    // grid covers on both sides, snapped to grid points.
    let delta = (cfg.beta0 - cfg.beta_min).min(cfg.beta_max - cfg.beta0);
    if delta > 0.0 {
        let closest = |target: f64| -> f64 {
            *betas
                .iter()
                .min_by(|a, b| {
                    (*a - target).abs().partial_cmp(&(*b - target).abs()).unwrap()
                })
                .unwrap()
        };
        let b_h = closest(cfg.beta0 - delta);
        let b_c = closest(cfg.beta0 + delta);
        if b_h < b_c {
            let sc = scenario(cfg, b_c, b_h)?;
            let rep = sigma0_protocols(&sc)?;
            for (label, p) in [("summary_heating", &rep.heating), ("summary_cooling", &rep.cooling)]
            {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},0\n",
                    sig12(p.beta),
                    sig12(inv_or_inf(p.sigma0_definitional, 2.0)),
                    sig12(inv_or_inf(p.sigma0_paper_form.unwrap_or(f64::NAN), 2.0)),
                    sig12(inv_or_inf(p.alpha_stationary, 1.0)),
                    "nan",
                    sig12(p.gap),
                    sig12(p.c1),
                    sig12(p.w1),
                    label,
                ));
            }
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},summary_ratio,0\n",
                sig12(delta),
                sig12(rep.ratio_definitional.unwrap_or(f64::NAN)),
                sig12(rep.ratio_paper.unwrap_or(f64::NAN)),
                sig12(rep.heating.alpha_stationary / rep.cooling.alpha_stationary),
                "nan",
                sig12(rep.gap_ratio.unwrap_or(f64::NAN)),
                sig12(rep.heating.c1 / rep.cooling.c1),
                sig12(rep.heating.w1 / rep.cooling.w1),
            ));
        }
    }

    let plot = cfg_plot_data(cfg, &rows);
    Ok((out, plot))
}

/// Long-format companion table for the two-curve bound comparison plot.
fn cfg_plot_data(cfg: &RunConfig, rows: &[qrelax::thermo::ScanRow<f64>]) -> Option<String> {
    let mut header = String::from("beta");
    let forms: &[&str] = match cfg.sigma_form {
        SigmaFormChoice::Definitional => &["two_over_sigma0_definitional"],
        SigmaFormChoice::Paper => &["two_over_sigma0_paper"],
        SigmaFormChoice::Both => &["two_over_sigma0_definitional", "two_over_sigma0_paper"],
    };
    for f in forms {
        header.push(',');
        header.push_str(f);
    }
    header.push_str(",one_over_alpha,protocol\n");
    let mut out = header;
    for r in rows {
        let mut line = sig12(r.beta);
        for f in forms {
            let v = if *f == "two_over_sigma0_definitional" {
                inv_or_inf(r.sigma0_definitional, 2.0)
            } else {
                inv_or_inf(r.sigma0_paper, 2.0)
            };
            line.push(',');
            line.push_str(&sig12(v));
        }
        line.push(',');
        line.push_str(&sig12(inv_or_inf(r.alpha_stationary, 1.0)));
        line.push(',');
        line.push_str(r.protocol.label());
        line.push('\n');
        out.push_str(&line);
    }
    Some(out)
}

fn verdict_label(v: TkurVerdict) -> &'static str {
    match v {
        TkurVerdict::Satisfied => "true",
        TkurVerdict::Violated => "false",
        TkurVerdict::Inconclusive => "inconclusive",
    }
}

/// Trajectory-based bound verification for the heating and cooling
/// protocols of the configured temperature pair.
///
/// The `tur/kur/tkur` columns are built from the initial entropy production
/// rate and the stationary activity (the pair the bound comparison is about);
/// the time-averaged `sigma_avg`/`alpha_avg` diagnostics are reported
/// alongside.
pub fn cmd_tkur(cfg: &RunConfig) -> Result<String> {
    let b_c = cfg.beta0.max(cfg.beta);
    let b_h = cfg.beta0.min(cfg.beta);
    let mut out = String::from(
        "protocol,sigma_avg,alpha_avg,alpha_stationary,tur_rhs,kur_rhs,tkur_rhs,f_phi,stderr,satisfied\n",
    );
    let protocols: [(&str, f64, f64, u64); 2] = [
        ("heating", b_c, b_h, cfg.master_seed),
        ("cooling", b_h, b_c, cfg.master_seed.wrapping_add(0x9E37_79B9_7F4A_7C15)),
    ];
    for (label, b0, b1, seed) in protocols {
        let sc = scenario(cfg, b0, b1)?;
        let s = decompose(&sc.liouvillian()?)?;
        let tau_op = cfg.tau_op.unwrap_or(1.0 / s.gap());
        let sigma_avg = sigma_time_averaged(&sc, tau_op)?;
        let alpha_avg = alpha_time_averaged(&sc, tau_op)?;
        let (l1, l2) = sc.jump_ops()?;
        let alpha_stat = dynamical_activity(&[l1, l2], s.stationary_state())?;
        let sigma0 =
            qrelax::dynamics::entropy_production_exact(&sc.liouvillian()?, &sc.initial_state()?, s.stationary_state())?;

        let stats = sample_trajectories(&TrajectoryConfig {
            scenario: sc.clone(),
            tau_op,
            n_traj: cfg.n_traj,
            master_seed: seed,
        })?;
        let (bound, verdict) = if sigma0 > 0.0 {
            let b = tkur_bound(sigma0, alpha_stat, 0.0)?;
            let v = verify_tkur(&stats, &b);
            (Some(b), v)
        } else {
            (None, TkurVerdict::Inconclusive)
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            label,
            sig12(sigma_avg),
            sig12(alpha_avg),
            sig12(alpha_stat),
            sig12(bound.as_ref().map_or(f64::INFINITY, |b| b.tur_rhs)),
            sig12(bound.as_ref().map_or(f64::NAN, |b| b.kur_rhs)),
            sig12(bound.as_ref().map_or(f64::INFINITY, |b| b.tkur_rhs)),
            sig12(stats.f_phi),
            sig12(stats.stderr_fphi),
            verdict_label(verdict),
        ));
    }
    Ok(out)
}

/// Oracle mismatch carrying the failing quantity name.
pub struct OracleMismatch {
    pub quantity: &'static str,
    pub deviation: f64,
    pub tolerance: f64,
}

/// Closed-form-vs-generic comparison over the (β₀, β) × γ grid. Returns the
/// human-readable report and the first failing quantity, if any.
pub fn cmd_oracle_check(
    cfg: &RunConfig,
    inject_fault: bool,
) -> Result<(String, Option<OracleMismatch>)> {
    if !matches!(cfg.system, crate::config::SystemChoice::Qubit) {
        return Err(Error::Config("oracle requires qubit".into()));
    }
    // The generic path optionally runs with a perturbed coupling; the
    // closed forms always use the nominal one.
    let fault = if inject_fault { 1.0 + 1e-3 } else { 1.0 };

    let betas: Vec<f64> = (0..10).map(|k| 0.2 + (5.0 - 0.2) * k as f64 / 9.0).collect();
    let gammas = [0.05, 0.1, 1.0];

    let mut dev_gibbs = 0.0f64;
    let mut dev_lambda = 0.0f64;
    let mut dev_c1 = 0.0f64;
    let mut dev_sigma0 = 0.0f64;
    let mut dev_ratio = 0.0f64;
    let mut dev_activity = 0.0f64;
    let mut dev_population = 0.0f64;

    for &g in &gammas {
        for &b in &betas {
            // Single-temperature quantities.
            let sc = scenario(&with_params(cfg, g * fault, b, b), b, b)?;
            let tau = sc.target_state()?;
            let p = tau.populations();
            let (p0, p1) = oracle_gibbs(b, cfg.omega);
            dev_gibbs = dev_gibbs.max((p[0] - p0).abs().max((p[1] - p1).abs()));

            let s = decompose(&sc.liouvillian()?)?;
            let lam = oracle_lambda1(b, cfg.omega, g);
            dev_lambda = dev_lambda.max((s.gap() - lam.abs()).abs());

            let (l1, l2) = sc.jump_ops()?;
            let a = dynamical_activity(&[l1, l2], &tau)?;
            dev_activity = dev_activity.max((a - oracle_activity(b, cfg.omega, g)).abs());
        }
        for &b0 in &betas {
            for &b in &betas {
                if b0 == b {
                    continue;
                }
                let sc = scenario(&with_params(cfg, g * fault, b0, b), b0, b)?;
                let lop = sc.liouvillian()?;
                let s = decompose(&lop)?;
                let rho0 = sc.initial_state()?;
                let c = s.overlaps(&rho0)?;
                let j = s.slowest_decay();
                let scale = s.right_mode(j)[(0, 0)].re;
                let c1 = (c[j] * num_complex::Complex::new(scale, 0.0)).re;
                dev_c1 = dev_c1.max((c1 - oracle_c1(b0, b, cfg.omega)).abs());

                let sigma0 = qrelax::dynamics::entropy_production_exact(
                    &lop,
                    &rho0,
                    s.stationary_state(),
                )?;
                let q = QubitScenario::new(cfg.omega, g, b0, b)?;
                dev_sigma0 =
                    dev_sigma0.max((sigma0 - oracle_sigma0(&q, SigmaForm::Definitional)).abs());

                // Paper-form ratio identity on the swapped pair.
                if b0 > b {
                    let sc_rev = scenario(&with_params(cfg, g * fault, b, b0), b, b0)?;
                    let lop_rev = sc_rev.liouvillian()?;
                    let s_rev = decompose(&lop_rev)?;
                    let sigma0_rev = qrelax::dynamics::entropy_production_exact(
                        &lop_rev,
                        &sc_rev.initial_state()?,
                        s_rev.stationary_state(),
                    )?;
                    let q_rev = QubitScenario::new(cfg.omega, g, b, b0)?;
                    let r_generic = sigma0 / sigma0_rev;
                    let r_paper = oracle_sigma0(&q, SigmaForm::Paper)
                        / oracle_sigma0(&q_rev, SigmaForm::Paper);
                    dev_ratio = dev_ratio.max((r_generic - r_paper).abs());
                }

                // Populations at t = 1/gap against the integrator.
                let t = 1.0 / s.gap();
                let states = qrelax::dynamics::evolve_ode(&lop, &rho0, &[t])?;
                let (q0, q1) = oracle_population(t, &q);
                let pops = states[0].populations();
                dev_population =
                    dev_population.max((pops[0] - q0).abs().max((pops[1] - q1).abs()));
            }
        }
    }

    let quantities: [(&'static str, f64, f64); 7] = [
        ("gibbs_populations", dev_gibbs, 1e-12),
        ("lambda1_gap", dev_lambda, 1e-10),
        ("c1_overlap", dev_c1, 1e-10),
        ("sigma0_definitional", dev_sigma0, 1e-9),
        ("sigma0_ratio_paper_form", dev_ratio, 1e-9),
        ("dynamical_activity", dev_activity, 1e-12),
        ("population_evolution", dev_population, 1e-8),
    ];
    let mut report = String::from("quantity,max_abs_deviation,tolerance,status\n");
    let mut failure = None;
    for (name, dev, tol) in quantities {
        let ok = dev <= tol;
        report.push_str(&format!(
            "{},{},{},{}\n",
            name,
            sig12(dev),
            sig12(tol),
            if ok { "pass" } else { "FAIL" }
        ));
        if !ok && failure.is_none() {
            failure = Some(OracleMismatch { quantity: name, deviation: dev, tolerance: tol });
        }
    }
    Ok((report, failure))
}

fn with_params(cfg: &RunConfig, gamma: f64, beta0: f64, beta: f64) -> RunConfig {
    let mut c = cfg.clone();
    c.gamma = gamma;
    c.beta0 = beta0;
    c.beta = beta;
    c
}
