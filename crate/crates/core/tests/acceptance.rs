//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured numbers (visible with `--nocapture`).
//!
//! Run with `cargo test --test acceptance`.

use qrelax::dynamics::{
    entropy_production_clausius, entropy_production_exact, entropy_production_modes,
    evolve_ode, evolve_spectral, integrate_sigma_exact,
};
use qrelax::hilbert::{relative_entropy, InverseTemperature};
use qrelax::liouvillian::{System, ThermalScenario};
use qrelax::qubit_oracle::{
    oracle_activity, oracle_c1, oracle_lambda1, oracle_mean_heat, QubitScenario,
};
use qrelax::spectral::{decompose, self_adjointness_residual, weighted_inner, ModeDecomposition};
use qrelax::thermo::{
    asymmetry_scan, dynamical_activity, phi_inverse, response_bound_check, sigma0_protocols,
    tkur_bound, Protocol,
};
use qrelax::trajectories::{sample_trajectories, verify_tkur, TkurVerdict, TrajectoryConfig};
use qrelax::cmat::CMat;
use std::time::Instant;

const LN2: f64 = core::f64::consts::LN_2;

fn ln3() -> f64 {
    3.0f64.ln()
}

fn beta(x: f64) -> InverseTemperature<f64> {
    InverseTemperature::new(x).unwrap()
}

fn qubit(b0: f64, b: f64, gamma: f64) -> ThermalScenario<f64> {
    ThermalScenario::new(System::qubit(1.0).unwrap(), gamma, 1.0, beta(b0), beta(b)).unwrap()
}

fn oscillator(d: usize, b0: f64, b: f64) -> ThermalScenario<f64> {
    ThermalScenario::new(System::oscillator(d, 1.0).unwrap(), 0.1, 1.0, beta(b0), beta(b))
        .unwrap()
}

fn nb(b: f64) -> f64 {
    1.0 / (b.exp() - 1.0)
}

#[test]
fn c01_qubit_spectral_gap_closed_form() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for k in 0..10 {
        let b = 0.2 + (5.0 - 0.2) * k as f64 / 9.0;
        for g in [0.05, 0.1, 1.0] {
            let sc = qubit(1.0, b, g);
            let s = decompose(&sc.liouvillian().unwrap()).unwrap();
            let expect = oracle_lambda1(b, 1.0, g).abs();
            worst = worst.max((s.gap() - expect).abs());
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-10, "gap deviation {worst:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("[PASS] C01 qubit spectral gap: max |gap - γ(1+2n_B)| = {worst:.2e} over 10×3 grid in {elapsed:?}");
}

#[test]
fn c02_overlap_c1_closed_form() {
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let b0 = 0.2 + (5.0 - 0.2) * i as f64 / 9.0;
            let b = 0.2 + (5.0 - 0.2) * j as f64 / 9.0;
            if b0 == b {
                continue;
            }
            let sc = qubit(b0, b, 0.1);
            let s = decompose(&sc.liouvillian().unwrap()).unwrap();
            let c = s.overlaps(&sc.initial_state().unwrap()).unwrap();
            let k = s.slowest_decay();
            // Rescale to the Λ₁ = diag(1,−1) convention.
            let scale = s.right_mode(k)[(0, 0)].re;
            let c1 = (c[k] * num_complex::Complex::new(scale, 0.0)).re;
            worst = worst.max((c1 - oracle_c1(b0, b, 1.0)).abs());
        }
    }
    assert!(worst < 1e-10, "c1 deviation {worst:e}");
    // Exact value 1/12 at (ln 3, ln 2).
    let sc = qubit(ln3(), LN2, 0.1);
    let s = decompose(&sc.liouvillian().unwrap()).unwrap();
    let c = s.overlaps(&sc.initial_state().unwrap()).unwrap();
    let k = s.slowest_decay();
    let c1 = (c[k] * num_complex::Complex::new(s.right_mode(k)[(0, 0)].re, 0.0)).re;
    assert!((c1 - 1.0 / 12.0).abs() < 1e-10);
    println!("[PASS] C02 overlap c1: max deviation {worst:.2e}; c1(ln3→ln2) = {c1:.12} ≈ 1/12");
}

#[test]
fn c03_sigma0_ratio() {
    let sc = qubit(ln3(), LN2, 0.1);
    let rep = sigma0_protocols(&sc).unwrap();
    let ratio = rep.ratio_definitional.unwrap();
    let expect = (1.0 + 2.0 * nb(LN2)) / (1.0 + 2.0 * nb(ln3()));
    assert!((expect - 1.5).abs() < 1e-14);
    assert!((ratio - expect).abs() < 1e-9, "definitional ratio {ratio}");
    let ratio_paper = rep.ratio_paper.unwrap();
    assert!((ratio_paper - expect).abs() < 1e-9, "paper ratio {ratio_paper}");
    // Identity across a pair grid.
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let bc = 0.8 + 0.7 * i as f64;
            let bh = 0.3 + 0.4 * j as f64;
            if bh >= bc {
                continue;
            }
            let rep = sigma0_protocols(&qubit(bc, bh, 0.1)).unwrap();
            let expect = (1.0 + 2.0 * nb(bh)) / (1.0 + 2.0 * nb(bc));
            worst = worst.max((rep.ratio_definitional.unwrap() - expect).abs());
            worst = worst.max((rep.ratio_paper.unwrap() - expect).abs());
        }
    }
    assert!(worst < 1e-9);
    println!("[PASS] C03 sigma0 ratio: (ln3,ln2) ratio = {ratio:.12} (= 3/2), max grid deviation {worst:.2e}");
}

#[test]
fn c04_asymmetry_inequalities() {
    let mut checked = 0usize;
    for i in 0..10 {
        for j in 0..10 {
            let bc = 0.3 + (5.0 - 0.3) * i as f64 / 9.0;
            let bh = 0.2 + (4.5 - 0.2) * j as f64 / 9.0;
            if bh >= bc {
                continue;
            }
            let rep = sigma0_protocols(&qubit(bc, bh, 0.1)).unwrap();
            assert!(rep.heating.gap > rep.cooling.gap, "gap ordering at ({bc},{bh})");
            assert!(
                rep.heating.sigma0_definitional > rep.cooling.sigma0_definitional,
                "sigma ordering at ({bc},{bh})"
            );
            checked += 1;
        }
    }
    println!("[PASS] C04 asymmetry inequalities: gapᴴ>gapᶜ and σ₀ᴴ>σ₀ᶜ on {checked} pairs, zero violations");
}

#[test]
fn c05_integrated_production_identity() {
    // Qubit: ∫σ = D(ρ₀‖τ) with the frozen reference value.
    let sc = qubit(ln3(), LN2, 0.1);
    let s = decompose(&sc.liouvillian().unwrap()).unwrap();
    let integral = integrate_sigma_exact(&sc, 20.0 / s.gap(), 1e-8).unwrap();
    let d0 = relative_entropy(&sc.initial_state().unwrap(), &sc.target_state().unwrap()).unwrap();
    assert!((d0 - 0.016416758629342720).abs() < 1e-12);
    let dev_q = (integral - d0).abs();
    assert!(dev_q < 1e-6, "qubit identity off by {dev_q:e}");

    // d = 4 oscillator.
    let sc = oscillator(4, ln3(), LN2);
    let s = decompose(&sc.liouvillian().unwrap()).unwrap();
    let integral = integrate_sigma_exact(&sc, 20.0 / s.gap(), 1e-8).unwrap();
    let d0 = relative_entropy(&sc.initial_state().unwrap(), &sc.target_state().unwrap()).unwrap();
    let dev_o = (integral - d0).abs();
    assert!(dev_o < 1e-6, "oscillator identity off by {dev_o:e}");
    println!("[PASS] C05 integrated production identity: qubit |Δ| = {dev_q:.2e}, oscillator |Δ| = {dev_o:.2e} (tol 1e-6)");
}

#[test]
fn c06_clausius_equals_relative_entropy_form() {
    let mut worst = 0.0f64;
    for sc in [qubit(ln3(), LN2, 0.1), qubit(0.5, 2.5, 0.3), oscillator(4, ln3(), LN2)] {
        let lop = sc.liouvillian().unwrap();
        let s = decompose(&lop).unwrap();
        let rho0 = sc.initial_state().unwrap();
        let tau = s.stationary_state().clone();
        let c = s.overlaps(&rho0).unwrap();
        let h = &sc.system.hamiltonian;
        for k in 0..=50 {
            let t = 10.0 / s.gap() * k as f64 / 50.0;
            let rho = evolve_spectral(&s, &c, t).unwrap();
            let a = entropy_production_exact(&lop, &rho, &tau).unwrap();
            let b = entropy_production_clausius(&lop, h, &rho, sc.beta).unwrap();
            worst = worst.max((a - b).abs());
        }
    }
    assert!(worst < 1e-9, "max pointwise difference {worst:e}");
    println!("[PASS] C06 Clausius vs relative-entropy σ: max pointwise |Δ| = {worst:.2e} (tol 1e-9)");
}

#[test]
fn c07_cross_method_evolution() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for sc in [qubit(ln3(), LN2, 0.1), oscillator(4, ln3(), LN2)] {
        let lop = sc.liouvillian().unwrap();
        let s = decompose(&lop).unwrap();
        let rho0 = sc.initial_state().unwrap();
        let c = s.overlaps(&rho0).unwrap();
        let grid: Vec<f64> = (0..=50).map(|k| 5.0 / s.gap() * k as f64 / 50.0).collect();
        let states = evolve_ode(&lop, &rho0, &grid).unwrap();
        for (k, st) in states.iter().enumerate() {
            let sp = evolve_spectral(&s, &c, grid[k]).unwrap();
            worst = worst.max((st.matrix() - sp.matrix()).max_abs());
        }
    }
    let elapsed = start.elapsed();
    assert!(worst < 1e-8, "cross-method deviation {worst:e}");
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!("[PASS] C07 cross-method evolution: max |spectral − RK4| = {worst:.2e} in {elapsed:?}");
}

#[test]
fn c08_perturbative_consistency() {
    // σ_modes/σ_exact → 1 linearly in Δβ around the target βω = ln 2.
    let target = LN2;
    let deltas = [1e-1, 3e-2, 1e-2, 3e-3];
    let mut points = Vec::new();
    for &d in &deltas {
        let sc = qubit(target + d, target, 0.1);
        let lop = sc.liouvillian().unwrap();
        let s = decompose(&lop).unwrap();
        let rho0 = sc.initial_state().unwrap();
        let tau = s.stationary_state().clone();
        let m = ModeDecomposition::new(&s, &rho0, &tau).unwrap();
        let modes = entropy_production_modes(&m, &s, 0.0);
        let exact = entropy_production_exact(&lop, &rho0, &tau).unwrap();
        let ratio = modes / exact;
        if (d - 1e-2f64).abs() < 1e-15 {
            assert!((ratio - 1.0).abs() < 2e-2, "ratio {ratio} at Δβ = 1e-2");
        }
        points.push((d.ln(), (ratio - 1.0f64).abs().ln()));
    }
    // Least-squares slope on the log-log points.
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!((0.8..=1.2).contains(&slope), "convergence order {slope}");
    println!("[PASS] C08 perturbative consistency: |σ_modes/σ_exact − 1| convergence order {slope:.3} in Δβ");
}

#[test]
fn c09_weighted_inner_product_suite() {
    let mut bio = 0.0f64;
    let mut ortho = 0.0f64;
    let mut selfadj = 0.0f64;
    let mut w_min = f64::INFINITY;
    let mut seed = 0xA11CEu64;
    let mut rand01 = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64
    };
    for sc in [qubit(ln3(), LN2, 0.1), oscillator(6, 1.0, LN2)] {
        let d = sc.system.dim();
        let lop = sc.liouvillian().unwrap();
        let s = decompose(&lop).unwrap();
        let tau = s.stationary_state().clone();
        bio = bio.max(s.biorthonormality_residual());
        let idx = s.decay_indices();
        for a in 0..idx.len() {
            for b in 0..a {
                if (s.eigenvalue(idx[a]) - s.eigenvalue(idx[b])).norm() < 1e-9 {
                    continue;
                }
                let v = weighted_inner(s.right_mode(idx[a]), s.right_mode(idx[b]), &tau).unwrap();
                ortho = ortho.max(v.norm());
            }
        }
        for w in s.mode_weights(&tau).unwrap() {
            w_min = w_min.min(w);
        }
        for _ in 0..10 {
            let x: CMat<f64> = CMat::diag(
                &(0..d)
                    .map(|_| num_complex::Complex::new(rand01() - 0.5, 0.0))
                    .collect::<Vec<_>>(),
            );
            let y: CMat<f64> = CMat::diag(
                &(0..d)
                    .map(|_| num_complex::Complex::new(rand01() - 0.5, 0.0))
                    .collect::<Vec<_>>(),
            );
            selfadj = selfadj.max(self_adjointness_residual(&lop, &x, &y, &tau).unwrap());
        }
    }
    assert!(bio < 1e-9, "biorthonormality {bio:e}");
    assert!(ortho < 1e-9, "weighted orthogonality {ortho:e}");
    assert!(selfadj < 1e-9, "self-adjointness {selfadj:e}");
    assert!(w_min > 0.0, "weight positivity {w_min:e}");
    println!("[PASS] C09 weighted-product suite: biortho {bio:.1e}, ortho {ortho:.1e}, self-adj {selfadj:.1e}, min W {w_min:.3e}");
}

#[test]
fn c10_phi_and_bound_chain() {
    // Round trip on [0, 50].
    let mut worst = 0.0f64;
    for k in 0..=500 {
        let x = 50.0 * k as f64 / 500.0;
        let xr = phi_inverse(x * x.tanh()).unwrap();
        worst = worst.max((xr - x).abs());
    }
    assert!(worst < 1e-10, "round trip {worst:e}");
    // Chain on the 50×50 log grid.
    for i in 0..50 {
        for j in 0..50 {
            let sigma = 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0);
            let alpha = 10f64.powf(-3.0 + 6.0 * j as f64 / 49.0);
            let b = tkur_bound(sigma, alpha, 0.0).unwrap();
            assert!(
                b.tkur_rhs >= b.max_rhs * (1.0 - 1e-9),
                "chain at σ={sigma:e}, α={alpha:e}"
            );
        }
    }
    // Limit recovery at σ/2α ∈ {1e-3, 1e3} (α = 1).
    let tur = tkur_bound(2e-3f64, 1.0, 0.0).unwrap();
    let tur_err = (tur.tkur_rhs * 1e-3 - 1.0).abs();
    assert!(tur_err < 1e-3);
    let kur = tkur_bound(2e3f64, 1.0, 0.0).unwrap();
    let kur_err = (kur.tkur_rhs - 1.0).abs();
    assert!(kur_err < 1e-3);
    println!("[PASS] C10 Φ and bound chain: round trip {worst:.1e}, chain holds on 50×50 grid, limit errors ({tur_err:.1e}, {kur_err:.1e})");
}

#[test]
fn c11_dynamical_activity() {
    let mut worst = 0.0f64;
    for k in 0..10 {
        let b = 0.2 + (5.0 - 0.2) * k as f64 / 9.0;
        for g in [0.05, 0.1, 1.0] {
            let sc = qubit(1.0, b, g);
            let (l1, l2) = sc.jump_ops().unwrap();
            let a = dynamical_activity(&[l1, l2], &sc.target_state().unwrap()).unwrap();
            worst = worst.max((a - oracle_activity(b, 1.0, g)).abs());
        }
    }
    assert!(worst < 1e-12, "activity deviation {worst:e}");
    // α = 2/15 at βω = ln 2, γ = 0.1.
    let sc = qubit(1.0, LN2, 0.1);
    let (l1, l2) = sc.jump_ops().unwrap();
    let a = dynamical_activity(&[l1, l2], &sc.target_state().unwrap()).unwrap();
    assert!((a - 2.0 / 15.0).abs() < 1e-12);
    // Heating dominance over scanned pairs.
    for i in 0..8 {
        for j in 0..8 {
            let bc = 0.4 + 0.5 * i as f64;
            let bh = 0.2 + 0.45 * j as f64;
            if bh >= bc {
                continue;
            }
            assert!(oracle_activity(bh, 1.0, 0.1) > oracle_activity(bc, 1.0, 0.1));
        }
    }
    println!("[PASS] C11 dynamical activity: max |generic − closed form| = {worst:.2e}; α(ln2) = 2/15; αᴴ > αᶜ on all pairs");
}

#[test]
fn c12_monte_carlo_heat_statistics() {
    let start = Instant::now();
    // Heating (ln 3 → ln 2), τ_op = 1/gap, n = 1e5.
    let sc_h = qubit(ln3(), LN2, 0.1);
    let gap_h = decompose(&sc_h.liouvillian().unwrap()).unwrap().gap();
    let cfg_h = TrajectoryConfig {
        scenario: sc_h.clone(),
        tau_op: 1.0 / gap_h,
        n_traj: 100_000,
        master_seed: 0xC0FFEE,
    };
    let stats_h = sample_trajectories(&cfg_h).unwrap();
    // Derived analytic mean: ω(p₁(τ) − p₁(0)) = 0.052676713…
    let q = QubitScenario::new(1.0, 0.1, ln3(), LN2).unwrap();
    let mean_expect = oracle_mean_heat(cfg_h.tau_op, &q);
    assert!((mean_expect - 0.05267671323571314).abs() < 1e-14);
    assert!(
        (stats_h.mean_heat - mean_expect).abs() < 3.0 * stats_h.stderr_mean,
        "mean {} vs {}",
        stats_h.mean_heat,
        mean_expect
    );

    // Determinism: identical seed → identical statistics.
    let again = sample_trajectories(&cfg_h).unwrap();
    assert_eq!(stats_h, again, "same-seed rerun must be bit-identical");

    // Bound verification for heating and cooling.
    let mut lines = Vec::new();
    for (label, sc, seed) in
        [("heating", sc_h, 0xC0FFEEu64), ("cooling", qubit(LN2, ln3(), 0.1), 0xBEEF)]
    {
        let lop = sc.liouvillian().unwrap();
        let s = decompose(&lop).unwrap();
        let cfg = TrajectoryConfig {
            scenario: sc.clone(),
            tau_op: 1.0 / s.gap(),
            n_traj: 100_000,
            master_seed: seed,
        };
        let stats = sample_trajectories(&cfg).unwrap();
        let sigma0 =
            entropy_production_exact(&lop, &sc.initial_state().unwrap(), s.stationary_state())
                .unwrap();
        let (l1, l2) = sc.jump_ops().unwrap();
        let alpha = dynamical_activity(&[l1, l2], s.stationary_state()).unwrap();
        let bound = tkur_bound(sigma0, alpha, 0.0).unwrap();
        let verdict = verify_tkur(&stats, &bound);
        assert_eq!(verdict, TkurVerdict::Satisfied, "{label}: F {} vs rhs {}", stats.f_phi, bound.tkur_rhs);
        lines.push(format!("{label} F_φ = {:.1} ≥ {:.1}", stats.f_phi, bound.tkur_rhs));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "[PASS] C12 Monte Carlo: mean heat within 3σ of {mean_expect:.7}; {}; deterministic rerun identical; {elapsed:?}",
        lines.join("; ")
    );
}

#[test]
fn c13_bound_comparison_scan() {
    // β₀ = 5, ħω = 1, γ = 0.1 over β ∈ [0.5, 10].
    let system = System::qubit(1.0).unwrap();
    let betas: Vec<f64> = (0..39).map(|k| 0.5 + (10.0 - 0.5) * k as f64 / 38.0).collect();
    let rows = asymmetry_scan(&system, 0.1, 1.0, beta(5.0), &betas).unwrap();

    let forms: [(&str, fn(&qrelax::thermo::ScanRow<f64>) -> f64); 2] = [
        ("definitional", |r| r.sigma0_definitional),
        ("paper", |r| r.sigma0_paper),
    ];
    for (label, pick) in forms {
        let two_over: Vec<f64> = rows
            .iter()
            .map(|r| {
                let s = pick(r);
                if s == 0.0 {
                    f64::INFINITY
                } else {
                    2.0 / s
                }
            })
            .collect();
        let one_over: Vec<f64> = rows.iter().map(|r| 1.0 / r.alpha_stationary).collect();
        // Extremes: 1/α dominates.
        let first = 0;
        let last = rows.len() - 1;
        assert!(
            one_over[first] > two_over[first],
            "{label}: hot extreme expects 1/α > 2/σ₀"
        );
        assert!(
            one_over[last] > two_over[last],
            "{label}: cold extreme expects 1/α > 2/σ₀"
        );
        // Interior window where 2/σ₀ dominates (excluding the divergent
        // degenerate row).
        let interior = rows.iter().enumerate().any(|(k, r)| {
            r.protocol != Protocol::Degenerate && two_over[k] > one_over[k]
        });
        assert!(interior, "{label}: no interior dominance window");
        // Record the crossing locations.
        let mut crossings = Vec::new();
        for k in 1..rows.len() {
            if rows[k].protocol == Protocol::Degenerate
                || rows[k - 1].protocol == Protocol::Degenerate
            {
                continue;
            }
            let before = two_over[k - 1] - one_over[k - 1];
            let after = two_over[k] - one_over[k];
            if before.signum() != after.signum() {
                crossings.push((rows[k - 1].beta, rows[k].beta));
            }
        }
        assert!(crossings.len() >= 2, "{label}: expected crossings on both flanks");
        println!(
            "[PASS] C13 scan ({label}): 1/α dominates at extremes, 2/σ₀ inside; crossings at {:?}",
            crossings
        );
    }
}

#[test]
fn c14_response_bound() {
    for (label, sc) in
        [("heating", qubit(ln3(), LN2, 0.1)), ("cooling", qubit(LN2, ln3(), 0.1))]
    {
        let s = decompose(&sc.liouvillian().unwrap()).unwrap();
        let r = response_bound_check(&sc, 1.0 / s.gap(), 100_000, None, 0xFEED).unwrap();
        assert!(!r.inconclusive, "{label} inconclusive");
        assert!(r.satisfied, "{label}: lhs {} rhs {}", r.lhs, r.rhs);
        println!("[PASS] C14 response bound ({label}): |∂γ⟨φ⟩|²/Var = {:.4} ≤ τ·ᾱ = {:.4}", r.lhs, r.rhs);
    }
}
