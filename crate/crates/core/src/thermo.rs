//! Dynamical activity, the inverse of x·tanh(x), the TUR/KUR/TKUR bound
//! chain, time-averaged rates, the heating-vs-cooling comparison report, and
//! the activity response bound.

use crate::cmat::CMat;
use crate::dynamics::{entropy_production_exact, evolve_spectral};
use crate::error::{Error, Result};
use crate::hilbert::{relative_entropy, DensityMatrix, InverseTemperature};
use crate::liouvillian::{System, ThermalScenario};
use crate::qubit_oracle::{oracle_mean_heat, oracle_sigma0, QubitScenario, SigmaForm};
use crate::scalar::Real;
use crate::spectral::decompose;
use crate::trajectories::{sample_trajectories, TrajectoryConfig};

/// Stationary dynamical activity `α = Σ_k tr(L_k τ L_k†)`.
pub fn dynamical_activity<T: Real>(jumps: &[CMat<T>], tau: &DensityMatrix<T>) -> Result<T> {
    activity_of(jumps, tau.matrix())
}

/// Time-resolved activity `Σ_k tr(L_k ρ L_k†)` for a transient state.
pub fn activity_instantaneous<T: Real>(jumps: &[CMat<T>], rho: &DensityMatrix<T>) -> Result<T> {
    activity_of(jumps, rho.matrix())
}

fn activity_of<T: Real>(jumps: &[CMat<T>], rho: &CMat<T>) -> Result<T> {
    let d = rho.nrows();
    let mut acc = T::zero();
    for l in jumps {
        if l.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: l.nrows() });
        }
        acc = acc + l.mul_mat(rho).mul_mat(&l.adjoint()).trace().re;
    }
    Ok(acc)
}

/// Inverse of `x ↦ x·tanh(x)` on `[0, ∞)`: bisection bracketing followed by
/// Newton polish. The map is strictly increasing, so bracketing is safe.
pub fn phi_inverse<T: Real>(y: T) -> Result<T> {
    if !(y >= T::zero()) || !y.is_finite() {
        return Err(Error::Domain("phi_inverse requires y >= 0".into()));
    }
    if y == T::zero() {
        return Ok(T::zero());
    }
    let f = |x: T| x * x.tanh() - y;
    let mut lo = T::zero();
    let mut hi = T::of(2.0).max(y + T::one());
    // Bisection to a 1e-8 bracket (bounded, and never finer than the
    // scalar can resolve).
    let width_target = T::tol(1e-8) * hi.max(T::one());
    let mut iters = 0;
    while hi - lo > width_target && iters < 200 {
        let mid = (lo + hi) * T::of(0.5);
        if f(mid) > T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        iters += 1;
    }
    // Newton polish.
    let mut x = (lo + hi) * T::of(0.5);
    for _ in 0..4 {
        let th = x.tanh();
        let deriv = th + x * (T::one() - th * th);
        if !(deriv > T::zero()) {
            break;
        }
        x = x - (x * th - y) / deriv;
    }
    Ok(x.max(T::zero()))
}

/// The σ/α bound chain for a current's scaled signal-to-noise ratio
/// `F_φ = τ·Var(φ)/⟨φ⟩²`:
/// `F_φ/(1+δ_φ)² ≥ (4α/σ²)·Φ(σ/2α)² ≥ max(2/σ, 1/α)`.
#[derive(Debug, Clone)]
pub struct BoundReport<T> {
    pub sigma: T,
    pub alpha: T,
    pub tur_rhs: T,
    pub kur_rhs: T,
    pub tkur_rhs: T,
    pub max_rhs: T,
    pub delta_phi: T,
    /// Measured `F_φ` with its standard error, once trajectories ran.
    pub f_phi: Option<(T, T)>,
}

/// Evaluate the bound chain for entropy production rate `σ > 0` and
/// activity `α > 0`; asserts the chain ordering internally.
pub fn tkur_bound<T: Real>(sigma: T, alpha: T, delta_phi: T) -> Result<BoundReport<T>> {
    if !(sigma > T::zero()) || !sigma.is_finite() {
        return Err(Error::Domain("sigma must be positive".into()));
    }
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(Error::Domain("alpha must be positive".into()));
    }
    let two = T::of(2.0);
    if !(delta_phi > -two) || delta_phi > T::zero() {
        return Err(Error::Domain("delta_phi must lie in (-2, 0]".into()));
    }
    let tur_rhs = two / sigma;
    let kur_rhs = T::one() / alpha;
    let y = sigma / (two * alpha);
    let phi = phi_inverse(y)?;
    let tkur_rhs = T::of(4.0) * alpha / (sigma * sigma) * phi * phi;
    let max_rhs = tur_rhs.max(kur_rhs);
    if tkur_rhs < max_rhs - T::of(1e-9) * max_rhs {
        return Err(Error::NumericalConsistency(format!(
            "bound chain violated: tkur {:?} < max {:?}",
            tkur_rhs.to_f64(),
            max_rhs.to_f64()
        )));
    }
    Ok(BoundReport { sigma, alpha, tur_rhs, kur_rhs, tkur_rhs, max_rhs, delta_phi, f_phi: None })
}

/// Time-averaged entropy production rate over `[0, τ_op]`:
/// `σ̄ = [D(ρ₀‖τ) − D(ρ(τ_op)‖τ)]/τ_op`.
pub fn sigma_time_averaged<T: Real>(scenario: &ThermalScenario<T>, tau_op: T) -> Result<T> {
    let lop = scenario.liouvillian()?;
    let s = decompose(&lop)?;
    let rho0 = scenario.initial_state()?;
    let tau = s.stationary_state().clone();
    let c = s.overlaps(&rho0)?;
    let d0 = relative_entropy(&rho0, &tau)?;
    let dt = relative_entropy(&evolve_spectral(&s, &c, tau_op)?, &tau)?;
    Ok((d0 - dt) / tau_op)
}

/// Time-averaged instantaneous activity `(1/τ_op)∫₀^{τ_op} α(t) dt`,
/// by trapezoid refinement on the spectrally evolved state.
pub fn alpha_time_averaged<T: Real>(scenario: &ThermalScenario<T>, tau_op: T) -> Result<T> {
    let lop = scenario.liouvillian()?;
    let s = decompose(&lop)?;
    let rho0 = scenario.initial_state()?;
    let c = s.overlaps(&rho0)?;
    let (l1, l2) = scenario.jump_ops()?;
    let jumps = [l1, l2];
    let f = |t: T| -> Result<T> {
        let rho = evolve_spectral(&s, &c, t)?;
        activity_instantaneous(&jumps, &rho)
    };
    let tol = T::of(1e-11);
    let mut n = 32usize;
    let mut prev: Option<T> = None;
    loop {
        let h = tau_op / T::from_usize(n).unwrap();
        let mut acc = (f(T::zero())? + f(tau_op)?) * T::of(0.5);
        for k in 1..n {
            acc = acc + f(h * T::from_usize(k).unwrap())?;
        }
        let integral = acc * h;
        if let Some(p) = prev {
            if (integral - p).abs() < tol * tau_op {
                return Ok(integral / tau_op);
            }
        }
        prev = Some(integral);
        n *= 2;
        if n > 1 << 20 {
            return Err(Error::NumericalConsistency("activity quadrature stalled".into()));
        }
    }
}

/// Per-protocol quantities entering the asymmetry comparison. The overlap
/// and weight are reported in the convention where the slowest decay mode's
/// dominant diagonal entry equals 1 (for the qubit: `Λ₁ = diag(1, −1)`).
#[derive(Debug, Clone)]
pub struct ProtocolData<T> {
    pub beta0: T,
    pub beta: T,
    pub gap: T,
    pub c1: T,
    pub w1: T,
    pub sigma0_definitional: T,
    /// Two-level closed form; only evaluated for the qubit system.
    pub sigma0_paper_form: Option<T>,
    pub alpha_stationary: T,
}

/// Heating-vs-cooling comparison for one (β_C, β_H) pair.
#[derive(Debug, Clone)]
pub struct AsymmetryReport<T> {
    pub heating: ProtocolData<T>,
    pub cooling: ProtocolData<T>,
    pub ratio_definitional: Option<T>,
    pub ratio_paper: Option<T>,
    pub gap_ratio: Option<T>,
    pub degenerate: bool,
}

fn protocol_data<T: Real>(
    system: &System<T>,
    gamma: T,
    omega: T,
    beta0: InverseTemperature<T>,
    beta: InverseTemperature<T>,
) -> Result<ProtocolData<T>> {
    let sc = ThermalScenario::new(system.clone(), gamma, omega, beta0, beta)?;
    let lop = sc.liouvillian()?;
    let s = decompose(&lop)?;
    let rho0 = sc.initial_state()?;
    let tau = s.stationary_state().clone();
    let c = s.overlaps(&rho0)?;
    let w = s.mode_weights(&tau)?;
    let j = s.slowest_decay();
    let k = s.decay_indices().iter().position(|&x| x == j).unwrap();
    // Rescale the slowest mode to its dominant-diagonal convention.
    let diag = s.right_mode(j).diagonal();
    let mut best = 0usize;
    for (i, z) in diag.iter().enumerate() {
        if z.norm() > diag[best].norm() + T::epsilon() {
            best = i;
        }
    }
    let scale = diag[best].re;
    let c1 = (c[j] * crate::scalar::cr(scale)).re;
    let w1 = w[k] / (scale * scale);

    let sigma0 = entropy_production_exact(&lop, &rho0, &tau)?;
    let paper = if system.name == "qubit" {
        let q = QubitScenario::new(omega, gamma, beta0.value(), beta.value())?;
        Some(oracle_sigma0(&q, SigmaForm::Paper))
    } else {
        None
    };
    let (l1, l2) = sc.jump_ops()?;
    let alpha = dynamical_activity(&[l1, l2], &tau)?;
    Ok(ProtocolData {
        beta0: beta0.value(),
        beta: beta.value(),
        gap: s.gap(),
        c1,
        w1,
        sigma0_definitional: sigma0,
        sigma0_paper_form: paper,
        alpha_stationary: alpha,
    })
}

/// Compare the heating protocol (β_C → β_H) against the cooling protocol
/// (β_H → β_C) for the temperature pair carried by `scenario`.
///
/// Verifies the asymmetry inequalities (heating has the larger gap and the
/// larger initial entropy production) and, for the qubit, the closed-form
/// ratio `σ₀ᴴ/σ₀ᶜ = (1+2n_B(β_H))/(1+2n_B(β_C))`.
pub fn sigma0_protocols<T: Real>(scenario: &ThermalScenario<T>) -> Result<AsymmetryReport<T>> {
    let (b_a, b_b) = (scenario.beta0.value(), scenario.beta.value());
    let beta_c = InverseTemperature::new(b_a.max(b_b))?;
    let beta_h = InverseTemperature::new(b_a.min(b_b))?;
    let degenerate = beta_c.value() == beta_h.value();

    let heating =
        protocol_data(&scenario.system, scenario.gamma, scenario.omega, beta_c, beta_h)?;
    let cooling =
        protocol_data(&scenario.system, scenario.gamma, scenario.omega, beta_h, beta_c)?;

    if degenerate {
        return Ok(AsymmetryReport {
            heating,
            cooling,
            ratio_definitional: None,
            ratio_paper: None,
            gap_ratio: None,
            degenerate: true,
        });
    }

    if !(heating.gap > cooling.gap) {
        return Err(Error::NumericalConsistency("heating gap not larger".into()));
    }
    if !(heating.sigma0_definitional > cooling.sigma0_definitional) {
        return Err(Error::NumericalConsistency("heating sigma0 not larger".into()));
    }
    let ratio_def = heating.sigma0_definitional / cooling.sigma0_definitional;
    let ratio_paper = match (heating.sigma0_paper_form, cooling.sigma0_paper_form) {
        (Some(h), Some(c)) => Some(h / c),
        _ => None,
    };
    if scenario.system.name == "qubit" {
        let nb = |b: T| T::one() / (b * scenario.omega).exp_m1();
        let expected = (T::one() + T::of(2.0) * nb(beta_h.value()))
            / (T::one() + T::of(2.0) * nb(beta_c.value()));
        if (ratio_def - expected).abs() > T::of(1e-9) {
            return Err(Error::NumericalConsistency(format!(
                "sigma0 ratio {:?} deviates from closed form {:?}",
                ratio_def.to_f64(),
                expected.to_f64()
            )));
        }
    }
    Ok(AsymmetryReport {
        gap_ratio: Some(heating.gap / cooling.gap),
        ratio_definitional: Some(ratio_def),
        ratio_paper,
        heating,
        cooling,
        degenerate: false,
    })
}

/// Relaxation direction of one scan row, derived from the sign of β − β₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Protocol {
    Heating,
    Cooling,
    Degenerate,
}

impl Protocol {
    pub fn label(&self) -> &'static str {
        match self {
            Protocol::Heating => "heating",
            Protocol::Cooling => "cooling",
            Protocol::Degenerate => "degenerate",
        }
    }
}

/// One row of the asymmetry scan: the protocol β₀ → β with everything the
/// bound comparison needs.
#[derive(Debug, Clone)]
pub struct ScanRow<T> {
    pub beta: T,
    pub protocol: Protocol,
    /// Initial entropy production rate, definitional evaluation.
    pub sigma0_definitional: T,
    /// Two-level closed-form expression at the same parameters.
    pub sigma0_paper: T,
    pub alpha_stationary: T,
    /// Bound chain value from the time-averaged (σ̄, ᾱ) pair over 1/gap;
    /// absent on the degenerate row.
    pub tkur_rhs_avg: Option<T>,
    pub gap: T,
    pub c1: T,
    pub w1: T,
}

/// Sweep the target temperature over `betas` at fixed β₀, emitting one
/// [`ScanRow`] per grid point.
pub fn asymmetry_scan<T: Real>(
    system: &System<T>,
    gamma: T,
    omega: T,
    beta0: InverseTemperature<T>,
    betas: &[T],
) -> Result<Vec<ScanRow<T>>> {
    let mut rows = Vec::with_capacity(betas.len());
    for &b in betas {
        let beta = InverseTemperature::new(b)?;
        let degenerate = (b - beta0.value()).abs() <= T::of(1e-12) * beta0.value().max(T::one());
        let protocol = if degenerate {
            Protocol::Degenerate
        } else if b < beta0.value() {
            Protocol::Heating
        } else {
            Protocol::Cooling
        };
        let mut data = protocol_data(system, gamma, omega, beta0, beta)?;
        if degenerate {
            // β = β₀: the rate is identically zero; suppress round-off so
            // the divergence of 2/σ₀ is represented exactly.
            data.sigma0_definitional = T::zero();
        }
        let paper = {
            let q = QubitScenario::new(omega, gamma, beta0.value(), b)?;
            oracle_sigma0(&q, SigmaForm::Paper)
        };
        let tkur_rhs_avg = if degenerate {
            None
        } else {
            let sc = ThermalScenario::new(system.clone(), gamma, omega, beta0, beta)?;
            let tau_op = T::one() / data.gap;
            let sbar = sigma_time_averaged(&sc, tau_op)?;
            let abar = alpha_time_averaged(&sc, tau_op)?;
            Some(tkur_bound(sbar, abar, T::zero())?.tkur_rhs)
        };
        rows.push(ScanRow {
            beta: b,
            protocol,
            sigma0_definitional: data.sigma0_definitional,
            sigma0_paper: paper,
            alpha_stationary: data.alpha_stationary,
            tkur_rhs_avg,
            gap: data.gap,
            c1: data.c1,
            w1: data.w1,
        });
    }
    Ok(rows)
}

/// Outcome of the activity response-bound check
/// `|∂_γ⟨φ⟩|²/Var(φ) ≤ τ_op·ᾱ`.
#[derive(Debug, Clone)]
pub struct ResponseCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub satisfied: bool,
    pub inconclusive: bool,
}

/// Check the response bound for the qubit: the γ-derivative of the mean
/// heat comes from a central finite difference of the analytic mean, the
/// variance from trajectories, and ᾱ from the time-averaged activity.
pub fn response_bound_check<T: Real>(
    scenario: &ThermalScenario<T>,
    tau_op: T,
    n_traj: usize,
    dgamma: Option<T>,
    master_seed: u64,
) -> Result<ResponseCheck<T>> {
    if scenario.system.name != "qubit" {
        return Err(Error::Domain("response check requires the qubit system".into()));
    }
    let step = dgamma.unwrap_or(T::of(1e-4) * scenario.gamma);
    let mean_at = |g: T| -> Result<T> {
        let q = QubitScenario::new(
            scenario.omega,
            g,
            scenario.beta0.value(),
            scenario.beta.value(),
        )?;
        Ok(oracle_mean_heat(tau_op, &q))
    };
    let grad = (mean_at(scenario.gamma + step)? - mean_at(scenario.gamma - step)?)
        / (T::of(2.0) * step);

    let cfg = TrajectoryConfig { scenario: scenario.clone(), tau_op, n_traj, master_seed };
    let stats = sample_trajectories(&cfg)?;
    let inconclusive =
        stats.mean_heat * stats.mean_heat < T::of(10.0) * stats.stderr_mean * stats.stderr_mean;

    let lhs = grad * grad / stats.var_heat;
    let rhs = tau_op * alpha_time_averaged(scenario, tau_op)?;
    // One-sided 3σ slack from the variance estimate entering the lhs.
    let slack = T::of(3.0) * lhs * (stats.stderr_var / stats.var_heat);
    let satisfied = lhs <= rhs + slack;
    Ok(ResponseCheck { lhs, rhs, satisfied, inconclusive })
}
