//! Quantum-jump Monte Carlo for diagonal thermal dynamics.
//!
//! The thermal jump structure closes on the energy populations, so the
//! unraveling is an exact classical jump process among energy eigenstates:
//! exponential waiting times from the total exit rate, channel choice
//! proportional to the rates, no discretization error.
//!
//! Determinism contract: per-trajectory generators are split off the master
//! seed by trajectory index, so results depend only on `(master_seed,
//! n_traj)` and are bit-identical regardless of scheduling or batching.

use crate::error::{Error, Result};
use crate::liouvillian::ThermalScenario;
use crate::scalar::Real;
use crate::thermo::BoundReport;

/// Sampling configuration for one scenario.
#[derive(Debug, Clone)]
pub struct TrajectoryConfig<T> {
    pub scenario: ThermalScenario<T>,
    /// Operational time window `[0, τ_op]` over which heat is counted.
    pub tau_op: T,
    pub n_traj: usize,
    pub master_seed: u64,
}

/// Heat-counting statistics over the trajectory ensemble. Heat is in units
/// of ħω when ω = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryStats<T> {
    pub n: usize,
    pub mean_heat: T,
    /// Unbiased sample variance.
    pub var_heat: T,
    /// `F_φ = τ_op · Var(φ)/⟨φ⟩²`.
    pub f_phi: T,
    pub stderr_mean: T,
    pub stderr_var: T,
    pub stderr_fphi: T,
    /// False when `⟨φ⟩²` is within 10× its squared standard error; `f_phi`
    /// is then a division by statistical zero.
    pub f_phi_reliable: bool,
    /// Fraction of trajectories ending in each energy eigenstate.
    pub final_populations: Vec<T>,
}

/// Verdict of the one-sided statistical bound comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TkurVerdict {
    Satisfied,
    Violated,
    Inconclusive,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based split: mixes the trajectory index into the master seed.
fn trajectory_seed(master: u64, index: u64) -> u64 {
    let mut s = master ^ index.wrapping_mul(0xA24B_AED4_963E_E407);
    splitmix64(&mut s)
}

/// Uniform in (0, 1].
fn uniform_open<T: Real>(state: &mut u64) -> T {
    let z = splitmix64(state) >> 11;
    T::of((z + 1) as f64 / (1u64 << 53) as f64)
}

/// Uniform in [0, 1).
fn uniform<T: Real>(state: &mut u64) -> T {
    let z = splitmix64(state) >> 11;
    T::of(z as f64 / (1u64 << 53) as f64)
}

/// Jump process specification in the energy eigenbasis.
struct JumpProcess<T> {
    energies: Vec<T>,
    initial: Vec<T>,
    /// rates[n] = list of (target, rate) with the total exit rate last.
    channels: Vec<Vec<(usize, T)>>,
    exit: Vec<T>,
}

impl<T: Real> JumpProcess<T> {
    fn from_scenario(sc: &ThermalScenario<T>) -> Result<Self> {
        let d = sc.system.dim();
        let lop = sc.liouvillian()?;
        // Diagonal closure must hold for the classical unraveling to be
        // exact: 𝓛 of every basis projector stays diagonal.
        for k in 0..d {
            let basis = crate::hilbert::DensityMatrix::basis_state(d, k);
            let out = lop.apply(&basis)?;
            if !out.is_diagonal(T::of(1e-12) * out.max_abs().max(T::one())) {
                return Err(Error::Domain(
                    "scenario does not close on populations; classical unraveling invalid".into(),
                ));
            }
        }

        let (energies, vecs) = sc.system.hamiltonian.eigensystem()?;
        let (l1, l2) = sc.jump_ops()?;
        let rho0 = sc.initial_state()?;
        let rho0_e = vecs.adjoint().mul_mat(rho0.matrix()).mul_mat(&vecs);
        let initial: Vec<T> = (0..d).map(|i| rho0_e[(i, i)].re.max(T::zero())).collect();

        let mut channels: Vec<Vec<(usize, T)>> = vec![Vec::new(); d];
        let mut exit = vec![T::zero(); d];
        for l in [&l1, &l2] {
            let le = vecs.adjoint().mul_mat(l).mul_mat(&vecs);
            for n in 0..d {
                for m in 0..d {
                    if m == n {
                        continue;
                    }
                    let w = le[(m, n)].norm_sqr();
                    if w > T::zero() {
                        channels[n].push((m, w));
                        exit[n] = exit[n] + w;
                    }
                }
            }
        }
        Ok(Self { energies, initial, channels, exit })
    }
}

/// Sample the heat-counting ensemble.
///
/// Each trajectory is an exact-time jump process; `φ` accumulates
/// `E_target − E_source` at every jump, so per trajectory it equals the
/// eigenstate path's final-minus-initial energy exactly.
pub fn sample_trajectories<T: Real>(cfg: &TrajectoryConfig<T>) -> Result<TrajectoryStats<T>> {
    if cfg.n_traj < 2 {
        return Err(Error::Domain("n_traj must be at least 2".into()));
    }
    if !(cfg.tau_op > T::zero()) || !cfg.tau_op.is_finite() {
        return Err(Error::Domain("tau_op must be positive and finite".into()));
    }
    let proc = JumpProcess::from_scenario(&cfg.scenario)?;
    let d = proc.energies.len();

    let mut heats: Vec<T> = Vec::with_capacity(cfg.n_traj);
    let mut final_counts = vec![0usize; d];
    for idx in 0..cfg.n_traj {
        let mut rng = trajectory_seed(cfg.master_seed, idx as u64);
        // Initial eigenstate from the Gibbs populations.
        let mut acc = T::zero();
        let u0: T = uniform(&mut rng);
        let mut state = d - 1;
        for (k, &p) in proc.initial.iter().enumerate() {
            acc = acc + p;
            if u0 < acc {
                state = k;
                break;
            }
        }
        let e_init = proc.energies[state];

        let mut t = T::zero();
        let mut phi = T::zero();
        loop {
            let r = proc.exit[state];
            if !(r > T::zero()) {
                break;
            }
            let u: T = uniform_open(&mut rng);
            t = t - u.ln() / r;
            if t > cfg.tau_op {
                break;
            }
            let mut pick: T = uniform::<T>(&mut rng) * r;
            let mut target = proc.channels[state].last().unwrap().0;
            for &(m, w) in &proc.channels[state] {
                if pick < w {
                    target = m;
                    break;
                }
                pick = pick - w;
            }
            phi = phi + (proc.energies[target] - proc.energies[state]);
            state = target;
        }
        debug_assert!(phi == proc.energies[state] - e_init, "heat bookkeeping identity");
        heats.push(phi);
        final_counts[state] += 1;
    }

    // Two-pass central moments (deterministic order by trajectory index).
    let nf = T::from_usize(cfg.n_traj).unwrap();
    let mean = heats.iter().copied().fold(T::zero(), |a, b| a + b) / nf;
    let (mut m2, mut m3, mut m4) = (T::zero(), T::zero(), T::zero());
    for &x in &heats {
        let dx = x - mean;
        let dx2 = dx * dx;
        m2 = m2 + dx2;
        m3 = m3 + dx2 * dx;
        m4 = m4 + dx2 * dx2;
    }
    let var = m2 / (nf - T::one());
    let mu2 = m2 / nf;
    let mu3 = m3 / nf;
    let mu4 = m4 / nf;
    let stderr_mean = (var / nf).sqrt();
    let stderr_var = ((mu4 - mu2 * mu2).max(T::zero()) / nf).sqrt();

    let f_phi = cfg.tau_op * var / (mean * mean);
    // Strict inequality so a degenerate sample (zero mean, zero spread)
    // stays unreliable instead of comparing 0 ≥ 0.
    let f_phi_reliable = mean * mean > T::of(10.0) * stderr_mean * stderr_mean;
    // Delta method for F = τ v/m²: includes the mean–variance covariance.
    let rel2 = {
        let v_rel = (stderr_var / var) * (stderr_var / var);
        let m_rel = (stderr_mean / mean) * (stderr_mean / mean);
        let cov = mu3 / nf; // Cov(mean, var) to leading order
        let cross = T::of(4.0) * cov / (mean * var);
        (v_rel + T::of(4.0) * m_rel - cross).max(T::zero())
    };
    let stderr_fphi = f_phi.abs() * rel2.sqrt();

    let final_populations =
        final_counts.iter().map(|&c| T::from_usize(c).unwrap() / nf).collect();

    Ok(TrajectoryStats {
        n: cfg.n_traj,
        mean_heat: mean,
        var_heat: var,
        f_phi,
        stderr_mean,
        stderr_var,
        stderr_fphi,
        f_phi_reliable,
        final_populations,
    })
}

/// One-sided statistical check `F_φ/(1+δ_φ)² ≥ tkur_rhs − 3·stderr_fphi`.
pub fn verify_tkur<T: Real>(stats: &TrajectoryStats<T>, bound: &BoundReport<T>) -> TkurVerdict {
    if !stats.f_phi_reliable {
        return TkurVerdict::Inconclusive;
    }
    let one = T::one();
    let corr = (one + bound.delta_phi) * (one + bound.delta_phi);
    let lhs = stats.f_phi / corr;
    if lhs >= bound.tkur_rhs - T::of(3.0) * stats.stderr_fphi {
        TkurVerdict::Satisfied
    } else {
        TkurVerdict::Violated
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::InverseTemperature;
    use crate::liouvillian::System;
    use crate::qubit_oracle::{oracle_mean_heat, oracle_population, QubitScenario};
    use crate::thermo::tkur_bound;

    fn beta(x: f64) -> InverseTemperature<f64> {
        InverseTemperature::new(x).unwrap()
    }

    fn heating_cfg(n_traj: usize, seed: u64) -> TrajectoryConfig<f64> {
        let sc = ThermalScenario::new(
            System::qubit(1.0).unwrap(),
            0.1,
            1.0,
            beta(3.0f64.ln()),
            beta(2.0f64.ln()),
        )
        .unwrap();
        TrajectoryConfig { scenario: sc, tau_op: 1.0 / 0.3, n_traj, master_seed: seed }
    }

    #[test]
    fn determinism_bit_identical() {
        let cfg = heating_cfg(2000, 0xABCDEF);
        let a = sample_trajectories(&cfg).unwrap();
        let b = sample_trajectories(&cfg).unwrap();
        assert_eq!(a, b);
        // Different seed shifts the estimate.
        let cfg2 = heating_cfg(2000, 0xABCDF0);
        let c = sample_trajectories(&cfg2).unwrap();
        assert!(c.mean_heat != a.mean_heat);
    }

    #[test]
    fn mean_heat_matches_analytic() {
        let cfg = heating_cfg(40_000, 42);
        let stats = sample_trajectories(&cfg).unwrap();
        let sc = QubitScenario::new(1.0, 0.1, 3.0f64.ln(), 2.0f64.ln()).unwrap();
        let expect = oracle_mean_heat(cfg.tau_op, &sc);
        assert!(
            (stats.mean_heat - expect).abs() < 3.0 * stats.stderr_mean,
            "mean {} vs analytic {} (3σ = {})",
            stats.mean_heat,
            expect,
            3.0 * stats.stderr_mean
        );
        // Occupation at τ_op is unbiased too.
        let (_, p1) = oracle_population(cfg.tau_op, &sc);
        let se = (p1 * (1.0 - p1) / stats.n as f64).sqrt();
        assert!((stats.final_populations[1] - p1).abs() < 3.0 * se);
    }

    #[test]
    fn stationary_start_mean_compatible_with_zero() {
        let sc = ThermalScenario::new(
            System::qubit(1.0).unwrap(),
            0.1,
            1.0,
            beta(2.0f64.ln()),
            beta(2.0f64.ln()),
        )
        .unwrap();
        let cfg = TrajectoryConfig { scenario: sc, tau_op: 3.0, n_traj: 20_000, master_seed: 7 };
        let stats = sample_trajectories(&cfg).unwrap();
        assert!(stats.mean_heat.abs() < 3.0 * stats.stderr_mean);
    }

    #[test]
    fn oscillator_occupations_match_ode() {
        let sc = ThermalScenario::new(
            System::oscillator(4, 1.0).unwrap(),
            0.1,
            1.0,
            beta(3.0f64.ln()),
            beta(2.0f64.ln()),
        )
        .unwrap();
        let tau_op = 4.0;
        let cfg =
            TrajectoryConfig { scenario: sc.clone(), tau_op, n_traj: 30_000, master_seed: 99 };
        let stats = sample_trajectories(&cfg).unwrap();
        let lop = sc.liouvillian().unwrap();
        let states =
            crate::dynamics::evolve_ode(&lop, &sc.initial_state().unwrap(), &[tau_op]).unwrap();
        let p = states[0].populations();
        for k in 0..4 {
            let se = (p[k].max(1e-9) * (1.0 - p[k]) / stats.n as f64).sqrt();
            assert!(
                (stats.final_populations[k] - p[k]).abs() < 3.0 * se.max(1e-4),
                "level {k}: mc {} vs ode {}",
                stats.final_populations[k],
                p[k]
            );
        }
    }

    #[test]
    fn tkur_negative_control() {
        let bound = tkur_bound(0.01, 0.1, 0.0).unwrap();
        let fake = TrajectoryStats {
            n: 1_000_000,
            mean_heat: 0.05,
            var_heat: 0.25,
            f_phi: bound.tkur_rhs / 2.0,
            stderr_mean: 1e-6,
            stderr_var: 1e-6,
            stderr_fphi: 1e-6,
            f_phi_reliable: true,
            final_populations: vec![0.5, 0.5],
        };
        assert_eq!(verify_tkur(&fake, &bound), TkurVerdict::Violated);
        let unreliable = TrajectoryStats { f_phi_reliable: false, ..fake };
        assert_eq!(verify_tkur(&unreliable, &bound), TkurVerdict::Inconclusive);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(sample_trajectories(&heating_cfg(1, 0)).is_err());
        let mut cfg = heating_cfg(10, 0);
        cfg.tau_op = -1.0;
        assert!(sample_trajectories(&cfg).is_err());
    }
}
