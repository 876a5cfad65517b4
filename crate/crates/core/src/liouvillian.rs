//! Detailed-balance GKSL generators: thermal jump operators, the d²×d²
//! superoperator matrix, and the built-in system catalog.
//!
//! Vectorization is column stacking, fixed once for the whole crate:
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use crate::cmat::CMat;
use crate::error::{Error, Result};
use crate::hilbert::{
    bose_einstein, gibbs_state, BathSpec, DensityMatrix, HermitianOperator, InverseTemperature,
};
use crate::scalar::{c, cr, Real};
use num_complex::Complex;

/// Default cap on the system dimension (superoperators ≤ 256×256).
pub const DEFAULT_DIM_CAP: usize = 16;

/// A jump operator together with its bath, validated to strictly lower
/// energy: in the eigenbasis of `H`, `⟨m|A|n⟩ = 0` unless `E_m < E_n`.
#[derive(Debug, Clone)]
pub struct JumpOperatorSpec<T> {
    pub a: CMat<T>,
    pub bath: BathSpec<T>,
}

impl<T: Real> JumpOperatorSpec<T> {
    pub fn new(a: CMat<T>, h: &HermitianOperator<T>, bath: BathSpec<T>) -> Result<Self> {
        if a.nrows() != h.dim() || a.ncols() != h.dim() {
            return Err(Error::DimensionMismatch { expected: h.dim(), got: a.nrows() });
        }
        let scale = a.max_abs();
        if scale == T::zero() {
            return Err(Error::Domain("jump operator must be nonzero".into()));
        }
        let (energies, vecs) = h.eigensystem()?;
        let tilde = vecs.adjoint().mul_mat(&a).mul_mat(&vecs);
        let tol = T::tol(1e-12) * scale;
        let espread = (energies[h.dim() - 1] - energies[0]).max(T::one());
        let edeg = T::tol(1e-12) * espread;
        let mut worst = T::zero();
        for m in 0..h.dim() {
            for n in 0..h.dim() {
                if energies[m] < energies[n] - edeg {
                    continue; // strictly lowering entry, allowed
                }
                worst = worst.max(tilde[(m, n)].norm());
            }
        }
        if worst > tol {
            return Err(Error::NotLowering(worst.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { a, bath })
    }
}

/// Thermal pair `L₁ = √(γ(1+n_B))·A` (de-excitation), `L₂ = √(γ n_B)·A†`
/// (excitation).
pub fn thermal_jump_ops<T: Real>(a: &CMat<T>, bath: &BathSpec<T>) -> Result<(CMat<T>, CMat<T>)> {
    let n = bath.occupation()?;
    let down = (bath.gamma * (T::one() + n)).sqrt();
    let up = (bath.gamma * n).sqrt();
    Ok((a.scale_re(down), a.adjoint().scale_re(up)))
}

/// Detailed-balance residual `|n_B/(1+n_B) − exp(−βω)|`.
pub fn check_detailed_balance<T: Real>(bath: &BathSpec<T>) -> T {
    match bath.occupation() {
        Ok(n) => {
            let ratio = n / (T::one() + n);
            (ratio - (-bath.beta.value() * bath.omega).exp()).abs()
        }
        Err(_) => T::nan(),
    }
}

/// The generator as a d²×d² matrix acting on column-stacked states.
#[derive(Debug, Clone)]
pub struct SuperOperator<T> {
    dim: usize,
    matrix: CMat<T>,
}

impl<T: Real> SuperOperator<T> {
    /// Matrix realization of
    /// `ρ ↦ −i[H,ρ] + Σ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})`.
    pub fn build(h: &HermitianOperator<T>, jumps: &[CMat<T>]) -> Result<Self> {
        let d = h.dim();
        for l in jumps {
            if l.nrows() != d || l.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: l.nrows() });
            }
        }
        let id = CMat::identity(d);
        let hm = h.matrix();
        // −i(I ⊗ H − Hᵀ ⊗ I)
        let mi = c(T::zero(), -T::one());
        let mut m = (&id.kron(hm) - &hm.transpose().kron(&id)).scale(mi);
        let half = cr(T::of(0.5));
        for l in jumps {
            let ldl = l.adjoint().mul_mat(l); // L†L
            let jump_term = l.conj().kron(l);
            let anti = (&id.kron(&ldl) + &ldl.transpose().kron(&id)).scale(half);
            m = &(&m + &jump_term) - &anti;
        }
        Ok(Self { dim: d, matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    /// `𝓛[ρ]` for an arbitrary operator argument.
    pub fn apply_op(&self, x: &CMat<T>) -> Result<CMat<T>> {
        if x.nrows() != self.dim || x.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.nrows() });
        }
        let v = self.matrix.matvec(&x.vectorize());
        Ok(CMat::from_vectorized(self.dim, &v))
    }

    /// `𝓛[ρ]` for a state.
    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<CMat<T>> {
        self.apply_op(rho.matrix())
    }

    /// Max |entry| of `vec(tr)ᵀ 𝓛`; zero for a trace-preserving generator.
    pub fn trace_preservation_residual(&self) -> T {
        let d = self.dim;
        let mut worst = T::zero();
        for col in 0..d * d {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..d {
                acc = acc + self.matrix[(k * d + k, col)];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }
}

/// Heat current `Q̇ = tr(H 𝓛[ρ])` (energy absorbed by the system per time).
pub fn heat_current<T: Real>(
    h: &HermitianOperator<T>,
    lop: &SuperOperator<T>,
    rho: &DensityMatrix<T>,
) -> Result<T> {
    if h.dim() != lop.dim() {
        return Err(Error::DimensionMismatch { expected: lop.dim(), got: h.dim() });
    }
    let lrho = lop.apply(rho)?;
    Ok(h.matrix().mul_mat(&lrho).trace().re)
}

/// Built-in system catalog plus validated custom systems.
///
/// * `qubit`: `H = ω|1⟩⟨1|`, `A = |0⟩⟨1|`.
/// * `oscillator(d)`: `H = ω·diag(0..d−1)`, `A` the truncated lowering
///   operator with `√n` matrix elements. Detailed balance holds level by
///   level, so the truncated Gibbs state stays exactly stationary.
#[derive(Debug, Clone)]
pub struct System<T> {
    pub name: String,
    pub hamiltonian: HermitianOperator<T>,
    pub jump: CMat<T>,
}

impl<T: Real> System<T> {
    pub fn qubit(omega: T) -> Result<Self> {
        let h = HermitianOperator::new(CMat::diag(&[cr(T::zero()), cr(omega)]))?;
        let mut a = CMat::zeros(2, 2);
        a[(0, 1)] = cr(T::one());
        Ok(Self { name: "qubit".into(), hamiltonian: h, jump: a })
    }

    pub fn oscillator(d: usize, omega: T) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain("oscillator needs d >= 2".into()));
        }
        if d > DEFAULT_DIM_CAP {
            return Err(Error::DimensionCap { got: d, cap: DEFAULT_DIM_CAP });
        }
        let levels: Vec<Complex<T>> =
            (0..d).map(|k| cr(omega * T::from_usize(k).unwrap())).collect();
        let h = HermitianOperator::new(CMat::diag(&levels))?;
        let mut a = CMat::zeros(d, d);
        for m in 1..d {
            a[(m - 1, m)] = cr(T::from_usize(m).unwrap().sqrt());
        }
        Ok(Self { name: format!("oscillator({d})"), hamiltonian: h, jump: a })
    }

    /// Explicit `H` and `A`; `A` is validated for the strict-lowering
    /// property against `H`.
    pub fn custom(h: CMat<T>, a: CMat<T>, probe_bath: BathSpec<T>) -> Result<Self> {
        let d = h.nrows();
        if d > DEFAULT_DIM_CAP {
            return Err(Error::DimensionCap { got: d, cap: DEFAULT_DIM_CAP });
        }
        let h = HermitianOperator::new(h)?;
        let spec = JumpOperatorSpec::new(a, &h, probe_bath)?;
        Ok(Self { name: "custom".into(), hamiltonian: h, jump: spec.a })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }
}

/// Full problem statement: system, coupling, and the two inverse
/// temperatures of a relaxation protocol (start β₀, bath target β).
#[derive(Debug, Clone)]
pub struct ThermalScenario<T> {
    pub system: System<T>,
    pub gamma: T,
    pub omega: T,
    pub beta0: InverseTemperature<T>,
    pub beta: InverseTemperature<T>,
}

impl<T: Real> ThermalScenario<T> {
    pub fn new(
        system: System<T>,
        gamma: T,
        omega: T,
        beta0: InverseTemperature<T>,
        beta: InverseTemperature<T>,
    ) -> Result<Self> {
        if !(gamma > T::zero()) || !(omega > T::zero()) {
            return Err(Error::Domain("gamma and omega must be positive".into()));
        }
        Ok(Self { system, gamma, omega, beta0, beta })
    }

    /// β₀ = β: relaxation is trivial and asymmetry ratios are undefined.
    pub fn is_degenerate(&self) -> bool {
        self.beta0.value() == self.beta.value()
    }

    pub fn bath(&self) -> Result<BathSpec<T>> {
        BathSpec::new(self.beta, self.gamma, self.omega)
    }

    pub fn jump_ops(&self) -> Result<(CMat<T>, CMat<T>)> {
        thermal_jump_ops(&self.system.jump, &self.bath()?)
    }

    pub fn liouvillian(&self) -> Result<SuperOperator<T>> {
        let (l1, l2) = self.jump_ops()?;
        SuperOperator::build(&self.system.hamiltonian, &[l1, l2])
    }

    /// Initial Gibbs state at β₀.
    pub fn initial_state(&self) -> Result<DensityMatrix<T>> {
        gibbs_state(&self.system.hamiltonian, self.beta0)
    }

    /// Target Gibbs state at the bath temperature.
    pub fn target_state(&self) -> Result<DensityMatrix<T>> {
        gibbs_state(&self.system.hamiltonian, self.beta)
    }

    pub fn occupation0(&self) -> Result<T> {
        bose_einstein(self.beta0, self.omega)
    }

    pub fn occupation(&self) -> Result<T> {
        bose_einstein(self.beta, self.omega)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cr;

    fn beta(x: f64) -> InverseTemperature<f64> {
        InverseTemperature::new(x).unwrap()
    }

    fn scenario(b0: f64, b: f64) -> ThermalScenario<f64> {
        ThermalScenario::new(System::qubit(1.0).unwrap(), 0.1, 1.0, beta(b0), beta(b)).unwrap()
    }

    #[test]
    fn thermal_rates() {
        let bath = BathSpec::new(beta(2.0f64.ln()), 0.1, 1.0).unwrap();
        let sys = System::qubit(1.0).unwrap();
        let (l1, l2) = thermal_jump_ops(&sys.jump, &bath).unwrap();
        // n_B = 1: ‖L₁‖² = γ(1+n) = 0.2, ‖L₂‖² = γn = 0.1.
        let r1 = l1.fro_norm().powi(2);
        let r2 = l2.fro_norm().powi(2);
        assert!((r1 - 0.2).abs() < 1e-14);
        assert!((r2 - 0.1).abs() < 1e-14);
    }

    #[test]
    fn rate_ratio_matches_detailed_balance() {
        let sys = System::qubit(1.0).unwrap();
        for k in 1..=20 {
            let b = 0.25 * k as f64;
            let bath = BathSpec::new(beta(b), 0.1, 1.0).unwrap();
            let (l1, l2) = thermal_jump_ops(&sys.jump, &bath).unwrap();
            let ratio = l2.fro_norm().powi(2) / l1.fro_norm().powi(2);
            assert!((ratio - (-b).exp()).abs() < 1e-13);
            assert!(check_detailed_balance(&bath) < 1e-15);
        }
    }

    #[test]
    fn gamma_to_zero_kills_jumps() {
        let sys = System::qubit(1.0).unwrap();
        let bath = BathSpec::new(beta(1.0), 1e-30, 1.0).unwrap();
        let (l1, l2) = thermal_jump_ops(&sys.jump, &bath).unwrap();
        assert!(l1.max_abs() < 1e-14 && l2.max_abs() < 1e-14);
    }

    #[test]
    fn zero_hamiltonian_no_jumps_is_zero_superoperator() {
        let h = HermitianOperator::new(CMat::<f64>::zeros(2, 2)).unwrap();
        let lop = SuperOperator::build(&h, &[]).unwrap();
        assert!(lop.matrix().max_abs() == 0.0);
    }

    #[test]
    fn qubit_population_block() {
        let sc = scenario(3.0f64.ln(), 2.0f64.ln());
        let lop = sc.liouvillian().unwrap();
        let m = lop.matrix();
        // Population sector in vec ordering: entries (0,0) ↔ index 0 and
        // (1,1) ↔ index 3. n_B = 1, γ = 0.1.
        let (g_up, g_dn) = (0.1, 0.2);
        assert!((m[(0, 0)].re + g_up).abs() < 1e-14);
        assert!((m[(0, 3)].re - g_dn).abs() < 1e-14);
        assert!((m[(3, 0)].re - g_up).abs() < 1e-14);
        assert!((m[(3, 3)].re + g_dn).abs() < 1e-14);
        assert!(m[(0, 0)].im.abs() < 1e-14);
    }

    #[test]
    fn gibbs_is_stationary() {
        let sc = scenario(3.0f64.ln(), 2.0f64.ln());
        let lop = sc.liouvillian().unwrap();
        let tau = sc.target_state().unwrap();
        let v = lop.matrix().matvec(&tau.matrix().vectorize());
        let norm = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(norm < 1e-10 * sc.gamma);

        // Oscillator: truncated Gibbs stays exactly stationary.
        let sys = System::oscillator(5, 1.0).unwrap();
        let sc = ThermalScenario::new(sys, 0.1, 1.0, beta(1.0), beta(0.8)).unwrap();
        let lop = sc.liouvillian().unwrap();
        let tau = sc.target_state().unwrap();
        let v = lop.matrix().matvec(&tau.matrix().vectorize());
        let norm = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(norm < 1e-10 * sc.gamma);
    }

    #[test]
    fn trace_and_hermiticity_preservation() {
        let sc = scenario(1.7, 0.9);
        let lop = sc.liouvillian().unwrap();
        assert!(lop.trace_preservation_residual() < 1e-10);

        let rho = DensityMatrix::from_populations(&[0.6, 0.4]).unwrap();
        let lrho = lop.apply(&rho).unwrap();
        assert!(lrho.trace().norm() < 1e-10);
        assert!(lrho.herm_residual() < 1e-10);
    }

    #[test]
    fn population_flux_from_initial_gibbs() {
        // dp₁/dt at τ_{β₀} equals γ(n − n₀)/(1 + 2n₀).
        let sc = scenario(3.0f64.ln(), 2.0f64.ln());
        let lop = sc.liouvillian().unwrap();
        let rho0 = sc.initial_state().unwrap();
        let lrho = lop.apply(&rho0).unwrap();
        let n0 = sc.occupation0().unwrap();
        let n = sc.occupation().unwrap();
        let expected = sc.gamma * (n - n0) / (1.0 + 2.0 * n0);
        assert!((lrho[(1, 1)].re - expected).abs() < 1e-13);
        assert!((lrho[(0, 0)].re + expected).abs() < 1e-13);
    }

    #[test]
    fn heat_current_qubit() {
        let sc = scenario(3.0f64.ln(), 2.0f64.ln());
        let lop = sc.liouvillian().unwrap();
        // Stationary state carries no current.
        let tau = sc.target_state().unwrap();
        assert!(heat_current(&sc.system.hamiltonian, &lop, &tau).unwrap().abs() < 1e-10);
        // Heating from τ_{β₀}: Q̇ = ω γ (n − n₀)/(1+2n₀) > 0.
        let rho0 = sc.initial_state().unwrap();
        let q = heat_current(&sc.system.hamiltonian, &lop, &rho0).unwrap();
        let (n0, n) = (sc.occupation0().unwrap(), sc.occupation().unwrap());
        let expected = sc.omega * sc.gamma * (n - n0) / (1.0 + 2.0 * n0);
        assert!((q - expected).abs() < 1e-13);
        assert!(q > 0.0, "heating absorbs heat");
        // Doubling γ doubles the current.
        let sc2 = ThermalScenario::new(
            System::qubit(1.0).unwrap(),
            0.2,
            1.0,
            beta(3.0f64.ln()),
            beta(2.0f64.ln()),
        )
        .unwrap();
        let q2 = heat_current(&sc2.system.hamiltonian, &sc2.liouvillian().unwrap(), &rho0).unwrap();
        assert!((q2 - 2.0 * q).abs() < 1e-13);
    }

    #[test]
    fn diagonal_closure() {
        let sys = System::oscillator(4, 1.0).unwrap();
        let sc = ThermalScenario::new(sys, 0.1, 1.0, beta(1.1), beta(0.6)).unwrap();
        let lop = sc.liouvillian().unwrap();
        let rho = DensityMatrix::from_populations(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let lrho = lop.apply(&rho).unwrap();
        assert!(lrho.is_diagonal(1e-12));
    }

    #[test]
    fn lowering_validation() {
        let h = HermitianOperator::new(CMat::diag(&[cr(0.0f64), cr(1.0)])).unwrap();
        let bath = BathSpec::new(beta(1.0), 0.1, 1.0).unwrap();
        // Raising operator is rejected.
        let mut raise = CMat::zeros(2, 2);
        raise[(1, 0)] = cr(1.0);
        assert!(JumpOperatorSpec::new(raise, &h, bath).is_err());
        // Lowering operator passes.
        let mut lower = CMat::zeros(2, 2);
        lower[(0, 1)] = cr(1.0);
        assert!(JumpOperatorSpec::new(lower, &h, bath).is_ok());
    }

    #[test]
    fn dimension_cap_enforced() {
        assert!(matches!(
            System::<f64>::oscillator(17, 1.0),
            Err(Error::DimensionCap { got: 17, cap: 16 })
        ));
    }
}
