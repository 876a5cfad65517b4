//! Operator and state algebra: Hermitian operators, density matrices, Gibbs
//! states, entropies, and the Bose–Einstein occupation.
//!
//! Natural units throughout: ħ = k_B = 1. Energies, rates and inverse
//! temperatures are mutually consistent; entropies come out in units of k_B.

use crate::cmat::CMat;
use crate::eig::eigh;
use crate::error::{Error, Result};
use crate::scalar::{cr, Real};
use num_complex::Complex;

/// Hermitian matrix with validated symmetry.
#[derive(Debug, Clone)]
pub struct HermitianOperator<T> {
    matrix: CMat<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates `A = A†` within `1e-12 ·` (max absolute entry).
    pub fn new(matrix: CMat<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let tol = T::tol(1e-12) * matrix.max_abs().max(T::one());
        let res = matrix.herm_residual();
        if res > tol {
            return Err(Error::NotHermitian(res.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { matrix: matrix.hermitize() })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    /// Eigendecomposition, ascending energies.
    pub fn eigensystem(&self) -> Result<(Vec<T>, CMat<T>)> {
        eigh(&self.matrix)
    }
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T> {
    matrix: CMat<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace (1e-12) and positivity
    /// (smallest eigenvalue ≥ −1e-10).
    pub fn new(matrix: CMat<T>) -> Result<Self> {
        Self::with_eig_floor(matrix, -T::tol(1e-10))
    }

    /// Like [`new`](Self::new) with a caller-chosen eigenvalue floor, for
    /// states assembled from truncated mode expansions.
    pub fn with_eig_floor(matrix: CMat<T>, floor: T) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                got: matrix.ncols(),
            });
        }
        let scale = matrix.max_abs().max(T::one());
        let res = matrix.herm_residual();
        if res > T::tol(1e-12) * scale {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian, residual {:e}",
                res.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let tr = matrix.trace();
        let tr_err = (tr - cr(T::one())).norm();
        if tr_err > T::tol(1e-12) {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace != 1, deviation {:e}",
                tr_err.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let herm = matrix.hermitize();
        let (w, _) = eigh(&herm)?;
        let min = w[0];
        if min < floor {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {:e}",
                min.to_f64().unwrap_or(f64::NAN)
            )));
        }
        Ok(Self { matrix: herm })
    }

    /// Pure state `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = CMat::zeros(dim, dim);
        m[(k, k)] = cr(T::one());
        Self { matrix: m }
    }

    /// Diagonal state from a probability vector (entries nonnegative,
    /// summing to 1 within 1e-12).
    pub fn from_populations(p: &[T]) -> Result<Self> {
        let sum: T = p.iter().copied().fold(T::zero(), |a, b| a + b);
        if (sum - T::one()).abs() > T::tol(1e-12) || p.iter().any(|&x| x < -T::tol(1e-12)) {
            return Err(Error::InvalidDensityMatrix("populations must be a distribution".into()));
        }
        let entries: Vec<Complex<T>> = p.iter().map(|&x| cr(x / sum)).collect();
        Ok(Self { matrix: CMat::diag(&entries) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.matrix
    }

    pub fn populations(&self) -> Vec<T> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Spectral decomposition with eigenvalues ascending.
    pub fn eigensystem(&self) -> Result<(Vec<T>, CMat<T>)> {
        eigh(&self.matrix)
    }
}

/// Inverse temperature β ≥ 0 in units of 1/energy.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct InverseTemperature<T>(T);

impl<T: Real> InverseTemperature<T> {
    pub fn new(value: T) -> Result<Self> {
        if !value.is_finite() || value < T::zero() {
            return Err(Error::Domain("inverse temperature must be finite and nonnegative".into()));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> T {
        self.0
    }
}

/// Single bosonic bath: inverse temperature, coupling rate and the system
/// characteristic frequency (ħ = k_B = 1).
#[derive(Debug, Clone, Copy)]
pub struct BathSpec<T> {
    pub beta: InverseTemperature<T>,
    pub gamma: T,
    pub omega: T,
}

impl<T: Real> BathSpec<T> {
    pub fn new(beta: InverseTemperature<T>, gamma: T, omega: T) -> Result<Self> {
        if !(gamma > T::zero()) || !gamma.is_finite() {
            return Err(Error::Domain("coupling gamma must be positive".into()));
        }
        if !(omega > T::zero()) || !omega.is_finite() {
            return Err(Error::Domain("frequency omega must be positive".into()));
        }
        Ok(Self { beta, gamma, omega })
    }

    pub fn occupation(&self) -> Result<T> {
        bose_einstein(self.beta, self.omega)
    }
}

/// Bose–Einstein occupation `n_B = 1/(exp(βω) − 1)`.
///
/// β = 0 (or ω ≤ 0) is rejected: the occupation is undefined there.
pub fn bose_einstein<T: Real>(beta: InverseTemperature<T>, omega: T) -> Result<T> {
    let x = beta.value() * omega;
    if !(x > T::zero()) {
        return Err(Error::Domain("occupation undefined".into()));
    }
    // exp_m1 keeps precision for small βω.
    Ok(T::one() / x.exp_m1())
}

/// Gibbs state `exp(−βH)/Z`, computed with max-shifted exponents so that
/// arbitrarily large β never overflows.
pub fn gibbs_state<T: Real>(
    h: &HermitianOperator<T>,
    beta: InverseTemperature<T>,
) -> Result<DensityMatrix<T>> {
    let (energies, vecs) = h.eigensystem()?;
    let b = beta.value();
    // Shift by the largest −βE so every exponent is ≤ 0.
    let shifted: Vec<T> = energies.iter().map(|&e| -b * e).collect();
    let m = shifted.iter().copied().fold(T::neg_infinity(), T::max);
    let weights: Vec<T> = shifted.iter().map(|&x| (x - m).exp()).collect();
    let z: T = weights.iter().copied().fold(T::zero(), |a, c| a + c);
    let probs: Vec<Complex<T>> = weights.iter().map(|&w| cr(w / z)).collect();
    let rho = vecs.mul_mat(&CMat::diag(&probs)).mul_mat(&vecs.adjoint());
    DensityMatrix::new(rho)
}

/// Matrix logarithm of a positive-definite Hermitian matrix through its
/// eigendecomposition, with eigenvalues floored at `1e-300` (the entropy
/// functions apply the `0·ln 0 = 0` convention themselves).
pub(crate) fn ln_pd<T: Real>(m: &CMat<T>) -> Result<CMat<T>> {
    let (w, v) = eigh(m)?;
    let floor = T::of(1e-300).max(T::min_positive_value());
    let logd: Vec<Complex<T>> = w.iter().map(|&x| cr(x.max(floor).ln())).collect();
    Ok(v.mul_mat(&CMat::diag(&logd)).mul_mat(&v.adjoint()))
}

/// Von Neumann entropy `S = −tr(ρ ln ρ)` in units of k_B.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let (w, _) = rho.eigensystem()?;
    if w[0] < -T::tol(1e-10) {
        return Err(Error::InvalidDensityMatrix(format!(
            "negative eigenvalue {:e}",
            w[0].to_f64().unwrap_or(f64::NAN)
        )));
    }
    let mut s = T::zero();
    for &p in &w {
        if p > T::zero() {
            s = s - p * p.ln();
        }
    }
    Ok(s)
}

/// Relative entropy `D(ρ‖σ) = tr[ρ(ln ρ − ln σ)]` in units of k_B.
///
/// `σ` must be full rank (min eigenvalue > 1e-14).
pub fn relative_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    sigma_state: &DensityMatrix<T>,
) -> Result<T> {
    if rho.dim() != sigma_state.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), got: sigma_state.dim() });
    }
    let (q, _) = sigma_state.eigensystem()?;
    if q[0] <= T::of(1e-14) {
        return Err(Error::SingularState(q[0].to_f64().unwrap_or(0.0)));
    }
    let s = von_neumann_entropy(rho)?;
    let ln_sigma = ln_pd(sigma_state.matrix())?;
    // tr(ρ ln σ) is real for Hermitian arguments.
    let cross = rho.matrix().mul_mat(&ln_sigma).trace().re;
    Ok(-s - cross)
}
