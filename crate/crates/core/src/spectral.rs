//! Spectral decomposition of the generator: eigenvalues with mode
//! classification, biorthonormal left/right eigenmatrix pairs, the spectral
//! gap, initial-state overlaps, and weighted-inner-product machinery.
//!
//! The decay modes (real negative eigenvalues) are Hermitized, orthogonalized
//! within degenerate eigenspaces under the weighted inner product
//! `(X, Y)_W = tr(X† τ⁻¹ Y)`, and sign-fixed so that the largest-magnitude
//! diagonal entry is positive. Left modes are then recomputed from the
//! inverse of the right-eigenvector matrix, which restores biorthonormality
//! `tr(Λ_i^ℓ Λ_j^r) = δ_ij` exactly.

use crate::cmat::CMat;
use crate::eig::{cond_one, eig, Lu};
use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::liouvillian::SuperOperator;
use crate::scalar::{cr, Real};
use num_complex::Complex;

/// Condition-number threshold beyond which the generator is treated as
/// non-diagonalizable.
const COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeClass {
    /// The unique zero eigenvalue; right mode is the stationary state.
    Stationary,
    /// Real negative eigenvalue, Hermitian traceless right mode.
    Decay,
    /// Member of a complex-conjugate pair.
    Coherence,
}

/// Eigenvalues, classified modes, biorthonormal eigenmatrix pairs and the
/// spectral gap of one generator.
#[derive(Debug, Clone)]
pub struct SpectralData<T> {
    dim: usize,
    eigenvalues: Vec<Complex<T>>,
    right: Vec<CMat<T>>,
    left: Vec<CMat<T>>,
    class: Vec<ModeClass>,
    decay_indices: Vec<usize>,
    gap: T,
    epsilon_class: T,
    stationary: DensityMatrix<T>,
}

impl<T: Real> SpectralData<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of modes, `d²`.
    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalue(&self, j: usize) -> Complex<T> {
        self.eigenvalues[j]
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn right_mode(&self, j: usize) -> &CMat<T> {
        &self.right[j]
    }

    pub fn left_mode(&self, j: usize) -> &CMat<T> {
        &self.left[j]
    }

    pub fn class(&self, j: usize) -> ModeClass {
        self.class[j]
    }

    pub fn classes(&self) -> &[ModeClass] {
        &self.class
    }

    /// Decay-mode indices ordered by ascending `|Re λ|`.
    pub fn decay_indices(&self) -> &[usize] {
        &self.decay_indices
    }

    pub fn decay_count(&self) -> usize {
        self.decay_indices.len()
    }

    /// Index of the slowest decay mode.
    pub fn slowest_decay(&self) -> usize {
        self.decay_indices[0]
    }

    /// `min |Re λ|` over the decay modes (the real-eigenvalue sector); its
    /// inverse is the thermalization timescale.
    pub fn gap(&self) -> T {
        self.gap
    }

    pub fn epsilon_class(&self) -> T {
        self.epsilon_class
    }

    /// Stationary state (the zero mode, normalized to unit trace).
    pub fn stationary_state(&self) -> &DensityMatrix<T> {
        &self.stationary
    }

    /// Overlaps `c_j = tr(Λ_j^ℓ ρ₀)` for every mode (the stationary entry is
    /// the trace normalization check and comes out ≈ 1).
    pub fn overlaps(&self, rho0: &DensityMatrix<T>) -> Result<Vec<Complex<T>>> {
        if rho0.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: rho0.dim() });
        }
        Ok(self
            .left
            .iter()
            .map(|l| l.mul_mat(rho0.matrix()).trace())
            .collect())
    }

    /// Weights `W_j = tr(Λ_j^r τ⁻¹ Λ_j^r)/2 > 0`, aligned with
    /// [`decay_indices`](Self::decay_indices).
    pub fn mode_weights(&self, tau: &DensityMatrix<T>) -> Result<Vec<T>> {
        let scale = T::tol(1e-8);
        let mut weights = Vec::with_capacity(self.decay_indices.len());
        for &j in &self.decay_indices {
            let lam = &self.right[j];
            let res = lam.herm_residual();
            if res > scale * lam.max_abs().max(T::one()) {
                return Err(Error::NonHermitianDecayMode(res.to_f64().unwrap_or(f64::NAN)));
            }
            let w = weighted_inner(lam, lam, tau)?;
            let half = T::of(0.5);
            let wj = w.re * half;
            if !(wj > T::zero()) {
                return Err(Error::NumericalConsistency(format!(
                    "nonpositive mode weight {:?}",
                    wj.to_f64()
                )));
            }
            weights.push(wj);
        }
        Ok(weights)
    }

    /// Largest off-diagonal of `tr(Λ_i^ℓ Λ_j^r) − δ_ij`.
    pub fn biorthonormality_residual(&self) -> T {
        let n = self.n_modes();
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let p = self.left[i].mul_mat(&self.right[j]).trace();
                let target = if i == j { cr(T::one()) } else { cr(T::zero()) };
                worst = worst.max((p - target).norm());
            }
        }
        worst
    }
}

/// Per-initial-state decomposition data: overlaps for all modes plus the
/// decay-mode weights for the target state.
#[derive(Debug, Clone)]
pub struct ModeDecomposition<T> {
    pub overlaps: Vec<Complex<T>>,
    pub weights: Vec<T>,
    pub decay_count: usize,
}

impl<T: Real> ModeDecomposition<T> {
    pub fn new(
        spectral: &SpectralData<T>,
        rho0: &DensityMatrix<T>,
        tau: &DensityMatrix<T>,
    ) -> Result<Self> {
        Ok(Self {
            overlaps: spectral.overlaps(rho0)?,
            weights: spectral.mode_weights(tau)?,
            decay_count: spectral.decay_count(),
        })
    }
}

/// Weighted inner product `(X, Y)_W = tr(X† τ⁻¹ Y)`, evaluated in the
/// eigenbasis of `τ`; `τ` must be full rank.
pub fn weighted_inner<T: Real>(
    x: &CMat<T>,
    y: &CMat<T>,
    tau: &DensityMatrix<T>,
) -> Result<Complex<T>> {
    let d = tau.dim();
    if x.nrows() != d || y.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x.nrows() });
    }
    let (q, u) = tau.eigensystem()?;
    if q[0] <= T::of(1e-14) {
        return Err(Error::SingularState(q[0].to_f64().unwrap_or(0.0)));
    }
    let xe = u.adjoint().mul_mat(x).mul_mat(&u);
    let ye = u.adjoint().mul_mat(y).mul_mat(&u);
    let mut acc = Complex::new(T::zero(), T::zero());
    for m in 0..d {
        let wm = cr(T::one() / q[m]);
        for n in 0..d {
            acc = acc + xe[(m, n)].conj() * wm * ye[(m, n)];
        }
    }
    Ok(acc)
}

/// Spectrally decompose a generator into classified biorthonormal modes.
pub fn decompose<T: Real>(lop: &SuperOperator<T>) -> Result<SpectralData<T>> {
    let d = lop.dim();
    let n = d * d;
    let (vals, vecs) = eig(lop.matrix())?;

    let spectral_radius = vals.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    // 1e-10 at f64; widened to a multiple of machine epsilon for scalars
    // that cannot resolve that.
    let eps_class =
        T::of(1e-10).max(T::epsilon() * T::of(100.0)) * spectral_radius.max(T::one());

    // Complete positivity: no eigenvalue may sit in the right half plane.
    if let Some(bad) = vals.iter().find(|z| z.re > eps_class) {
        return Err(Error::NumericalConsistency(format!(
            "eigenvalue with positive real part: {:?}",
            bad.re.to_f64()
        )));
    }

    // Exactly one eigenvalue at zero.
    let zero_count = vals.iter().filter(|z| z.norm() < eps_class).count();
    if zero_count != 1 {
        return Err(Error::DegenerateStationarySpace(zero_count));
    }
    let s_idx = (0..n).min_by(|&i, &j| vals[i].norm().partial_cmp(&vals[j].norm()).unwrap()).unwrap();

    // Stationary first, then ascending |Re λ| with ties by ascending Im λ.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let key = |k: usize| (k != s_idx, vals[k].re.abs(), vals[k].im);
        let (ai, bi, ci) = key(i);
        let (aj, bj, cj) = key(j);
        ai.cmp(&aj)
            .then(bi.partial_cmp(&bj).unwrap())
            .then(ci.partial_cmp(&cj).unwrap())
    });

    let eigenvalues: Vec<Complex<T>> = order.iter().map(|&k| vals[k]).collect();
    let mut right: Vec<CMat<T>> = order
        .iter()
        .map(|&k| CMat::from_vectorized(d, vecs.column(k)))
        .collect();

    // Classify.
    let mut class = vec![ModeClass::Coherence; n];
    class[0] = ModeClass::Stationary;
    for j in 1..n {
        if eigenvalues[j].im.abs() < eps_class {
            class[j] = ModeClass::Decay;
        }
    }

    // Stationary mode: unit trace, validated as a state.
    let tr = right[0].trace();
    if tr.norm() < T::of(1e-12) {
        return Err(Error::NumericalConsistency("stationary mode is traceless".into()));
    }
    right[0] = right[0].scale(cr(T::one()) / tr);
    let stationary = DensityMatrix::new(right[0].clone())?;
    right[0] = stationary.matrix().clone();

    // Hermitize decay modes. Eigenvectors carry an arbitrary global phase;
    // rotate the dominant diagonal entry onto the real axis first, falling
    // back to the dominant entry pair when the diagonal is negligible.
    let herm_tol = T::tol(1e-8);
    for j in 1..n {
        if class[j] != ModeClass::Decay {
            continue;
        }
        let scale = right[j].max_abs().max(T::min_positive_value());
        let diag = right[j].diagonal();
        let mut best = 0usize;
        for (i, z) in diag.iter().enumerate() {
            if z.norm() > diag[best].norm() {
                best = i;
            }
        }
        let phi = if diag[best].norm() > T::of(1e-6) * scale {
            diag[best].arg()
        } else {
            let mut bi = (0, 0);
            let mut bv = T::zero();
            for a in 0..d {
                for b in 0..d {
                    if right[j][(a, b)].norm() > bv {
                        bv = right[j][(a, b)].norm();
                        bi = (a, b);
                    }
                }
            }
            let half = T::of(0.5);
            (right[j][(bi.0, bi.1)].arg() + right[j][(bi.1, bi.0)].arg()) * half
        };
        let rot = Complex::from_polar(T::one(), -phi);
        right[j] = right[j].scale(rot);
        let res = right[j].herm_residual();
        if res > herm_tol * scale {
            return Err(Error::NonHermitianDecayMode(res.to_f64().unwrap_or(f64::NAN)));
        }
        right[j] = right[j].hermitize();
    }

    // Orthogonalize degenerate decay eigenspaces under the weighted product.
    let deg_tol = T::tol(1e-9) * spectral_radius.max(T::one());
    let decay_order: Vec<usize> = (1..n).filter(|&j| class[j] == ModeClass::Decay).collect();
    let mut g = 0;
    while g < decay_order.len() {
        let mut h = g + 1;
        while h < decay_order.len()
            && (eigenvalues[decay_order[h]] - eigenvalues[decay_order[g]]).norm() < deg_tol
        {
            h += 1;
        }
        if h - g > 1 {
            for a in g..h {
                let ja = decay_order[a];
                let mut v = right[ja].clone();
                for b in g..a {
                    let jb = decay_order[b];
                    let num = weighted_inner(&right[jb], &v, &stationary)?;
                    let den = weighted_inner(&right[jb], &right[jb], &stationary)?;
                    v = &v - &right[jb].scale(num / den);
                }
                right[ja] = v;
            }
        }
        g = h;
    }

    // Sign fix: largest-magnitude diagonal entry positive (first index wins
    // ties), with unit Frobenius normalization for a stable convention.
    for j in 1..n {
        if class[j] != ModeClass::Decay {
            continue;
        }
        let f = right[j].fro_norm();
        if f > T::zero() {
            right[j] = right[j].scale_re(T::one() / f);
        }
        let diag = right[j].diagonal();
        let mut best = 0usize;
        for (i, z) in diag.iter().enumerate() {
            if z.norm() > diag[best].norm() + T::epsilon() {
                best = i;
            }
        }
        if diag[best].re < T::zero() {
            right[j] = -&right[j];
        }
    }

    // Rebuild the eigenvector matrix and recompute left modes from its
    // inverse; this makes tr(Λ_i^ℓ Λ_j^r) = δ_ij hold to working precision.
    let mut v = CMat::zeros(n, n);
    for (j, mode) in right.iter().enumerate() {
        v.set_column(j, &mode.vectorize());
    }
    let lu = Lu::new(&v).map_err(|_| Error::NonDiagonalizable(f64::INFINITY))?;
    let v_inv = lu.inverse();
    let cond = cond_one(&v, &v_inv);
    if cond.to_f64().unwrap_or(f64::INFINITY) >= COND_LIMIT {
        return Err(Error::NonDiagonalizable(cond.to_f64().unwrap_or(f64::INFINITY)));
    }
    let left: Vec<CMat<T>> = (0..n)
        .map(|i| {
            let row: Vec<Complex<T>> = (0..n).map(|k| v_inv[(i, k)]).collect();
            CMat::from_vectorized(d, &row).transpose()
        })
        .collect();

    // Tracelessness of non-stationary right modes.
    for j in 1..n {
        let t = right[j].trace().norm();
        if t > T::tol(1e-9) * right[j].max_abs().max(T::one()) {
            return Err(Error::NumericalConsistency(format!(
                "non-stationary mode {j} has trace {:e}",
                t.to_f64().unwrap_or(f64::NAN)
            )));
        }
    }

    let decay_indices = decay_order;
    if decay_indices.is_empty() {
        return Err(Error::Domain("generator has no decay modes".into()));
    }
    let gap = eigenvalues[decay_indices[0]].re.abs();

    Ok(SpectralData {
        dim: d,
        eigenvalues,
        right,
        left,
        class,
        decay_indices,
        gap,
        epsilon_class: eps_class,
        stationary,
    })
}

/// Spectral gap accessor; errors when the decomposition holds no decay mode.
pub fn spectral_gap<T: Real>(s: &SpectralData<T>) -> Result<T> {
    if s.decay_indices.is_empty() {
        return Err(Error::Domain("no decay modes".into()));
    }
    Ok(s.gap())
}

/// Self-adjointness residual of the generator under the weighted product:
/// `|(X, 𝓛[Y])_W − (𝓛[X], Y)_W|`.
pub fn self_adjointness_residual<T: Real>(
    lop: &SuperOperator<T>,
    x: &CMat<T>,
    y: &CMat<T>,
    tau: &DensityMatrix<T>,
) -> Result<T> {
    let ly = lop.apply_op(y)?;
    let lx = lop.apply_op(x)?;
    let a = weighted_inner(x, &ly, tau)?;
    let b = weighted_inner(&lx, y, tau)?;
    Ok((a - b).norm())
}
