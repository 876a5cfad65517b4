//! Dense eigendecompositions and LU inversion for small complex matrices.
//!
//! Two solvers, both written for the desk scale this crate targets
//! (system dimension ≤ 16, superoperators ≤ 256×256):
//!
//! * [`eigh`]: cyclic Jacobi rotations for Hermitian matrices. Used for
//!   Gibbs states, operator logarithms, and entropies, where accuracy close
//!   to machine precision matters more than asymptotic speed.
//! * [`eig`]: Householder reduction to upper Hessenberg form followed by
//!   explicitly shifted QR iteration with Wilkinson shifts, then eigenvector
//!   recovery by back-substitution on the triangular factor. Handles the
//!   non-Hermitian generators.

use crate::cmat::CMat;
use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;

fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// columns are the matching eigenvectors, so `A = V diag(w) V†`.
pub fn eigh<T: Real>(a: &CMat<T>) -> Result<(Vec<T>, CMat<T>)> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    let scale = a.max_abs().max(T::one());
    let herm_tol = T::of(1e-12) * scale;
    if a.herm_residual() > herm_tol {
        return Err(Error::NotHermitian(a.herm_residual().to_f64().unwrap_or(f64::NAN)));
    }

    let mut m = a.hermitize();
    let mut v = CMat::identity(n);
    let fro0 = m.fro_norm().max(T::min_positive_value());
    let target = T::epsilon() * fro0;

    let max_sweeps = 100usize;
    for sweep in 0..=max_sweeps {
        let mut off = T::zero();
        for j in 0..n {
            for i in 0..j {
                off = off + m[(i, j)].norm_sqr();
            }
        }
        if off.sqrt() <= target {
            break;
        }
        if sweep == max_sweeps {
            return Err(Error::EigNoConvergence(max_sweeps));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= T::epsilon() * fro0 {
                    m[(p, q)] = czero();
                    m[(q, p)] = czero();
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let phase = apq / Complex::new(r, T::zero());
                // tan of the rotation angle: smaller root of t² − 2θt − 1 = 0.
                let theta = (aqq - app) / (r + r);
                let t = if theta >= T::zero() {
                    -(T::one() / (theta + (theta * theta + T::one()).sqrt()))
                } else {
                    T::one() / (-theta + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                // J is identity except J[p][p]=J[q][q]=c, J[q][p]=s·conj(phase),
                // J[p][q]=−s·phase; update M ← J† M J and V ← V J.
                let sp = Complex::new(s, T::zero()) * phase;
                let spc = sp.conj();

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp.scale(c) + mkq * spc;
                    m[(k, q)] = mkq.scale(c) - mkp * sp;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk.scale(c) + mqk * sp;
                    m[(q, k)] = mqk.scale(c) - mpk * spc;
                }
                m[(p, q)] = czero();
                m[(q, p)] = czero();
                m[(p, p)] = Complex::new(m[(p, p)].re, T::zero());
                m[(q, q)] = Complex::new(m[(q, q)].re, T::zero());

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp.scale(c) + vkq * spc;
                    v[(k, q)] = vkq.scale(c) - vkp * sp;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<T> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let sorted_vals: Vec<T> = order.iter().map(|&i| vals[i]).collect();
    let mut sorted_v = CMat::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        let col = v.column(old_j).to_vec();
        sorted_v.set_column(new_j, &col);
    }
    Ok((sorted_vals, sorted_v))
}

/// Givens rotation zeroing `g` against `f`: returns `(c, s)` with `c` real,
/// `|c|² + |s|² = 1` and `[c s; −s̄ c]·(f, g)ᵀ = (r, 0)ᵀ`.
fn givens<T: Real>(f: Complex<T>, g: Complex<T>) -> (T, Complex<T>) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == T::zero() {
        return (T::one(), czero());
    }
    if fn_ == T::zero() {
        return (T::zero(), g.conj() / Complex::new(gn, T::zero()));
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / Complex::new(fn_, T::zero())) * g.conj() / Complex::new(d, T::zero());
    (c, s)
}

/// Eigendecomposition of a general complex matrix.
///
/// Returns `(eigenvalues, V)` with right eigenvectors as unit-norm columns of
/// `V`, in no particular order. No attempt is made to detect defectiveness;
/// callers that need a diagonalizable generator must check the conditioning
/// of `V` themselves (see [`crate::spectral::decompose`]).
pub fn eig<T: Real>(a: &CMat<T>) -> Result<(Vec<Complex<T>>, CMat<T>)> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if n == 1 {
        return Ok((vec![a[(0, 0)]], CMat::identity(1)));
    }

    let (mut h, mut q) = hessenberg(a);
    qr_triangularize(&mut h, &mut q)?;
    let vals: Vec<Complex<T>> = (0..n).map(|i| h[(i, i)]).collect();
    let vecs = triangular_eigenvectors(&h, &q);
    Ok((vals, vecs))
}

/// Householder reduction `A = Q H Q†` with `H` upper Hessenberg.
fn hessenberg<T: Real>(a: &CMat<T>) -> (CMat<T>, CMat<T>) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = CMat::identity(n);

    for k in 0..n.saturating_sub(2) {
        // Reflector for column k, rows k+1..n.
        let mut v: Vec<Complex<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |x, y| x + y).sqrt();
        if norm <= T::min_positive_value() {
            continue;
        }
        let x0 = v[0];
        let phase =
            if x0.norm() > T::zero() { x0 / Complex::new(x0.norm(), T::zero()) } else { cone() };
        v[0] = x0 + phase * Complex::new(norm, T::zero());
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |x, y| x + y);
        if vnorm2 <= T::min_positive_value() {
            continue;
        }
        let beta = T::of(2.0) / vnorm2;

        // H ← P H, rows k+1.., P = I − β v v†.
        for j in 0..n {
            let mut dot = czero();
            for (idx, i) in (k + 1..n).enumerate() {
                dot = dot + v[idx].conj() * h[(i, j)];
            }
            let f = dot.scale(beta);
            for (idx, i) in (k + 1..n).enumerate() {
                let upd = v[idx] * f;
                h[(i, j)] = h[(i, j)] - upd;
            }
        }
        // H ← H P, columns k+1...
        for i in 0..n {
            let mut dot = czero();
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + h[(i, j)] * v[idx];
            }
            let f = dot.scale(beta);
            for (idx, j) in (k + 1..n).enumerate() {
                let upd = f * v[idx].conj();
                h[(i, j)] = h[(i, j)] - upd;
            }
        }
        // Q ← Q P.
        for i in 0..n {
            let mut dot = czero();
            for (idx, j) in (k + 1..n).enumerate() {
                dot = dot + q[(i, j)] * v[idx];
            }
            let f = dot.scale(beta);
            for (idx, j) in (k + 1..n).enumerate() {
                let upd = f * v[idx].conj();
                q[(i, j)] = q[(i, j)] - upd;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = czero();
        }
    }
    (h, q)
}

/// Shifted QR iteration driving an upper Hessenberg matrix to triangular
/// form; `q` accumulates so `A = Q T Q†` throughout.
fn qr_triangularize<T: Real>(h: &mut CMat<T>, q: &mut CMat<T>) -> Result<()> {
    let n = h.nrows();
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut iters_this_block = 0usize;
    let mut total = 0usize;
    let budget = 60 * n;

    loop {
        // Deflate converged trailing eigenvalues.
        while hi > 0 {
            let small = eps * (h[(hi - 1, hi - 1)].norm() + h[(hi, hi)].norm()).max(T::min_positive_value());
            if h[(hi, hi - 1)].norm() <= small {
                h[(hi, hi - 1)] = czero();
                hi -= 1;
                iters_this_block = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            return Ok(());
        }

        // Active window [lo, hi].
        let mut lo = 0;
        for i in (0..hi).rev() {
            let small = eps * (h[(i, i)].norm() + h[(i + 1, i + 1)].norm()).max(T::min_positive_value());
            if h[(i + 1, i)].norm() <= small {
                h[(i + 1, i)] = czero();
                lo = i + 1;
                break;
            }
        }

        total += 1;
        iters_this_block += 1;
        if total > budget {
            return Err(Error::EigNoConvergence(budget));
        }

        // Wilkinson shift from the trailing 2×2, with an occasional
        // exceptional kick to break symmetry-induced stalls.
        let d = h[(hi, hi)];
        let mu = if iters_this_block % 12 == 0 {
            let kick = h[(hi, hi - 1)].norm()
                + if hi >= 2 { h[(hi - 1, hi - 2)].norm() } else { T::zero() };
            d + Complex::new(T::of(0.75) * kick, T::zero())
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c2 = h[(hi, hi - 1)];
            let half = Complex::new(T::of(0.5), T::zero());
            let tr2 = (a + d) * half;
            let det = a * d - b * c2;
            let disc = (tr2 * tr2 - det).sqrt();
            let m1 = tr2 + disc;
            let m2 = tr2 - disc;
            if (m1 - d).norm() <= (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };

        // One explicit shifted QR step: H ← G (H − μI) G† + μI = G H G†.
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots: Vec<(T, Complex<T>)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            rots.push((c, s));
            for j in i..n {
                let hi_j = h[(i, j)];
                let hip_j = h[(i + 1, j)];
                h[(i, j)] = hi_j.scale(c) + s * hip_j;
                h[(i + 1, j)] = hip_j.scale(c) - s.conj() * hi_j;
            }
            h[(i + 1, i)] = czero();
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            let top = (i + 2).min(hi + 1);
            for r in 0..top {
                let hr_i = h[(r, i)];
                let hr_ip = h[(r, i + 1)];
                h[(r, i)] = hr_i.scale(c) + hr_ip * s.conj();
                h[(r, i + 1)] = hr_ip.scale(c) - hr_i * s;
            }
            for r in 0..q.nrows() {
                let qr_i = q[(r, i)];
                let qr_ip = q[(r, i + 1)];
                q[(r, i)] = qr_i.scale(c) + qr_ip * s.conj();
                q[(r, i + 1)] = qr_ip.scale(c) - qr_i * s;
            }
        }
        for i in lo..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
}

/// Eigenvectors of `A = Q T Q†` from back-substitution on triangular `T`.
fn triangular_eigenvectors<T: Real>(t: &CMat<T>, q: &CMat<T>) -> CMat<T> {
    let n = t.nrows();
    let tnorm = t.max_abs().max(T::min_positive_value());
    let smallden = T::epsilon() * tnorm;
    let mut vecs = CMat::zeros(n, n);

    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y: Vec<Complex<T>> = vec![czero(); n];
        y[k] = cone();
        for j in (0..k).rev() {
            let mut num: Complex<T> = czero();
            for i in (j + 1)..=k {
                num = num + t[(j, i)] * y[i];
            }
            let mut den = t[(j, j)] - lambda;
            if den.norm() < smallden {
                den = Complex::new(smallden, T::zero());
            }
            y[j] = -num / den;
        }
        // x = Q y, normalized.
        let mut x = vec![czero(); n];
        for (j, yj) in y.iter().enumerate().take(k + 1) {
            if yj.norm_sqr() == T::zero() {
                continue;
            }
            let col = q.column(j);
            for i in 0..n {
                x[i] = x[i] + col[i] * *yj;
            }
        }
        let norm = x.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt();
        if norm > T::zero() {
            for z in &mut x {
                *z = *z / Complex::new(norm, T::zero());
            }
        }
        vecs.set_column(k, &x);
    }
    vecs
}

/// LU factorization with partial pivoting.
pub struct Lu<T> {
    lu: CMat<T>,
    piv: Vec<usize>,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &CMat<T>) -> Result<Self> {
        let n = a.nrows();
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
        }
        let mut lu = a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in (k + 1)..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= T::min_positive_value() {
                return Err(Error::SingularState(best.to_f64().unwrap_or(0.0)));
            }
            if p != k {
                piv.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.norm_sqr() == T::zero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let upd = f * lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - upd;
                }
            }
        }
        Ok(Self { lu, piv })
    }

    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.lu.nrows();
        debug_assert_eq!(b.len(), n);
        let mut x: Vec<Complex<T>> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in (i + 1)..n {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMat<T> {
        let n = self.lu.nrows();
        let mut inv = CMat::zeros(n, n);
        let mut e = vec![czero(); n];
        for j in 0..n {
            e[j] = cone();
            let col = self.solve_vec(&e);
            inv.set_column(j, &col);
            e[j] = czero();
        }
        inv
    }
}

/// One-norm condition number from a matrix and its precomputed inverse.
pub fn cond_one<T: Real>(a: &CMat<T>, a_inv: &CMat<T>) -> T {
    a.one_norm() * a_inv.one_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, cr};

    /// Deterministic xorshift for test matrices.
    struct Rng(u64);
    impl Rng {
        fn next_f(&mut self) -> f64 {
            self.0 ^= self.0 << 13;
            self.0 ^= self.0 >> 7;
            self.0 ^= self.0 << 17;
            (self.0 >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
        fn next_c(&mut self) -> Complex<f64> {
            c(self.next_f(), self.next_f())
        }
    }

    fn random_matrix(n: usize, seed: u64) -> CMat<f64> {
        let mut rng = Rng(seed | 1);
        CMat::from_fn(n, n, |_, _| rng.next_c())
    }

    #[test]
    fn eigh_diagonal_and_known() {
        let a: CMat<f64> = CMat::diag(&[cr(3.0), cr(-1.0), cr(2.0)]);
        let (w, _) = eigh(&a).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 2.0).abs() < 1e-14);
        assert!((w[2] - 3.0).abs() < 1e-14);

        // Pauli-x like: eigenvalues ±1.
        let x: CMat<f64> =
            CMat::from_rows(&[vec![cr(0.0), cr(1.0)], vec![cr(1.0), cr(0.0)]]).unwrap();
        let (w, v) = eigh(&x).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14 && (w[1] - 1.0).abs() < 1e-14);
        let recon = &v.mul_mat(&CMat::diag(&[cr(w[0]), cr(w[1])])) * &v.adjoint();
        assert!((&recon - &x).max_abs() < 1e-14);
    }

    #[test]
    fn eigh_random_roundtrip() {
        for n in [2usize, 5, 9, 16] {
            let g = random_matrix(n, 0xC0FFEE + n as u64);
            let a = g.hermitize();
            let (w, v) = eigh(&a).unwrap();
            // Unitarity.
            let vhv = v.adjoint().mul_mat(&v);
            assert!((&vhv - &CMat::identity(n)).max_abs() < 1e-12, "n={n}");
            // Reconstruction.
            let d = CMat::diag(&w.iter().map(|&x| cr(x)).collect::<Vec<_>>());
            let recon = v.mul_mat(&d).mul_mat(&v.adjoint());
            assert!((&recon - &a).max_abs() < 1e-12 * a.max_abs().max(1.0), "n={n}");
            // Ascending order.
            for i in 1..n {
                assert!(w[i] >= w[i - 1]);
            }
        }
    }

    #[test]
    fn eig_triangular_known() {
        let a = CMat::from_rows(&[
            vec![c(1.0, 2.0), cr(5.0), cr(1.0)],
            vec![cr(0.0), cr(-3.0), cr(2.0)],
            vec![cr(0.0), cr(0.0), c(0.0, -1.0)],
        ])
        .unwrap();
        let (vals, vecs) = eig(&a).unwrap();
        let mut expected = [c(1.0, 2.0), cr(-3.0), c(0.0, -1.0)];
        expected.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        let mut got = vals.clone();
        got.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).norm() < 1e-12, "got {g}, expected {e}");
        }
        for (k, lam) in vals.iter().enumerate() {
            let v = vecs.column(k).to_vec();
            let av = a.matvec(&v);
            for i in 0..3 {
                assert!((av[i] - *lam * v[i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn eig_random_residuals() {
        for n in [2usize, 4, 8, 16, 25] {
            let a = random_matrix(n, 0xABCD + n as u64);
            let (vals, vecs) = eig(&a).unwrap();
            let scale = a.max_abs();
            for k in 0..n {
                let v = vecs.column(k).to_vec();
                let av = a.matvec(&v);
                let res = av
                    .iter()
                    .zip(&v)
                    .map(|(x, y)| (x - vals[k] * y).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-10 * scale.max(1.0), "n={n} k={k} res={res:e}");
            }
            // Eigenvalue sum equals trace.
            let tr = a.trace();
            let sum = vals.iter().fold(c(0.0, 0.0), |acc, x| acc + x);
            assert!((tr - sum).norm() < 1e-10 * scale.max(1.0) * n as f64);
        }
    }

    #[test]
    fn eig_real_rate_matrix() {
        // Two-state generator: eigenvalues 0 and −(a+b).
        let (a, b) = (0.1, 0.2);
        let m = CMat::from_rows(&[vec![cr(-a), cr(b)], vec![cr(a), cr(-b)]]).unwrap();
        let (vals, _) = eig(&m).unwrap();
        let mut re: Vec<f64> = vals.iter().map(|z| z.re).collect();
        re.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert!((re[0] + 0.3).abs() < 1e-14);
        assert!(re[1].abs() < 1e-14);
        assert!(vals.iter().all(|z| z.im.abs() < 1e-14));
    }

    #[test]
    fn lu_inverse_roundtrip() {
        let a = random_matrix(12, 99);
        let lu = Lu::new(&a).unwrap();
        let inv = lu.inverse();
        let prod = a.mul_mat(&inv);
        assert!((&prod - &CMat::identity(12)).max_abs() < 1e-11);
        assert!(cond_one(&a, &inv) > 1.0);
    }

    #[test]
    fn lu_singular_detected() {
        let a = CMat::from_rows(&[vec![cr(1.0), cr(2.0)], vec![cr(2.0), cr(4.0)]]).unwrap();
        assert!(Lu::new(&a).is_err());
    }
}
