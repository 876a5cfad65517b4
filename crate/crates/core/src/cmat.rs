//! Dense complex matrices, column-major.
//!
//! Column-major storage makes column-stacking vectorization (`vec`) a plain
//! copy of the backing buffer, so the Kronecker identity
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)` holds with no index shuffling.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_complex::Complex;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct CMat<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex::new(T::zero(), T::zero()); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from row slices (row-major input, as written in source code).
    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, got: row.len() });
            }
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    pub fn diag(entries: &[Complex<T>]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = entries[i];
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> &[Complex<T>] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [Complex<T>] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn set_column(&mut self, j: usize, v: &[Complex<T>]) {
        self.column_mut(j).copy_from_slice(v);
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z = z.conj();
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z = *z * s;
        }
        m
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn trace(&self) -> Complex<T> {
        debug_assert!(self.is_square());
        let mut t = Complex::new(T::zero(), T::zero());
        for i in 0..self.rows {
            t = t + self[(i, i)];
        }
        t
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    pub fn fro_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> T {
        (0..self.cols)
            .map(|j| self.column(j).iter().map(|z| z.norm()).fold(T::zero(), |a, b| a + b))
            .fold(T::zero(), T::max)
    }

    /// Max entry modulus of `A − A†`.
    pub fn herm_residual(&self) -> T {
        debug_assert!(self.is_square());
        let mut r = T::zero();
        for j in 0..self.cols {
            for i in 0..=j {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                r = r.max(d);
            }
        }
        r
    }

    /// `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        let half = Complex::new(T::of(0.5), T::zero());
        (self + &self.adjoint()).scale(half)
    }

    pub fn is_diagonal(&self, tol: T) -> bool {
        for j in 0..self.cols {
            for i in 0..self.rows {
                if i != j && self[(i, j)].norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Column-stacking vectorization.
    pub fn vectorize(&self) -> Vec<Complex<T>> {
        self.data.clone()
    }

    /// Inverse of [`vectorize`](Self::vectorize) for a `d × d` matrix.
    pub fn from_vectorized(d: usize, v: &[Complex<T>]) -> Self {
        debug_assert_eq!(v.len(), d * d);
        Self { rows: d, cols: d, data: v.to_vec() }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        Self::from_fn(self.rows * p, self.cols * q, |i, j| {
            self[(i / p, j / q)] * other[(i % p, j % q)]
        })
    }

    /// Matrix–vector product.
    pub fn matvec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.rows];
        for j in 0..self.cols {
            let vj = v[j];
            if vj.norm_sqr() == T::zero() {
                continue;
            }
            let col = self.column(j);
            for i in 0..self.rows {
                out[i] = out[i] + col[i] * vj;
            }
        }
        out
    }

    pub fn mul_mat(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            for k in 0..self.cols {
                let b = rhs[(k, j)];
                if b.norm_sqr() == T::zero() {
                    continue;
                }
                let col = self.column(k);
                let ocol = out.column_mut(j);
                for i in 0..self.rows {
                    ocol[i] = ocol[i] + col[i] * b;
                }
            }
        }
        out
    }
}

impl<T: Real> Index<(usize, usize)> for CMat<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[j * self.rows + i]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[j * self.rows + i]
    }
}

impl<T: Real> Add for &CMat<T> {
    type Output = CMat<T>;
    fn add(self, rhs: &CMat<T>) -> CMat<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = *a + *b;
        }
        out
    }
}

impl<T: Real> Sub for &CMat<T> {
    type Output = CMat<T>;
    fn sub(self, rhs: &CMat<T>) -> CMat<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = *a - *b;
        }
        out
    }
}

impl<T: Real> Neg for &CMat<T> {
    type Output = CMat<T>;
    fn neg(self) -> CMat<T> {
        let mut out = self.clone();
        for z in &mut out.data {
            *z = -*z;
        }
        out
    }
}

impl<T: Real> Mul for &CMat<T> {
    type Output = CMat<T>;
    fn mul(self, rhs: &CMat<T>) -> CMat<T> {
        self.mul_mat(rhs)
    }
}
