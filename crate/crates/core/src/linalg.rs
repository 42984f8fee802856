//! Small dense complex matrices and a Hermitian eigensolver.
//!
//! Sizes here never exceed a few hundred rows (the dense paths are capped
//! at ten qubits), so a straightforward row-major layout and a cyclic
//! Jacobi eigensolver are accurate to machine precision and fast enough.

use std::ops::{Index, IndexMut};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{c, re, Real, C};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T: Real = f64> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<C<T>>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Validation("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn diagonal(values: &[C<T>]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(re(-T::one())))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Largest entry-wise modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|x| x.norm()).fold(T::zero(), T::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// `max |A - A†|`.
    pub fn hermiticity_error(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U - I|`.
    pub fn unitarity_error(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        self.adjoint().matmul(self).max_abs_diff(&Self::identity(self.rows))
    }
}

impl<T: Real> Index<(usize, usize)> for Matrix<T> {
    type Output = C<T>;

    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Matrix<T>,
}

const MAX_SWEEPS: usize = 100;

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a
/// diagonal unitary, then applies the real symmetric Jacobi rotation.
/// Eigenvector phases are fixed so that the first component of largest
/// modulus is real and positive.
pub fn hermitian_eigen<T: Real>(a: &Matrix<T>) -> Result<HermitianEigen<T>> {
    if !a.is_square() {
        return Err(Error::Domain(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let scale = a.max_abs().max(T::min_positive_value());
    if a.hermiticity_error() > T::tol(1e-12) * scale {
        return Err(Error::Validation("matrix is not Hermitian".into()));
    }
    let mut m = a.clone();
    let mut v = Matrix::identity(n);
    let threshold = T::epsilon() * scale;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].norm_sqr())
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q, threshold);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence(format!(
            "Jacobi sweeps did not converge within {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).expect("finite eigenvalues"));
    let values: Vec<T> = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let mut vec = v.column(src);
        fix_phase(&mut vec);
        for (row, x) in vec.into_iter().enumerate() {
            vectors[(row, col)] = x;
        }
    }

    // Residual check against the source matrix: never hand back bad data.
    let residual_tol = T::tol(1e-10) * scale.max(T::one());
    for (j, &lambda) in values.iter().enumerate() {
        let col = vectors.column(j);
        let hv = a.matvec(&col);
        let worst = hv
            .iter()
            .zip(&col)
            .map(|(x, y)| (x - y * lambda).norm())
            .fold(T::zero(), T::max);
        if !(worst <= residual_tol) {
            return Err(Error::NonConvergence(format!(
                "eigenpair {j} residual {worst:e} exceeds {residual_tol:e}"
            )));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn rotate<T: Real>(m: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, threshold: T) {
    let n = m.rows;
    let apq = m[(p, q)];
    let r = apq.norm();
    if r <= threshold * T::of(1e-3) {
        return;
    }
    // A <- P† A P with P = diag(1, .., e^{-i phi} at q, ..) makes a_pq real.
    let phase = apq / r;
    let ph_conj = phase.conj();
    for k in 0..n {
        m[(k, q)] *= ph_conj;
    }
    for k in 0..n {
        m[(q, k)] *= phase;
    }
    for k in 0..n {
        v[(k, q)] *= ph_conj;
    }

    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (T::of(2.0) * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
    let cs = T::one() / (t * t + T::one()).sqrt();
    let sn = t * cs;

    // Columns: A <- A R, V <- V R.
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * cs - akq * sn;
        m[(k, q)] = akp * sn + akq * cs;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs - vkq * sn;
        v[(k, q)] = vkp * sn + vkq * cs;
    }
    // Rows: A <- Rᵀ A.
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = apk * cs - aqk * sn;
        m[(q, k)] = apk * sn + aqk * cs;
    }
    m[(p, q)] = C::zero();
    m[(q, p)] = C::zero();
    m[(p, p)] = c(m[(p, p)].re, T::zero());
    m[(q, q)] = c(m[(q, q)].re, T::zero());
}

fn fix_phase<T: Real>(vec: &mut [C<T>]) {
    let max = vec.iter().map(|x| x.norm()).fold(T::zero(), T::max);
    if max == T::zero() {
        return;
    }
    let cutoff = max * (T::one() - T::tol(1e-9));
    if let Some(pivot) = vec.iter().copied().find(|x| x.norm() >= cutoff) {
        let rot = pivot.conj() / pivot.norm();
        for x in vec.iter_mut() {
            *x *= rot;
        }
    }
}
