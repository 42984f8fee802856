use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{c, re, Real, C};

/// A unitary acting on `arity` qubits.
///
/// Row/column index bits follow the target list handed to
/// [`StateVector::apply_gate`](crate::StateVector::apply_gate): the first
/// target is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct GateMatrix<T: Real = f64> {
    arity: usize,
    matrix: Matrix<T>,
}

impl<T: Real> GateMatrix<T> {
    /// Wraps a matrix after checking shape and unitarity.
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Validation(format!(
                "gate matrix must be 2^k x 2^k with k >= 1, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let err = matrix.unitarity_error();
        let tol = T::tol(1e-12) * T::of(dim as f64).max(T::one());
        if !(err <= tol) {
            return Err(Error::Validation(format!(
                "gate is not unitary: max|U†U - I| = {err:e}"
            )));
        }
        Ok(Self {
            arity: dim.trailing_zeros() as usize,
            matrix,
        })
    }

    fn from_2x2(m: [[C<T>; 2]; 2]) -> Self {
        Self::new(Matrix::from_rows(&[m[0].to_vec(), m[1].to_vec()]).expect("2x2"))
            .expect("standard gate is unitary")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            arity: self.arity,
            matrix: self.matrix.adjoint(),
        }
    }

    /// Global phase times this gate. Inside a controlled operation the
    /// phase becomes physical.
    pub fn with_phase(&self, phase: C<T>) -> Result<Self> {
        Self::new(self.matrix.scale(phase))
    }

    pub fn identity(arity: usize) -> Self {
        Self {
            arity,
            matrix: Matrix::identity(1 << arity),
        }
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (re(T::zero()), re(T::one()));
        Self::from_2x2([[o, l], [l, o]])
    }

    pub fn pauli_y() -> Self {
        let o = re(T::zero());
        Self::from_2x2([[o, c(T::zero(), -T::one())], [c(T::zero(), T::one()), o]])
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (re(T::zero()), re(T::one()));
        Self::from_2x2([[l, o], [o, -l]])
    }

    pub fn hadamard() -> Self {
        let h = re(T::FRAC_1_SQRT_2());
        Self::from_2x2([[h, h], [h, -h]])
    }

    /// `S = |0⟩⟨0| + i|1⟩⟨1|`.
    pub fn s() -> Self {
        let (o, l) = (re(T::zero()), re(T::one()));
        Self::from_2x2([[l, o], [o, c(T::zero(), T::one())]])
    }

    /// `Rz(θ) = exp(-iθZ/2)`.
    pub fn rz(theta: T) -> Self {
        let half = theta / T::of(2.0);
        let o = re(T::zero());
        Self::from_2x2([[C::from_polar(T::one(), -half), o], [o, C::from_polar(T::one(), half)]])
    }

    /// `Rx(θ) = exp(-iθX/2)`.
    pub fn rx(theta: T) -> Self {
        let half = theta / T::of(2.0);
        let (co, si) = (re(half.cos()), c(T::zero(), -half.sin()));
        Self::from_2x2([[co, si], [si, co]])
    }

    /// `Ry(θ) = exp(-iθY/2)`.
    pub fn ry(theta: T) -> Self {
        let half = theta / T::of(2.0);
        let (co, si) = (half.cos(), half.sin());
        Self::from_2x2([[re(co), re(-si)], [re(si), re(co)]])
    }
}
