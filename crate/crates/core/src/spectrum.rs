//! Exact diagonalization oracle and spectral matrix exponentials.

use crate::error::{Error, Result};
use crate::gate::GateMatrix;
use crate::linalg::{hermitian_eigen, Matrix};
use crate::pauli::PauliSum;
use crate::scalar::{Real, C};
use crate::state::StateVector;

/// Ground-state gaps below this are treated as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-10;

/// Full eigendecomposition of a Hamiltonian, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real = f64> {
    num_qubits: usize,
    eigenvalues: Vec<T>,
    eigenvectors: Matrix<T>,
}

impl<T: Real> Spectrum<T> {
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns.
    pub fn eigenvectors(&self) -> &Matrix<T> {
        &self.eigenvectors
    }

    pub fn ground_energy(&self) -> T {
        self.eigenvalues[0]
    }

    pub fn gap(&self) -> T {
        if self.eigenvalues.len() < 2 {
            return T::infinity();
        }
        self.eigenvalues[1] - self.eigenvalues[0]
    }

    pub fn is_degenerate(&self) -> bool {
        self.gap() < T::of(DEGENERACY_TOLERANCE)
    }

    /// `|E_j⟩` as a statevector.
    pub fn eigenstate(&self, j: usize) -> StateVector<T> {
        StateVector::normalized(self.eigenvectors.column(j)).expect("eigenvectors are normalized")
    }

    pub fn ground_state(&self) -> StateVector<T> {
        self.eigenstate(0)
    }

    /// `V diag(f(λ)) V†`.
    pub fn function(&self, f: impl Fn(T) -> C<T>) -> Matrix<T> {
        let diag: Vec<C<T>> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.eigenvectors
            .matmul(&Matrix::diagonal(&diag))
            .matmul(&self.eigenvectors.adjoint())
    }

    /// `exp(-i·H·duration)` assembled from the eigendecomposition.
    pub fn evolution(&self, duration: T) -> Result<GateMatrix<T>> {
        GateMatrix::new(self.function(|l| C::from_polar(T::one(), -l * duration)))
    }

    /// `⟨E_j|O|E_k⟩` for a dense observable matrix.
    pub fn matrix_element(&self, observable: &Matrix<T>, j: usize, k: usize) -> C<T> {
        let vj = self.eigenvectors.column(j);
        let ok = observable.matvec(&self.eigenvectors.column(k));
        vj.iter().zip(&ok).map(|(a, b)| a.conj() * b).sum()
    }
}

/// Diagonalizes `h` densely (subject to [`DEFAULT_MATRIX_QUBIT_CAP`](crate::pauli::DEFAULT_MATRIX_QUBIT_CAP)).
pub fn exact_diagonalize<T: Real>(h: &PauliSum<T>) -> Result<Spectrum<T>> {
    let matrix = h.to_matrix()?;
    diagonalize_matrix(h.num_qubits(), &matrix)
}

pub(crate) fn diagonalize_matrix<T: Real>(num_qubits: usize, matrix: &Matrix<T>) -> Result<Spectrum<T>> {
    let eig = hermitian_eigen(matrix)?;
    let spectrum = Spectrum {
        num_qubits,
        eigenvalues: eig.values,
        eigenvectors: eig.vectors,
    };
    let overlap_err = spectrum.eigenvectors.unitarity_error();
    if overlap_err > T::tol(1e-10) {
        return Err(Error::NonConvergence(format!(
            "eigenvectors not orthonormal: {overlap_err:e}"
        )));
    }
    Ok(spectrum)
}

/// `exp(-i·h·duration)` on the full register.
pub fn evolution_unitary<T: Real>(h: &PauliSum<T>, duration: T) -> Result<GateMatrix<T>> {
    exact_diagonalize(h)?.evolution(duration)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{hadamard_hamiltonian, initial_hamiltonian, interpolate};
    use crate::scalar::{c, re};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    const J: f64 = PI / 4.0;

    #[test]
    fn initial_hamiltonian_spectrum() {
        let sp = exact_diagonalize(&initial_hamiltonian(J, 1).unwrap()).unwrap();
        assert!((sp.eigenvalues()[0] + J).abs() < 1e-15);
        assert!((sp.eigenvalues()[1] - J).abs() < 1e-15);
        let ground = sp.ground_state();
        assert!((ground.amplitudes()[0] - re(1.0)).norm() < 1e-15);
        assert!((sp.gap() - 2.0 * J).abs() < 1e-15);
    }

    #[test]
    fn hadamard_model_closed_form() {
        let sp = exact_diagonalize(&hadamard_hamiltonian(J).unwrap()).unwrap();
        assert!((sp.eigenvalues()[0] + J).abs() < 1e-14);
        assert!((sp.eigenvalues()[1] - J).abs() < 1e-14);
        assert!((sp.gap() - PI / 2.0).abs() < 1e-14);
        // Ground state (cos π/8, sin π/8) with the positive-pivot phase convention.
        let g = sp.ground_state();
        assert!((g.amplitudes()[0] - re((PI / 8.0).cos())).norm() < 1e-14);
        assert!((g.amplitudes()[1] - re((PI / 8.0).sin())).norm() < 1e-14);
        assert!(!sp.is_degenerate());
    }

    #[test]
    fn midpoint_gap() {
        let h0 = initial_hamiltonian(J, 1).unwrap();
        let h1 = hadamard_hamiltonian(J).unwrap();
        let sp = exact_diagonalize(&interpolate(&h0, &h1, 0.5).unwrap()).unwrap();
        let a = 0.5 + 0.5 * FRAC_1_SQRT_2;
        let b = 0.5 * FRAC_1_SQRT_2;
        let closed = 2.0 * J * (a * a + b * b).sqrt();
        assert!((sp.gap() - closed).abs() < 1e-14);
        assert!((sp.gap() - 1.4512).abs() < 1e-4);
    }

    #[test]
    fn degenerate_flag() {
        let zz = crate::pauli::PauliSum::new(2, [(1.0, "ZZ".parse().unwrap())]).unwrap();
        assert!(exact_diagonalize(&zz).unwrap().is_degenerate());
    }

    #[test]
    fn evolution_examples() {
        let h = hadamard_hamiltonian(J).unwrap();
        let u0 = evolution_unitary(&h, 0.0).unwrap();
        assert!(u0.matrix().max_abs_diff(&Matrix::identity(2)) < 1e-15);

        let t = 0.83;
        let uz = evolution_unitary(&initial_hamiltonian(J, 1).unwrap(), t).unwrap();
        let expect = Matrix::diagonal(&[C::from_polar(1.0, J * t), C::from_polar(1.0, -J * t)]);
        assert!(uz.matrix().max_abs_diff(&expect) < 1e-15);
        assert!(uz.matrix().unitarity_error() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let h = initial_hamiltonian(1.0, 11).unwrap();
        assert!(matches!(exact_diagonalize(&h), Err(Error::Resource(_))));
        assert!(matches!(evolution_unitary(&h, 1.0), Err(Error::Resource(_))));
    }

    #[test]
    fn z_matrix_elements_in_hadamard_eigenbasis() {
        let sp = exact_diagonalize(&hadamard_hamiltonian(J).unwrap()).unwrap();
        let z = crate::pauli::Pauli::Z.matrix::<f64>();
        assert!((sp.matrix_element(&z, 0, 0) - re(FRAC_1_SQRT_2)).norm() < 1e-14);
        assert!((sp.matrix_element(&z, 1, 1) - re(-FRAC_1_SQRT_2)).norm() < 1e-14);
        assert!((sp.matrix_element(&z, 0, 1) - c(-FRAC_1_SQRT_2, 0.0)).norm() < 1e-14);
    }
}
