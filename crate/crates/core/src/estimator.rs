//! Expectation values: exact, shot-sampled, and the two-level correction
//! `raw / (2·p0 − 1)` together with the interference diagnostics behind it.

use crate::error::{domain, Error, Result};
use crate::gate::GateMatrix;
use crate::pauli::{Pauli, PauliString, PauliSum};
use crate::rng::derive_seed;
use crate::scalar::{Real, C};
use crate::spectrum::Spectrum;
use crate::state::{sample_multinomial, StateVector};

/// Smallest usable `|2·p0 − 1|` for [`corrected_expectation`].
pub const CORRECTION_DENOMINATOR_MIN: f64 = 1e-6;

/// Amplitudes `c_j = ⟨E_j|ψ⟩` in the eigenbasis of a [`Spectrum`].
#[derive(Clone, Debug)]
pub struct EigenOverlaps<T: Real = f64> {
    pub coefficients: Vec<C<T>>,
}

impl<T: Real> EigenOverlaps<T> {
    pub fn weights(&self) -> Vec<T> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    /// `|c_0|²`.
    pub fn ground_weight(&self) -> T {
        self.coefficients[0].norm_sqr()
    }

    /// `1 − |c_0|²`, summed from the excited weights to avoid cancellation.
    pub fn excited_weight(&self) -> T {
        self.coefficients[1..].iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Shot or exact estimate of an observable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimateResult<T: Real = f64> {
    pub value: T,
    /// Zero for exact evaluation.
    pub std_error: T,
    /// Zero for exact evaluation.
    pub shots: u64,
    pub seed: u64,
}

impl<T: Real> EstimateResult<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            std_error: T::zero(),
            shots: 0,
            seed: 0,
        }
    }
}

pub fn eigen_overlaps<T: Real>(state: &StateVector<T>, spectrum: &Spectrum<T>) -> Result<EigenOverlaps<T>> {
    if state.dim() != spectrum.dim() {
        return domain(format!(
            "state dimension {} does not match spectrum dimension {}",
            state.dim(),
            spectrum.dim()
        ));
    }
    let v = spectrum.eigenvectors();
    let coefficients = (0..spectrum.dim())
        .map(|j| {
            (0..state.dim())
                .map(|i| v[(i, j)].conj() * state.amplitudes()[i])
                .sum()
        })
        .collect();
    let overlaps = EigenOverlaps { coefficients };
    let total: T = overlaps.weights().into_iter().sum();
    if (total - T::one()).abs() > T::tol(1e-10) {
        return Err(Error::NumericalConsistency(format!("eigen weights sum to {total}")));
    }
    Ok(overlaps)
}

/// `raw / (2·p0 − 1)`.
///
/// Only valid when `⟨E1|O|E1⟩ = −⟨E0|O|E0⟩` for the measured observable;
/// see [`correction_symmetry_error`].
pub fn corrected_expectation<T: Real>(raw: T, p0: T) -> Result<T> {
    let denom = T::of(2.0) * p0 - T::one();
    if !(denom.abs() >= T::of(CORRECTION_DENOMINATOR_MIN)) {
        return Err(Error::UnusableCorrection(denom.as_f64()));
    }
    Ok(raw / denom)
}

/// `|⟨E1|O|E1⟩ + ⟨E0|O|E0⟩|`, zero when the correction is valid for `O`.
pub fn correction_symmetry_error<T: Real>(spectrum: &Spectrum<T>, observable: &PauliSum<T>) -> Result<T> {
    if spectrum.dim() < 2 {
        return domain("correction needs at least two levels");
    }
    let m = observable.to_matrix()?;
    Ok((spectrum.matrix_element(&m, 0, 0) + spectrum.matrix_element(&m, 1, 1)).norm())
}

/// Shot estimate of a single Pauli string.
///
/// Rotates each support qubit into the string's eigenbasis (H for X,
/// H·S† for Y), samples the support qubits, and averages the ±1 parity.
pub fn shot_expectation<T: Real>(
    state: &StateVector<T>,
    observable: &PauliString,
    shots: u64,
    seed: u64,
) -> Result<EstimateResult<T>> {
    if shots == 0 {
        return domain("shots must be at least 1");
    }
    if observable.num_qubits() != state.num_qubits() {
        return domain(format!(
            "observable acts on {} qubits, state has {}",
            observable.num_qubits(),
            state.num_qubits()
        ));
    }
    let support = observable.support();
    if support.is_empty() {
        return Ok(EstimateResult {
            value: T::one(),
            std_error: T::zero(),
            shots,
            seed,
        });
    }
    let mut rotated = state.clone();
    let s_dag = GateMatrix::<T>::s().adjoint();
    for &q in &support {
        match observable.ops()[q] {
            Pauli::X => rotated.apply_gate(&GateMatrix::hadamard(), &[q])?,
            Pauli::Y => {
                rotated.apply_gate(&s_dag, &[q])?;
                rotated.apply_gate(&GateMatrix::hadamard(), &[q])?;
            }
            _ => {}
        }
    }
    let hist = rotated.measure_sample(&support, shots, seed)?;
    let plus: u64 = hist.iter().filter(|(b, _)| !b.parity()).map(|(_, n)| *n).sum();
    let n = T::of(shots as f64);
    let mean = (T::of(2.0) * T::of(plus as f64) - n) / n;
    let var = (T::one() - mean * mean).max(T::zero());
    Ok(EstimateResult {
        value: mean,
        std_error: (var / n).sqrt(),
        shots,
        seed,
    })
}

/// Term-by-term shot estimate of a Pauli sum; errors add in quadrature.
/// Term `k` (in stored order) samples with `derive_seed(seed, k)`.
pub fn shot_expectation_sum<T: Real>(
    state: &StateVector<T>,
    observable: &PauliSum<T>,
    shots: u64,
    seed: u64,
) -> Result<EstimateResult<T>> {
    let mut value = T::zero();
    let mut var = T::zero();
    for (k, (coeff, string)) in observable.terms().iter().enumerate() {
        let est = shot_expectation(state, string, shots, derive_seed(seed, k as u64))?;
        value += *coeff * est.value;
        var += (*coeff * est.std_error).powi(2);
    }
    Ok(EstimateResult {
        value,
        std_error: var.sqrt(),
        shots,
        seed,
    })
}

/// Number of `shots` that survive a post-selection of probability `p`,
/// drawn as `Binomial(shots, p)`.
pub fn sample_postselection_count<T: Real>(p: T, shots: u64, seed: u64) -> Result<u64> {
    let p = p.as_f64();
    if !(0.0..=1.0 + 1e-12).contains(&p) {
        return domain(format!("probability {p} outside [0, 1]"));
    }
    let counts = sample_multinomial(&[p.min(1.0), (1.0 - p).max(0.0)], shots, seed);
    Ok(counts[0])
}

/// Interference part of `⟨ψ|O|ψ⟩`: `Σ_{j<k} 2·Re(c̄_j c_k ⟨E_j|O|E_k⟩)`.
pub fn cross_term<T: Real>(state: &StateVector<T>, spectrum: &Spectrum<T>, observable: &PauliSum<T>) -> Result<T> {
    let (_, cross) = decompose_expectation(state, spectrum, observable)?;
    Ok(cross)
}

/// Splits `⟨ψ|O|ψ⟩` into the diagonal part `Σ_j |c_j|²⟨E_j|O|E_j⟩` and
/// the cross term.
pub fn decompose_expectation<T: Real>(
    state: &StateVector<T>,
    spectrum: &Spectrum<T>,
    observable: &PauliSum<T>,
) -> Result<(T, T)> {
    if observable.num_qubits() != spectrum.num_qubits() {
        return domain("observable and spectrum act on different registers");
    }
    let c = eigen_overlaps(state, spectrum)?.coefficients;
    let m = observable.to_matrix()?;
    let n = c.len();
    // Rows of O·V, reused for every matrix element.
    let v = spectrum.eigenvectors();
    let ov = m.matmul(v);
    let element = |j: usize, k: usize| -> C<T> { (0..n).map(|i| v[(i, j)].conj() * ov[(i, k)]).sum() };
    let mut diagonal = T::zero();
    let mut cross = T::zero();
    for j in 0..n {
        if c[j].norm_sqr() == T::zero() {
            continue;
        }
        diagonal += c[j].norm_sqr() * element(j, j).re;
        for k in j + 1..n {
            if c[k].norm_sqr() == T::zero() {
                continue;
            }
            cross += T::of(2.0) * (c[j].conj() * c[k] * element(j, k)).re;
        }
    }
    Ok((diagonal, cross))
}
