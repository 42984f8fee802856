//! Dense statevector over `n` qubits.
//!
//! Qubit 0 is the leftmost ket symbol and the most significant bit of the
//! amplitude index: in `|q0 q1 … q(n-1)⟩` qubit `q` sits at bit `n-1-q`.
//! So `|0⟩|ψ⟩` with one ancilla places the ancilla at qubit 0.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::gate::GateMatrix;
use crate::pauli::PauliSum;
use crate::rng::rng_from_seed;
use crate::scalar::{Real, C};

/// Statevectors at or above this length run gate kernels on the rayon pool.
const PARALLEL_MIN_DIM: usize = 1 << 14;

/// Probability below which a post-selection outcome counts as impossible.
pub const IMPOSSIBLE_OUTCOME_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real = f64> {
    num_qubits: usize,
    amps: Vec<C<T>>,
}

/// Measurement outcome; `bits[k]` is the result for the `k`-th measured qubit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    /// `value` written with `len` bits, most significant first.
    pub fn from_index(value: usize, len: usize) -> Self {
        Self((0..len).map(|k| (value >> (len - 1 - k)) & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn parity(&self) -> bool {
        self.0.iter().filter(|&&b| b).count() % 2 == 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Domain(format!("invalid bit {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

/// Shot counts per outcome; only outcomes that occurred are present.
pub type Histogram = BTreeMap<BitString, u64>;

impl<T: Real> StateVector<T> {
    /// Computational basis state `|index⟩`.
    pub fn basis_state(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits >= usize::BITS as usize {
            return domain(format!("unsupported register size {num_qubits}"));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return domain(format!("basis index {index} out of range for {num_qubits} qubits"));
        }
        let mut amps = vec![C::zero(); dim];
        amps[index] = C::new(T::one(), T::zero());
        Ok(Self { num_qubits, amps })
    }

    /// `|0…0⟩`.
    pub fn zero_state(num_qubits: usize) -> Result<Self> {
        Self::basis_state(num_qubits, 0)
    }

    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<C<T>>) -> Result<Self> {
        let num_qubits = Self::check_len(amps.len())?;
        let state = Self { num_qubits, amps };
        let err = (state.norm_sqr() - T::one()).abs();
        if err > T::tol(1e-10) {
            return Err(Error::Validation(format!("state not normalized: |norm^2 - 1| = {err:e}")));
        }
        Ok(state)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<C<T>>) -> Result<Self> {
        let num_qubits = Self::check_len(amps.len())?;
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        let inv = T::one() / norm;
        for a in &mut amps {
            *a = *a * inv;
        }
        Ok(Self { num_qubits, amps })
    }

    fn check_len(len: usize) -> Result<usize> {
        if len < 2 || !len.is_power_of_two() {
            return domain(format!("amplitude count {len} is not 2^n with n >= 1"));
        }
        Ok(len.trailing_zeros() as usize)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|self⟩ ⊗ |other⟩`; `self` supplies the leading qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Self {
            num_qubits: self.num_qubits + other.num_qubits,
            amps,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C<T>> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "register size mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            ));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub(crate) fn bit_of(&self, qubit: usize) -> usize {
        self.num_qubits - 1 - qubit
    }

    fn check_qubits(&self, qubits: &[usize], what: &str) -> Result<()> {
        for (k, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return domain(format!("{what} qubit {q} out of range for {} qubits", self.num_qubits));
            }
            if qubits[..k].contains(&q) {
                return domain(format!("duplicate {what} qubit {q}"));
            }
        }
        Ok(())
    }

    /// Applies `gate` to `targets` (first target = most significant gate index bit).
    pub fn apply_gate(&mut self, gate: &GateMatrix<T>, targets: &[usize]) -> Result<()> {
        self.apply_controlled(&[], gate, targets)
    }

    /// Applies `gate` on `targets` in the subspace where every control is `|1⟩`.
    ///
    /// A global phase on `gate` is retained as a relative phase between the
    /// control branches.
    pub fn apply_controlled(
        &mut self,
        controls: &[usize],
        gate: &GateMatrix<T>,
        targets: &[usize],
    ) -> Result<()> {
        self.check_qubits(targets, "target")?;
        self.check_qubits(controls, "control")?;
        if targets.len() != gate.arity() {
            return domain(format!(
                "gate arity {} does not match {} targets",
                gate.arity(),
                targets.len()
            ));
        }
        if let Some(q) = controls.iter().find(|q| targets.contains(q)) {
            return domain(format!("qubit {q} is both control and target"));
        }
        let control_mask = controls.iter().fold(0usize, |m, &q| m | (1 << self.bit_of(q)));
        let target_bits: Vec<usize> = targets.iter().map(|&q| self.bit_of(q)).collect();
        self.amps = gate_kernel(&self.amps, gate, &target_bits, control_mask);
        Ok(())
    }

    /// Probability of observing `outcome` on `qubits`, and the renormalized
    /// state of the remaining qubits (measured qubits are removed).
    pub fn postselect(&self, qubits: &[usize], outcome: &BitString) -> Result<(T, StateVector<T>)> {
        self.check_qubits(qubits, "measured")?;
        if outcome.len() != qubits.len() {
            return domain(format!(
                "outcome has {} bits for {} measured qubits",
                outcome.len(),
                qubits.len()
            ));
        }
        if qubits.len() >= self.num_qubits {
            return domain("post-selection must leave at least one qubit");
        }
        let (mask, want) = self.outcome_mask(qubits, outcome);
        let kept_bits: Vec<usize> = (0..self.num_qubits)
            .filter(|q| !qubits.contains(q))
            .map(|q| self.bit_of(q))
            .collect();
        let new_n = kept_bits.len();
        let mut out = vec![C::zero(); 1 << new_n];
        let mut prob = T::zero();
        for (i, a) in self.amps.iter().enumerate() {
            if i & mask != want {
                continue;
            }
            prob += a.norm_sqr();
            let j = kept_bits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &b)| acc | (((i >> b) & 1) << (new_n - 1 - k)));
            out[j] = *a;
        }
        if prob.as_f64() < IMPOSSIBLE_OUTCOME_THRESHOLD {
            return Err(Error::ImpossibleOutcome {
                probability: prob.as_f64(),
                threshold: IMPOSSIBLE_OUTCOME_THRESHOLD,
            });
        }
        let collapsed = StateVector::normalized(out)?;
        Ok((prob, collapsed))
    }

    fn outcome_mask(&self, qubits: &[usize], outcome: &BitString) -> (usize, usize) {
        qubits.iter().zip(outcome.bits()).fold((0, 0), |(m, w), (&q, &b)| {
            let bit = 1 << self.bit_of(q);
            (m | bit, if b { w | bit } else { w })
        })
    }

    /// Born probabilities of all `2^k` outcomes on `qubits`, indexed by
    /// [`BitString::to_index`].
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<Vec<T>> {
        self.check_qubits(qubits, "measured")?;
        let k = qubits.len();
        let bits: Vec<usize> = qubits.iter().map(|&q| self.bit_of(q)).collect();
        let mut probs = vec![T::zero(); 1 << k];
        for (i, a) in self.amps.iter().enumerate() {
            let o = bits
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | ((i >> b) & 1));
            probs[o] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Draws `shots` i.i.d. computational-basis measurements of `qubits`.
    ///
    /// The multinomial is sampled as a chain of conditional binomials in
    /// outcome-index order, which is exact in distribution and costs
    /// O(2^k) regardless of the shot count.
    pub fn measure_sample(&self, qubits: &[usize], shots: u64, seed: u64) -> Result<Histogram> {
        if shots == 0 {
            return domain("shots must be at least 1");
        }
        if qubits.is_empty() {
            return domain("no qubits to measure");
        }
        let probs = self.marginal_probabilities(qubits)?;
        let counts = sample_multinomial(&probs, shots, seed);
        Ok(counts
            .into_iter()
            .enumerate()
            .filter(|&(_, n)| n > 0)
            .map(|(o, n)| (BitString::from_index(o, qubits.len()), n))
            .collect())
    }

    /// Exact `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, observable: &PauliSum<T>) -> Result<T> {
        if observable.num_qubits() != self.num_qubits {
            return domain(format!(
                "observable acts on {} qubits, state has {}",
                observable.num_qubits(),
                self.num_qubits
            ));
        }
        let value: C<T> = observable
            .terms()
            .iter()
            .map(|(coeff, string)| string.expectation(&self.amps) * *coeff)
            .sum();
        let scale = observable
            .terms()
            .iter()
            .map(|(c, _)| c.abs())
            .sum::<T>()
            .max(T::one());
        if value.im.abs() > T::tol(1e-8) * scale {
            return Err(Error::NumericalConsistency(format!(
                "expectation has imaginary residue {:e}",
                value.im
            )));
        }
        Ok(value.re)
    }

    pub(crate) fn amps_mut(&mut self) -> &mut Vec<C<T>> {
        &mut self.amps
    }
}

pub(crate) fn sample_multinomial<T: Real>(probs: &[T], shots: u64, seed: u64) -> Vec<u64> {
    let mut rng = rng_from_seed(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut mass_left: f64 = probs.iter().map(|p| p.as_f64()).sum();
    let last = probs.len() - 1;
    for (o, p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if o == last {
            counts[o] = remaining;
            break;
        }
        let p = p.as_f64().max(0.0);
        let cond = if mass_left > 0.0 { (p / mass_left).clamp(0.0, 1.0) } else { 0.0 };
        let n = if cond >= 1.0 {
            remaining
        } else if cond <= 0.0 {
            0
        } else {
            Binomial::new(remaining, cond).expect("valid binomial").sample(&mut rng)
        };
        counts[o] = n;
        remaining -= n;
        mass_left -= p;
    }
    counts
}

/// Out-of-place gate application. Every output amplitude depends only on
/// the input vector, so the parallel path is bit-identical to the serial one.
fn gate_kernel<T: Real>(
    amps: &[C<T>],
    gate: &GateMatrix<T>,
    target_bits: &[usize],
    control_mask: usize,
) -> Vec<C<T>> {
    let k = target_bits.len();
    let target_mask = target_bits.iter().fold(0usize, |m, &b| m | (1 << b));
    let spread: Vec<usize> = (0..1usize << k)
        .map(|r| {
            target_bits
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &b)| acc | (((r >> (k - 1 - j)) & 1) << b))
        })
        .collect();
    let m = gate.matrix();
    let compute = |i: usize| -> C<T> {
        if i & control_mask != control_mask {
            return amps[i];
        }
        let row = target_bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | ((i >> b) & 1));
        let base = i & !target_mask;
        m.row(row)
            .iter()
            .zip(&spread)
            .map(|(u, &s)| *u * amps[base | s])
            .sum()
    };
    if amps.len() >= PARALLEL_MIN_DIM {
        (0..amps.len()).into_par_iter().map(compute).collect()
    } else {
        (0..amps.len()).map(compute).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn plus() -> StateVector<f64> {
        StateVector::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap()
    }

    fn close(a: &[C<f64>], b: &[C<f64>], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
    }

    #[test]
    fn basis_states() {
        let s = StateVector::<f64>::basis_state(1, 0).unwrap();
        assert_eq!(s.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = StateVector::<f64>::basis_state(2, 3).unwrap();
        assert_eq!(s.amplitudes()[3], c(1.0, 0.0));
        assert_eq!(s.norm_sqr(), 1.0);
        let s = StateVector::<f64>::basis_state(3, 0).unwrap();
        assert_eq!(s.dim(), 8);
        assert_eq!(s.amplitudes()[0], c(1.0, 0.0));
        assert!(matches!(StateVector::<f64>::basis_state(2, 4), Err(Error::Domain(_))));
        assert!(StateVector::<f64>::basis_state(0, 0).is_err());
    }

    #[test]
    fn single_qubit_gate_actions() {
        let mut s = StateVector::<f64>::zero_state(1).unwrap();
        s.apply_gate(&GateMatrix::pauli_x(), &[0]).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]);

        let mut s = StateVector::<f64>::zero_state(1).unwrap();
        s.apply_gate(&GateMatrix::hadamard(), &[0]).unwrap();
        assert!(close(s.amplitudes(), plus().amplitudes(), 1e-15));

        // Rz(π)|+⟩ against a hand 2x2 multiply.
        let mut s = plus();
        s.apply_gate(&GateMatrix::rz(PI), &[0]).unwrap();
        let h = FRAC_1_SQRT_2;
        let expect = [C::from_polar(h, -PI / 2.0), C::from_polar(h, PI / 2.0)];
        assert!(close(s.amplitudes(), &expect, 1e-15));
    }

    #[test]
    fn gate_target_errors() {
        let mut s = StateVector::<f64>::zero_state(2).unwrap();
        let cx = GateMatrix::<f64>::identity(2);
        assert!(matches!(s.apply_gate(&cx, &[0, 0]), Err(Error::Domain(_))));
        assert!(matches!(s.apply_gate(&GateMatrix::pauli_x(), &[2]), Err(Error::Domain(_))));
        assert!(matches!(s.apply_gate(&cx, &[0]), Err(Error::Domain(_))));
        assert!(matches!(
            s.apply_controlled(&[0], &GateMatrix::pauli_x(), &[0]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn controlled_gates() {
        // CNOT |10⟩ -> |11⟩ with control qubit 0.
        let mut s = StateVector::<f64>::basis_state(2, 0b10).unwrap();
        s.apply_controlled(&[0], &GateMatrix::pauli_x(), &[1]).unwrap();
        assert_eq!(s.amplitudes()[0b11], c(1.0, 0.0));

        // Controlled global phase kicks back onto the control.
        let mut s = plus().tensor(&StateVector::zero_state(1).unwrap());
        let i_id = GateMatrix::<f64>::identity(1).with_phase(c(0.0, 1.0)).unwrap();
        s.apply_controlled(&[0], &i_id, &[1]).unwrap();
        let h = FRAC_1_SQRT_2;
        let expect = [c(h, 0.0), c(0.0, 0.0), c(0.0, h), c(0.0, 0.0)];
        assert!(close(s.amplitudes(), &expect, 1e-15));
    }

    #[test]
    fn postselection() {
        let h = FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)])
            .unwrap();
        let (p, rest) = bell.postselect(&[0], &BitString::zeros(1)).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(rest.amplitudes(), &[c(1.0, 0.0), c(0.0, 0.0)]);

        let zero = StateVector::<f64>::zero_state(2).unwrap();
        assert!(matches!(
            zero.postselect(&[1], &"1".parse().unwrap()),
            Err(Error::ImpossibleOutcome { .. })
        ));
    }

    #[test]
    fn postselect_removes_middle_qubit() {
        // |0⟩|1⟩|1⟩ measured on qubit 1 leaves |0⟩|1⟩.
        let s = StateVector::<f64>::basis_state(3, 0b011).unwrap();
        let (p, rest) = s.postselect(&[1], &"1".parse().unwrap()).unwrap();
        assert_eq!(p, 1.0);
        assert_eq!(rest.amplitudes()[0b01], c(1.0, 0.0));
    }

    #[test]
    fn sampling() {
        let zero = StateVector::<f64>::zero_state(1).unwrap();
        let hist = zero.measure_sample(&[0], 1000, 5).unwrap();
        assert_eq!(hist.len(), 1);
        assert_eq!(hist[&BitString::zeros(1)], 1000);

        let hist = plus().measure_sample(&[0], 1_000_000, 11).unwrap();
        assert_eq!(hist.values().sum::<u64>(), 1_000_000);
        for n in hist.values() {
            assert!((*n as f64 - 500_000.0).abs() <= 5.0 * 500.0, "count {n}");
        }
        assert_eq!(hist, plus().measure_sample(&[0], 1_000_000, 11).unwrap());
        assert!(plus().measure_sample(&[0], 0, 1).is_err());
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::<f64>::basis_state(1, 0).unwrap();
        let one = StateVector::<f64>::basis_state(1, 1).unwrap();
        assert_eq!(zero.fidelity(&zero).unwrap(), 1.0);
        assert_eq!(zero.fidelity(&one).unwrap(), 0.0);
        assert!((zero.fidelity(&plus()).unwrap() - 0.5).abs() < 1e-15);
        let two = StateVector::<f64>::zero_state(2).unwrap();
        assert!(matches!(zero.fidelity(&two), Err(Error::Domain(_))));
    }

    #[test]
    fn bitstring_roundtrip() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.to_index(), 6);
        assert_eq!(BitString::from_index(6, 4), b);
        assert_eq!(b.to_string(), "0110");
        assert!(!b.parity());
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn parallel_kernel_matches_serial() {
        // 15 qubits crosses PARALLEL_MIN_DIM.
        let n = 15;
        let amps: Vec<C<f64>> = (0..1usize << n)
            .map(|i| c(((i * 37) % 101) as f64, ((i * 11) % 17) as f64 - 8.0))
            .collect();
        let mut big = StateVector::normalized(amps).unwrap();
        let reference = big.clone();
        big.apply_controlled(&[3], &GateMatrix::rx(0.7), &[9]).unwrap();
        let mut serial = reference.amplitudes().to_vec();
        let (cb, tb) = (n - 1 - 3, n - 1 - 9);
        let g = GateMatrix::<f64>::rx(0.7);
        for i in 0..serial.len() {
            if (i >> cb) & 1 == 1 && (i >> tb) & 1 == 0 {
                let j = i | (1 << tb);
                let (a0, a1) = (reference.amplitudes()[i], reference.amplitudes()[j]);
                serial[i] = g.matrix()[(0, 0)] * a0 + g.matrix()[(0, 1)] * a1;
                serial[j] = g.matrix()[(1, 0)] * a0 + g.matrix()[(1, 1)] * a1;
            }
        }
        assert!(close(big.amplitudes(), &serial, 1e-15));
    }
}
