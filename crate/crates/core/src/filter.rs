//! Ancilla-based vacuum filtering.
//!
//! Two circuits live here:
//!
//! * the exact one-ancilla tag `|0⟩|ψ⟩ → α|0⟩|E0⟩ + β|1⟩|E1⟩` for a
//!   two-level system, realized as `V`, CNOT (system → ancilla), `V†` with
//!   `V|E_j⟩ = |j⟩`;
//! * the general `m`-ancilla filter: Hadamards on all ancillas, ancilla `j`
//!   controlling `U(θ)^{p_j}` with `U(θ) = i·exp(−iθH/2)`, Hadamards again,
//!   then post-selection of all ancillas on `|0⟩`.
//!
//! An eigencomponent of energy `E` survives the general filter with the
//! amplitude `Π_j (1 + z^{p_j})/2`, `z = i·exp(−iEθ/2)`. With powers
//! `(1, 2)` that is `(1 + z + z² + z³)/4`. Choosing `θ = π/E0'` makes
//! `z = 1` at `E = E0'`, so a good energy estimate passes the vacuum
//! through untouched while other levels are damped.
//!
//! Joint registers put the ancillas first: qubits `0..m` are ancillas and
//! the system occupies the trailing qubits.

use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::estimator::{eigen_overlaps, shot_expectation_sum};
use crate::gate::GateMatrix;
use crate::linalg::Matrix;
use crate::pauli::PauliSum;
use crate::scalar::{c, cpow, i_pow, Real, C};
use crate::spectrum::{exact_diagonalize, Spectrum, DEGENERACY_TOLERANCE};
use crate::state::{BitString, StateVector};

/// Smallest `|E0'|` for which `θ = π/E0'` is defined.
pub const MIN_ENERGY_FOR_THETA: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct FilterConfig<T: Real = f64> {
    theta: T,
    powers: Vec<u64>,
}

impl<T: Real> FilterConfig<T> {
    /// `num_ancillas` ancillas with the default powers `1, 2, 4, …`.
    pub fn new(num_ancillas: usize, theta: T) -> Result<Self> {
        if num_ancillas == 0 || num_ancillas > 32 {
            return domain(format!("ancilla count must be in 1..=32, got {num_ancillas}"));
        }
        Self::with_powers(theta, (0..num_ancillas).map(|j| 1u64 << j).collect())
    }

    pub fn with_powers(theta: T, powers: Vec<u64>) -> Result<Self> {
        if powers.is_empty() {
            return domain("filter needs at least one ancilla");
        }
        if powers.iter().any(|&p| p == 0) {
            return domain("ancilla powers must be strictly positive");
        }
        if !theta.is_finite() {
            return domain(format!("theta must be finite, got {theta}"));
        }
        Ok(Self { theta, powers })
    }

    pub fn num_ancillas(&self) -> usize {
        self.powers.len()
    }

    pub fn theta(&self) -> T {
        self.theta
    }

    pub fn powers(&self) -> &[u64] {
        &self.powers
    }

    pub fn with_theta(&self, theta: T) -> Result<Self> {
        Self::with_powers(theta, self.powers.clone())
    }
}

#[derive(Clone, Debug)]
pub struct FilterOutcome<T: Real = f64> {
    /// Probability of reading all ancillas as `0`.
    pub success_probability: T,
    /// Post-selected system state.
    pub refined_state: StateVector<T>,
    /// True when the run was post-selected (discard mode).
    pub kept: bool,
    /// Full ancilla + system state before measurement, kept in
    /// non-discard mode for mixed estimation.
    pub joint_state: Option<StateVector<T>>,
}

/// Applies the one-ancilla tagging circuit to `joint = |0⟩ ⊗ |ψ⟩`.
pub fn tag_circuit_one_qubit<T: Real>(joint: &StateVector<T>, spectrum: &Spectrum<T>) -> Result<StateVector<T>> {
    if joint.num_qubits() != 2 || spectrum.num_qubits() != 1 {
        return domain("tagging circuit needs one ancilla plus a one-qubit system");
    }
    if spectrum.gap() < T::of(DEGENERACY_TOLERANCE) {
        return Err(Error::Precondition("system spectrum is degenerate".into()));
    }
    let ancilla_one: T = joint.amplitudes()[2..].iter().map(|a| a.norm_sqr()).sum();
    if ancilla_one > T::tol(1e-10) {
        return Err(Error::Precondition(format!(
            "ancilla not in |0>: population {ancilla_one:e} on |1>"
        )));
    }
    // V = Σ_j |j⟩⟨E_j| is the adjoint of the eigenvector matrix.
    let v = GateMatrix::new(spectrum.eigenvectors().adjoint())?;
    let mut out = joint.clone();
    out.apply_gate(&v, &[1])?;
    out.apply_controlled(&[1], &GateMatrix::pauli_x(), &[0])?;
    out.apply_gate(&v.adjoint(), &[1])?;
    Ok(out)
}

/// `E0' = ⟨ψ|H|ψ⟩`, exactly.
pub fn estimate_e0<T: Real>(state: &StateVector<T>, h: &PauliSum<T>) -> Result<T> {
    state.expectation(h)
}

/// Shot estimate of `E0'`, one Pauli term at a time.
pub fn estimate_e0_shots<T: Real>(state: &StateVector<T>, h: &PauliSum<T>, shots: u64, seed: u64) -> Result<T> {
    Ok(shot_expectation_sum(state, h, shots, seed)?.value)
}

/// `θ = π / E0'`, keeping the sign of `E0'`.
pub fn choose_theta<T: Real>(e0_prime: T) -> Result<T> {
    if !(e0_prime.abs() >= T::of(MIN_ENERGY_FOR_THETA)) {
        return Err(Error::DegenerateEnergy(e0_prime.as_f64()));
    }
    Ok(T::PI() / e0_prime)
}

/// `z = i·exp(−iEθ/2)`, the eigenphase of `U(θ)` at energy `E`.
pub fn eigenphase<T: Real>(energy: T, theta: T) -> C<T> {
    c(T::zero(), T::one()) * C::from_polar(T::one(), -energy * theta / T::of(2.0))
}

/// Amplitude multiplier of an eigencomponent with energy `energy` after
/// post-selecting all ancillas on `0`.
pub fn filter_amplitude<T: Real>(energy: T, theta: T, config: &FilterConfig<T>) -> C<T> {
    let z = eigenphase(energy, theta);
    let half = T::of(0.5);
    config
        .powers
        .iter()
        .map(|&p| (C::<T>::one() + cpow(z, p)) * half)
        .fold(C::<T>::one(), |acc, f| acc * f)
}

/// `U(θ)^k = i^k·exp(−i·kθ/2·H)` as a dense gate on the system register.
fn u_power<T: Real>(spectrum: &Spectrum<T>, theta: T, k: u64) -> Result<GateMatrix<T>> {
    let duration = T::of(k as f64) * theta / T::of(2.0);
    let phase = i_pow::<T>(k);
    GateMatrix::new(spectrum.function(|l| phase * C::from_polar(T::one(), -l * duration)))
}

fn system_qubits<T: Real>(joint: &StateVector<T>, h: &PauliSum<T>) -> Result<Vec<usize>> {
    let n_sys = h.num_qubits();
    if joint.num_qubits() <= n_sys {
        return domain("joint register has no room for ancillas");
    }
    Ok((joint.num_qubits() - n_sys..joint.num_qubits()).collect())
}

/// Applies controlled-`U(θ)^k` with `ancilla` as control; the `i^k`
/// factor is part of the controlled operation.
pub fn controlled_u_power<T: Real>(
    joint: &StateVector<T>,
    ancilla: usize,
    h: &PauliSum<T>,
    theta: T,
    k: u64,
) -> Result<StateVector<T>> {
    if k == 0 {
        return domain("power k must be at least 1");
    }
    let spectrum = exact_diagonalize(h)?;
    controlled_u_power_with(joint, ancilla, &spectrum, h, theta, k)
}

fn controlled_u_power_with<T: Real>(
    joint: &StateVector<T>,
    ancilla: usize,
    spectrum: &Spectrum<T>,
    h: &PauliSum<T>,
    theta: T,
    k: u64,
) -> Result<StateVector<T>> {
    let system = system_qubits(joint, h)?;
    if ancilla >= system[0] {
        return domain(format!("ancilla {ancilla} overlaps the system register"));
    }
    let gate = u_power(spectrum, theta, k)?;
    let mut out = joint.clone();
    out.apply_controlled(&[ancilla], &gate, &system)?;
    Ok(out)
}

/// Runs the `m`-ancilla filter circuit on `system_state`.
///
/// In discard mode the ancillas are post-selected on `0…0` and an
/// impossible outcome is an error. Otherwise the pre-measurement joint
/// state is returned alongside the (still computed, when possible)
/// post-selected system state.
pub fn apply_filter<T: Real>(
    system_state: &StateVector<T>,
    h: &PauliSum<T>,
    config: &FilterConfig<T>,
    discard: bool,
) -> Result<FilterOutcome<T>> {
    let spectrum = exact_diagonalize(h)?;
    apply_filter_with(system_state, h, &spectrum, config, discard)
}

pub(crate) fn apply_filter_with<T: Real>(
    system_state: &StateVector<T>,
    h: &PauliSum<T>,
    spectrum: &Spectrum<T>,
    config: &FilterConfig<T>,
    discard: bool,
) -> Result<FilterOutcome<T>> {
    if system_state.num_qubits() != h.num_qubits() {
        return domain(format!(
            "system state has {} qubits, Hamiltonian {}",
            system_state.num_qubits(),
            h.num_qubits()
        ));
    }
    let m = config.num_ancillas();
    let ancillas: Vec<usize> = (0..m).collect();
    let mut joint = StateVector::zero_state(m)?.tensor(system_state);
    let hadamard = GateMatrix::hadamard();
    for &a in &ancillas {
        joint.apply_gate(&hadamard, &[a])?;
    }
    for (&a, &p) in ancillas.iter().zip(config.powers()) {
        joint = controlled_u_power_with(&joint, a, spectrum, h, config.theta(), p)?;
    }
    for &a in &ancillas {
        joint.apply_gate(&hadamard, &[a])?;
    }
    let selected = joint.postselect(&ancillas, &BitString::zeros(m));
    if discard {
        let (p, refined) = selected?;
        return Ok(FilterOutcome {
            success_probability: p,
            refined_state: refined,
            kept: true,
            joint_state: None,
        });
    }
    let (p, refined) = match selected {
        Ok(pair) => pair,
        Err(Error::ImpossibleOutcome { probability, .. }) => (T::of(probability), system_state.clone()),
        Err(e) => return Err(e),
    };
    Ok(FilterOutcome {
        success_probability: p,
        refined_state: refined,
        kept: false,
        joint_state: Some(joint),
    })
}

/// `Σ_j |c_j|²·|A(E_j)|²`, the success probability predicted from the
/// eigen-decomposition alone.
pub fn predicted_success_probability<T: Real>(
    state: &StateVector<T>,
    spectrum: &Spectrum<T>,
    config: &FilterConfig<T>,
) -> Result<T> {
    let w = eigen_overlaps(state, spectrum)?.weights();
    Ok(w.iter()
        .zip(spectrum.eigenvalues())
        .map(|(w, &e)| *w * filter_amplitude(e, config.theta(), config).norm_sqr())
        .sum())
}

/// How `θ` is picked on each refinement pass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ThetaPolicy<T: Real = f64> {
    /// `θ = π/⟨ψ|H|ψ⟩` from the current state (exact expectation).
    Auto,
    /// Like `Auto` with `E0'` estimated from shots; pass `k` uses
    /// `derive_seed(seed, k)`.
    AutoShots { shots: u64, seed: u64 },
    /// `θ = π/E0` from the diagonalization oracle.
    Oracle,
    Fixed(T),
}

#[derive(Clone, Debug)]
pub struct RefineOptions<T: Real = f64> {
    pub num_ancillas: usize,
    /// Defaults to `1, 2, 4, …` when `None`.
    pub powers: Option<Vec<u64>>,
    pub theta: ThetaPolicy<T>,
    pub max_iters: usize,
    /// Stop once `1 − fidelity` is at or below this.
    pub target_infidelity: T,
}

impl<T: Real> RefineOptions<T> {
    pub fn new(num_ancillas: usize, max_iters: usize, target_infidelity: T) -> Self {
        Self {
            num_ancillas,
            powers: None,
            theta: ThetaPolicy::Auto,
            max_iters,
            target_infidelity,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinementStep<T: Real = f64> {
    /// Energy estimate of the state entering this pass.
    pub e0_prime: T,
    pub theta: T,
    pub success_probability: T,
    /// Fidelity to the exact ground state after this pass.
    pub fidelity_to_ground: T,
    /// `1 − fidelity` after this pass.
    pub excited_weight: T,
    /// Eigen-weights after this pass, index-aligned with the spectrum.
    pub weights: Vec<T>,
    /// Set when the pass could not complete (undefined θ or impossible
    /// post-selection); the state is then left unchanged.
    pub aborted: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefinementStatus {
    TargetReached,
    MaxIterations,
    Aborted,
}

impl RefinementStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RefinementStatus::TargetReached => "target_reached",
            RefinementStatus::MaxIterations => "max_iterations",
            RefinementStatus::Aborted => "aborted",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RefinementReport<T: Real = f64> {
    pub initial_e0_prime: T,
    pub initial_fidelity: T,
    pub initial_weights: Vec<T>,
    pub iterations: Vec<RefinementStep<T>>,
    pub status: RefinementStatus,
    pub final_state: StateVector<T>,
    pub spectrum: Spectrum<T>,
}

/// Repeats estimate-`E0'` → choose-`θ` → filter-and-discard with the
/// default options (`θ` from the exact expectation, powers `2^j`).
pub fn refine_iteratively<T: Real>(
    system_state: &StateVector<T>,
    h: &PauliSum<T>,
    num_ancillas: usize,
    max_iters: usize,
    target_infidelity: T,
) -> Result<RefinementReport<T>> {
    refine_with(system_state, h, &RefineOptions::new(num_ancillas, max_iters, target_infidelity))
}

pub fn refine_with<T: Real>(
    system_state: &StateVector<T>,
    h: &PauliSum<T>,
    options: &RefineOptions<T>,
) -> Result<RefinementReport<T>> {
    if options.max_iters == 0 {
        return domain("max_iters must be at least 1");
    }
    let spectrum = exact_diagonalize(h)?;
    let base = match &options.powers {
        Some(p) => FilterConfig::with_powers(T::one(), p.clone())?,
        None => FilterConfig::new(options.num_ancillas, T::one())?,
    };
    let ground = spectrum.ground_state();
    let initial_weights = eigen_overlaps(system_state, &spectrum)?.weights();
    let mut report = RefinementReport {
        initial_e0_prime: estimate_e0(system_state, h)?,
        initial_fidelity: system_state.fidelity(&ground)?,
        initial_weights,
        iterations: Vec::new(),
        status: RefinementStatus::MaxIterations,
        final_state: system_state.clone(),
        spectrum: spectrum.clone(),
    };
    let mut state = system_state.clone();
    for pass in 0..options.max_iters {
        let e0_prime = match options.theta {
            ThetaPolicy::AutoShots { shots, seed } => {
                estimate_e0_shots(&state, h, shots, crate::rng::derive_seed(seed, pass as u64))?
            }
            _ => estimate_e0(&state, h)?,
        };
        let theta = match options.theta {
            ThetaPolicy::Auto | ThetaPolicy::AutoShots { .. } => choose_theta(e0_prime),
            ThetaPolicy::Oracle => choose_theta(spectrum.ground_energy()),
            ThetaPolicy::Fixed(t) => Ok(t),
        };
        let outcome = theta.and_then(|theta| {
            let config = base.with_theta(theta)?;
            apply_filter_with(&state, h, &spectrum, &config, true).map(|o| (theta, o))
        });
        match outcome {
            Ok((theta, outcome)) => {
                state = outcome.refined_state;
                let weights = eigen_overlaps(&state, &spectrum)?.weights();
                let excited: T = weights[1..].iter().copied().sum();
                report.iterations.push(RefinementStep {
                    e0_prime,
                    theta,
                    success_probability: outcome.success_probability,
                    fidelity_to_ground: weights[0].min(T::one()),
                    excited_weight: excited,
                    weights,
                    aborted: None,
                });
                if excited <= options.target_infidelity {
                    report.status = RefinementStatus::TargetReached;
                    break;
                }
            }
            Err(e @ (Error::DegenerateEnergy(_) | Error::ImpossibleOutcome { .. })) => {
                let weights = eigen_overlaps(&state, &spectrum)?.weights();
                report.iterations.push(RefinementStep {
                    e0_prime,
                    theta: T::nan(),
                    success_probability: T::zero(),
                    fidelity_to_ground: weights[0].min(T::one()),
                    excited_weight: weights[1..].iter().copied().sum(),
                    weights,
                    aborted: Some(e.to_string()),
                });
                report.status = RefinementStatus::Aborted;
                break;
            }
            Err(e) => return Err(e),
        }
    }
    report.final_state = state;
    Ok(report)
}

/// Dense matrix of the full filter circuit on `m` ancillas plus the
/// system, before measurement. Test and diagnostic use.
pub fn filter_circuit_matrix<T: Real>(h: &PauliSum<T>, config: &FilterConfig<T>) -> Result<Matrix<T>> {
    let spectrum = exact_diagonalize(h)?;
    let m = config.num_ancillas();
    let n_sys = h.num_qubits();
    let dim = 1usize << (m + n_sys);
    let mut out = Matrix::zeros(dim, dim);
    for col in 0..dim {
        let mut joint = StateVector::basis_state(m + n_sys, col)?;
        let hadamard = GateMatrix::hadamard();
        for a in 0..m {
            joint.apply_gate(&hadamard, &[a])?;
        }
        for (a, &p) in config.powers().iter().enumerate() {
            joint = controlled_u_power_with(&joint, a, &spectrum, h, config.theta(), p)?;
        }
        for a in 0..m {
            joint.apply_gate(&hadamard, &[a])?;
        }
        for (row, v) in joint.amplitudes().iter().enumerate() {
            if !v.is_zero() {
                out[(row, col)] = *v;
            }
        }
    }
    Ok(out)
}
