//! Time evolution under the linear interpolation `(1-s)·H0 + s·H1`,
//! followed by an optional hold under the final Hamiltonian.
//!
//! Step `k` of a sweep (covering `[k·dt, (k+1)·dt]`) evolves under the
//! Hamiltonian at the interval midpoint, `s_k = (k + 1/2)·dt/T`.

use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Error, Result};
use crate::pauli::{interpolate, PauliSum};
use crate::spectrum::{exact_diagonalize, Spectrum};
use crate::state::StateVector;
use crate::scalar::Real;

/// How the schedule parameter is sampled inside each step.
pub const SCHEDULE_DISCRETIZATION: &str = "midpoint";

const STEP_COUNT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule<T: Real = f64> {
    total_time: T,
    dt: T,
    hold_time: T,
}

impl<T: Real> Schedule<T> {
    /// `total_time` and `hold_time` must both be whole multiples of `dt`.
    pub fn new(total_time: T, dt: T, hold_time: T) -> Result<Self> {
        if !(total_time > T::zero()) || !total_time.is_finite() {
            return domain(format!("total time T must be positive, got {total_time}"));
        }
        if !(dt > T::zero()) || dt > total_time {
            return domain(format!("time step dt must satisfy 0 < dt <= T, got {dt}"));
        }
        if !(hold_time >= T::zero()) || !hold_time.is_finite() {
            return domain(format!("hold time must be non-negative, got {hold_time}"));
        }
        for (name, span) in [("T", total_time), ("hold_time", hold_time)] {
            let ratio = (span / dt).as_f64();
            if (ratio - ratio.round()).abs() > STEP_COUNT_TOLERANCE {
                return domain(format!("{name}/dt = {ratio} is not a whole number of steps"));
            }
        }
        Ok(Self { total_time, dt, hold_time })
    }

    pub fn total_time(&self) -> T {
        self.total_time
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn hold_time(&self) -> T {
        self.hold_time
    }

    pub fn sweep_steps(&self) -> usize {
        (self.total_time / self.dt).as_f64().round() as usize
    }

    pub fn hold_steps(&self) -> usize {
        (self.hold_time / self.dt).as_f64().round() as usize
    }

    /// Schedule parameter used during sweep step `k`.
    pub fn s_at_step(&self, k: usize) -> T {
        let s = (T::of(k as f64) + T::of(0.5)) / T::of(self.sweep_steps() as f64);
        s.min(T::one())
    }

    /// `t/T` clamped into `[0, 1]`.
    pub fn s_at_time(&self, t: T) -> T {
        (t / self.total_time).max(T::zero()).min(T::one())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionMode {
    /// Exact `exp(-i·H·dt)` from the diagonalization oracle.
    ExactStep,
    /// First-order product formula over Pauli terms (see [`PauliSum::trotter_order`]).
    Trotter1,
}

impl fmt::Display for EvolutionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvolutionMode::ExactStep => "exact_step",
            EvolutionMode::Trotter1 => "trotter1",
        })
    }
}

impl FromStr for EvolutionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact_step" => Ok(EvolutionMode::ExactStep),
            "trotter1" => Ok(EvolutionMode::Trotter1),
            other => domain(format!("unknown evolution mode {other:?} (expected exact_step or trotter1)")),
        }
    }
}

/// One recorded time point.
#[derive(Clone, Debug)]
pub struct TrajectoryRecord<T: Real = f64> {
    pub t: T,
    /// Values in the order of [`Trajectory::observable_names`].
    pub observables: Vec<T>,
    /// Fidelity to the exact ground state of the Hamiltonian at time `t`.
    pub fidelity_to_ground: T,
    /// `⟨H(t)⟩`.
    pub energy: T,
    pub state: Option<StateVector<T>>,
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory<T: Real = f64> {
    pub observable_names: Vec<String>,
    pub records: Vec<TrajectoryRecord<T>>,
    /// Notes such as degenerate instantaneous ground states.
    pub warnings: Vec<String>,
}

impl<T: Real> Trajectory<T> {
    fn new(observables: &[(String, PauliSum<T>)]) -> Self {
        Self {
            observable_names: observables.iter().map(|(n, _)| n.clone()).collect(),
            records: Vec::new(),
            warnings: Vec::new(),
        }
    }

    /// Time series of one named observable.
    pub fn series(&self, name: &str) -> Option<Vec<(T, T)>> {
        let idx = self.observable_names.iter().position(|n| n == name)?;
        Some(self.records.iter().map(|r| (r.t, r.observables[idx])).collect())
    }

    pub fn last(&self) -> Option<&TrajectoryRecord<T>> {
        self.records.last()
    }

    fn warn(&mut self, msg: String) {
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
    }

    fn record(
        &mut self,
        t: T,
        state: &StateVector<T>,
        observables: &[(String, PauliSum<T>)],
        reference: &Spectrum<T>,
        h: &PauliSum<T>,
        snapshot: bool,
    ) -> Result<()> {
        if let Some(last) = self.records.last() {
            if !(t > last.t) {
                return Err(Error::Precondition(format!("trajectory time {t} not after {}", last.t)));
            }
        }
        let values = observables
            .iter()
            .map(|(_, o)| state.expectation(o))
            .collect::<Result<Vec<T>>>()?;
        let fidelity = state.fidelity(&reference.ground_state())?.min(T::one());
        self.records.push(TrajectoryRecord {
            t,
            observables: values,
            fidelity_to_ground: fidelity,
            energy: state.expectation(h)?,
            state: snapshot.then(|| state.clone()),
        });
        Ok(())
    }
}

/// Advances `state` by `dt` under the fixed Hamiltonian `h`.
pub fn evolve_step<T: Real>(
    state: &StateVector<T>,
    h: &PauliSum<T>,
    dt: T,
    mode: EvolutionMode,
) -> Result<StateVector<T>> {
    if !(dt > T::zero()) {
        return domain(format!("dt must be positive, got {dt}"));
    }
    let mut next = state.clone();
    match mode {
        EvolutionMode::ExactStep => {
            let u = exact_diagonalize(h)?.evolution(dt)?;
            apply_full(&mut next, h, &u)?;
        }
        EvolutionMode::Trotter1 => trotter_step(&mut next, &h.trotter_order(), dt)?,
    }
    Ok(next)
}

fn apply_full<T: Real>(state: &mut StateVector<T>, h: &PauliSum<T>, u: &crate::GateMatrix<T>) -> Result<()> {
    if h.num_qubits() != state.num_qubits() {
        return domain(format!(
            "Hamiltonian acts on {} qubits, state has {}",
            h.num_qubits(),
            state.num_qubits()
        ));
    }
    let all: Vec<usize> = (0..state.num_qubits()).collect();
    state.apply_gate(u, &all)
}

fn trotter_step<T: Real>(state: &mut StateVector<T>, ordered: &[(T, crate::PauliString)], dt: T) -> Result<()> {
    for (coeff, string) in ordered {
        if string.num_qubits() != state.num_qubits() {
            return domain("Hamiltonian and state sizes differ");
        }
        string.apply_rotation(state.amps_mut(), *coeff * dt);
    }
    Ok(())
}

/// Sweeps from `|0…0⟩` (the ground state of `-J Σ Z`) to `h1`.
///
/// Records the start point at `t = 0` and every step after it. Fidelity
/// and energy columns refer to the instantaneous Hamiltonian at `s = t/T`.
pub fn run_adiabatic<T: Real>(
    h0: &PauliSum<T>,
    h1: &PauliSum<T>,
    schedule: &Schedule<T>,
    mode: EvolutionMode,
    observables: &[(String, PauliSum<T>)],
    snapshots: bool,
) -> Result<(StateVector<T>, Trajectory<T>)> {
    if h0.num_qubits() != h1.num_qubits() {
        return domain("initial and final Hamiltonians act on different registers");
    }
    check_observables(observables, h0.num_qubits())?;
    let mut state = StateVector::zero_state(h0.num_qubits())?;

    let start_spectrum = exact_diagonalize(h0)?;
    let start_energy = state.expectation(h0)?;
    if (start_energy - start_spectrum.ground_energy()).abs() > T::tol(1e-10) * h0.one_norm().max(T::one())
    {
        return Err(Error::Precondition(
            "|0...0> is not a ground state of the initial Hamiltonian".into(),
        ));
    }

    let mut traj = Trajectory::new(observables);
    traj.record(T::zero(), &state, observables, &start_spectrum, h0, snapshots)?;

    let steps = schedule.sweep_steps();
    for k in 0..steps {
        let hk = interpolate(h0, h1, schedule.s_at_step(k))?;
        match mode {
            EvolutionMode::ExactStep => {
                let u = exact_diagonalize(&hk)?.evolution(schedule.dt())?;
                apply_full(&mut state, &hk, &u)?;
            }
            EvolutionMode::Trotter1 => trotter_step(&mut state, &hk.trotter_order(), schedule.dt())?,
        }
        let t = if k + 1 == steps {
            schedule.total_time()
        } else {
            T::of((k + 1) as f64) * schedule.dt()
        };
        let h_now = interpolate(h0, h1, schedule.s_at_time(t))?;
        let reference = exact_diagonalize(&h_now)?;
        if reference.is_degenerate() {
            traj.warn(format!("degenerate instantaneous ground state at t = {t}"));
        }
        traj.record(t, &state, observables, &reference, &h_now, snapshots)?;
    }
    Ok((state, traj))
}

/// Evolves under the fixed Hamiltonian `h` for `schedule.hold_time()`,
/// recording at `t_start + dt, t_start + 2·dt, …`.
pub fn run_hold<T: Real>(
    state: &StateVector<T>,
    h: &PauliSum<T>,
    schedule: &Schedule<T>,
    mode: EvolutionMode,
    observables: &[(String, PauliSum<T>)],
    t_start: T,
    snapshots: bool,
) -> Result<(StateVector<T>, Trajectory<T>)> {
    check_observables(observables, state.num_qubits())?;
    let spectrum = exact_diagonalize(h)?;
    hold_with(state, h, &spectrum, schedule, mode, observables, t_start, snapshots)
}

/// [`run_hold`] with an explicit fidelity reference, for joint registers
/// where `h` acts trivially on ancillas.
#[allow(clippy::too_many_arguments)]
pub fn hold_with<T: Real>(
    state: &StateVector<T>,
    h: &PauliSum<T>,
    reference: &Spectrum<T>,
    schedule: &Schedule<T>,
    mode: EvolutionMode,
    observables: &[(String, PauliSum<T>)],
    t_start: T,
    snapshots: bool,
) -> Result<(StateVector<T>, Trajectory<T>)> {
    let mut traj = Trajectory::new(observables);
    if reference.is_degenerate() {
        traj.warn("degenerate ground state of the hold Hamiltonian".into());
    }
    let mut current = state.clone();
    let exact = match mode {
        EvolutionMode::ExactStep => Some(exact_diagonalize(h)?.evolution(schedule.dt())?),
        EvolutionMode::Trotter1 => None,
    };
    let ordered = h.trotter_order();
    for k in 1..=schedule.hold_steps() {
        match &exact {
            Some(u) => apply_full(&mut current, h, u)?,
            None => trotter_step(&mut current, &ordered, schedule.dt())?,
        }
        let t = t_start + T::of(k as f64) * schedule.dt();
        traj.record(t, &current, observables, reference, h, snapshots)?;
    }
    Ok((current, traj))
}

fn check_observables<T: Real>(observables: &[(String, PauliSum<T>)], n: usize) -> Result<()> {
    match observables.iter().find(|(_, o)| o.num_qubits() != n) {
        Some((name, o)) => domain(format!(
            "observable {name} acts on {} qubits, register has {n}",
            o.num_qubits()
        )),
        None => Ok(()),
    }
}
