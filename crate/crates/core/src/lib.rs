//! Statevector simulation of adiabatic vacuum preparation and of the
//! ancilla-based filters that strip excited-state contamination from the
//! prepared vacuum.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the
//! `*64` / `*32` aliases below fix the precision.
//!
//! Qubit 0 is the most significant bit of a basis index (the leftmost ket
//! symbol). Joint ancilla + system registers place ancillas first.

pub mod adiabatic;
pub mod error;
pub mod estimator;
pub mod filter;
pub mod gate;
pub mod linalg;
pub mod pauli;
pub mod rng;
pub mod scalar;
pub mod spectrum;
pub mod state;

pub use adiabatic::{evolve_step, run_adiabatic, run_hold, EvolutionMode, Schedule, Trajectory, TrajectoryRecord};
pub use error::{Error, Result};
pub use estimator::{
    corrected_expectation, cross_term, eigen_overlaps, shot_expectation, shot_expectation_sum, EigenOverlaps,
    EstimateResult,
};
pub use filter::{
    apply_filter, choose_theta, controlled_u_power, estimate_e0, filter_amplitude, refine_iteratively, refine_with,
    tag_circuit_one_qubit, FilterConfig, FilterOutcome, RefineOptions, RefinementReport, RefinementStatus,
    RefinementStep, ThetaPolicy,
};
pub use gate::GateMatrix;
pub use linalg::Matrix;
pub use pauli::{
    hadamard_hamiltonian, initial_hamiltonian, interpolate, transverse_field_ising, Pauli, PauliString, PauliSum,
};
pub use scalar::{Real, C};
pub use spectrum::{evolution_unitary, exact_diagonalize, Spectrum};
pub use state::{BitString, Histogram, StateVector};

pub type StateVector64 = StateVector<f64>;
pub type StateVector32 = StateVector<f32>;
pub type GateMatrix64 = GateMatrix<f64>;
pub type GateMatrix32 = GateMatrix<f32>;
pub type PauliSum64 = PauliSum<f64>;
pub type PauliSum32 = PauliSum<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type Schedule64 = Schedule<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type FilterConfig64 = FilterConfig<f64>;
pub type RefinementReport64 = RefinementReport<f64>;
pub type EstimateResult64 = EstimateResult<f64>;
