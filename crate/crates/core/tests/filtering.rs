use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use vacuum_core::estimator::{corrected_expectation, correction_symmetry_error};
use vacuum_core::filter::{filter_circuit_matrix, predicted_success_probability};
use vacuum_core::{
    apply_filter, choose_theta, controlled_u_power, cross_term, eigen_overlaps, exact_diagonalize,
    filter_amplitude, hadamard_hamiltonian, initial_hamiltonian, refine_iteratively, refine_with,
    run_adiabatic, tag_circuit_one_qubit, transverse_field_ising, EvolutionMode, FilterConfig, GateMatrix,
    PauliSum, RefineOptions, RefinementStatus, Schedule, StateVector, ThetaPolicy,
};

const J: f64 = PI / 4.0;

fn prepare(h1: &PauliSum, total: f64) -> StateVector {
    let schedule = Schedule::new(total, 1.0 / 24.0, 0.0).unwrap();
    let h0 = initial_hamiltonian(J, h1.num_qubits()).unwrap();
    run_adiabatic(&h0, h1, &schedule, EvolutionMode::ExactStep, &[], false).unwrap().0
}

#[test]
fn controlled_power_matches_dense_oracle() {
    let h = transverse_field_ising(J, 1.0, 2).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    let amps: Vec<Complex64> = (0..8).map(|i| Complex64::new((i as f64).cos(), 0.3 * i as f64)).collect();
    let joint = StateVector::normalized(amps).unwrap();
    for k in [1u64, 2, 3] {
        let theta = 0.7;
        let phase = Complex64::new(0.0, 1.0).powu(k as u32);
        let u = sp.function(|l| phase * Complex64::from_polar(1.0, -l * k as f64 * theta / 2.0));
        let p0 = vacuum_core::Matrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let p1 = vacuum_core::Matrix::diagonal(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let dense = p0.kron(&vacuum_core::Matrix::identity(4)).add(&p1.kron(&u));
        let expect = dense.matvec(joint.amplitudes());
        let got = controlled_u_power(&joint, 0, &h, theta, k).unwrap();
        let err = got.amplitudes().iter().zip(&expect).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "k={k} err={err}");
    }
}

#[test]
fn full_circuit_block_is_diagonal_in_eigenbasis() {
    // The ⟨0…0|·|0…0⟩ ancilla block of the circuit is Σ_j A(E_j)|E_j⟩⟨E_j|.
    let h = transverse_field_ising(J, 0.6, 2).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    for m in 1..=3 {
        let cfg = FilterConfig::new(m, 1.1).unwrap();
        let full = filter_circuit_matrix(&h, &cfg).unwrap();
        assert!(full.unitarity_error() < 1e-12);
        let block = vacuum_core::Matrix::from_fn(4, 4, |i, j| full[(i, j)]);
        let expect = sp.function(|e| filter_amplitude(e, 1.1, &cfg));
        assert!(block.max_abs_diff(&expect) < 1e-12, "m={m}");
    }
}

#[test]
fn one_qubit_tagging_on_prepared_state() {
    let h = hadamard_hamiltonian(J).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    let psi = prepare(&h, 36.0);
    let c = eigen_overlaps(&psi, &sp).unwrap().coefficients;
    let joint = StateVector::zero_state(1).unwrap().tensor(&psi);
    let out = tag_circuit_one_qubit(&joint, &sp).unwrap();
    // Expected α|0⟩|E0⟩ + β|1⟩|E1⟩ assembled directly.
    let zero = StateVector::zero_state(1).unwrap();
    let one = StateVector::basis_state(1, 1).unwrap();
    let a = zero.tensor(&sp.eigenstate(0));
    let b = one.tensor(&sp.eigenstate(1));
    let expect: Vec<Complex64> =
        a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| c[0] * x + c[1] * y).collect();
    let err = out.amplitudes().iter().zip(&expect).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    assert!(err < 1e-14);

    let z = "1 IZ".parse::<PauliSum>().unwrap();
    let z_anc = "1 ZI".parse::<PauliSum>().unwrap();
    let raw = out.expectation(&z).unwrap();
    let two_p0_minus_1 = out.expectation(&z_anc).unwrap();
    assert!((raw - two_p0_minus_1 * FRAC_1_SQRT_2).abs() < 1e-14);
    let p0 = (1.0 + two_p0_minus_1) / 2.0;
    assert!((corrected_expectation(raw, p0).unwrap() - FRAC_1_SQRT_2).abs() < 1e-12);
    assert!(correction_symmetry_error(&sp, &"1 Z".parse().unwrap()).unwrap() < 1e-14);
}

#[test]
fn discontinuity_is_the_cross_term() {
    let h = hadamard_hamiltonian(J).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    let psi = prepare(&h, 36.0);
    let z: PauliSum = "1 Z".parse().unwrap();
    let before = psi.expectation(&z).unwrap();
    let joint = tag_circuit_one_qubit(&StateVector::zero_state(1).unwrap().tensor(&psi), &sp).unwrap();
    let after = joint.expectation(&"1 IZ".parse().unwrap()).unwrap();
    let cross = cross_term(&psi, &sp, &z).unwrap();
    assert!((before - after - cross).abs() < 1e-12);
    assert!(cross.abs() > 1e-4);
}

#[test]
fn paper_model_exact_theta_rejects_excited_state() {
    let h = hadamard_hamiltonian(J).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    let theta = choose_theta(sp.ground_energy()).unwrap();
    assert!((theta + 4.0).abs() < 1e-14);
    let cfg = FilterConfig::new(2, theta).unwrap();
    assert!(filter_amplitude(sp.eigenvalues()[1], theta, &cfg).norm() < 1e-12);

    let psi = prepare(&h, 36.0);
    let out = apply_filter(&psi, &h, &cfg, true).unwrap();
    assert!((out.refined_state.fidelity(&sp.ground_state()).unwrap() - 1.0).abs() < 1e-12);

    let mut opts = RefineOptions::new(2, 3, 1e-14);
    opts.theta = ThetaPolicy::Oracle;
    let report = refine_with(&psi, &h, &opts).unwrap();
    let before = report.initial_weights[1];
    let after = report.iterations[0].excited_weight;
    assert!(after <= 1e-6 * before);
}

#[test]
fn one_qubit_auto_theta_is_monotone() {
    let h = hadamard_hamiltonian(J).unwrap();
    let psi = prepare(&h, 4.0);
    let report = refine_iteratively(&psi, &h, 2, 5, 0.0).unwrap();
    let mut weight = report.initial_weights[1];
    let mut energy = report.initial_e0_prime;
    for it in &report.iterations {
        // Below ~1e-30 the weight is rounding noise.
        assert!(it.excited_weight < weight || weight < 1e-30, "{} !< {weight}", it.excited_weight);
        weight = it.excited_weight;
        assert!(it.e0_prime <= energy + 1e-15);
        energy = it.e0_prime;
    }
    assert!(energy >= -J - 1e-12);
}

fn assert_oracle_ratios(report: &vacuum_core::RefinementReport, cfg_m: usize) {
    let sp = &report.spectrum;
    let mut prev = report.initial_weights.clone();
    for it in &report.iterations {
        let cfg = FilterConfig::new(cfg_m, it.theta).unwrap();
        let a: Vec<f64> = sp
            .eigenvalues()
            .iter()
            .map(|&e| filter_amplitude(e, it.theta, &cfg).norm_sqr())
            .collect();
        let p: f64 = prev.iter().zip(&a).map(|(w, a)| w * a).sum();
        assert!((it.success_probability - p).abs() < 1e-10);
        for j in 0..prev.len() {
            let expect = prev[j] * a[j] / p;
            assert!((it.weights[j] - expect).abs() < 1e-8, "level {j}");
        }
        prev = it.weights.clone();
    }
}

#[test]
fn tfim2_refinement_from_default_preparation() {
    let h = transverse_field_ising(J, 1.0, 2).unwrap();
    let psi = prepare(&h, 36.0);
    let report = refine_iteratively(&psi, &h, 2, 5, 1e-4).unwrap();
    assert!(report.initial_fidelity >= 0.9);
    assert_eq!(report.status, RefinementStatus::TargetReached);
    assert!(report.iterations.last().unwrap().fidelity_to_ground >= 0.9999);
    assert_oracle_ratios(&report, 2);

    // Reference infidelities from an independent closed-form iteration.
    let full = refine_iteratively(&psi, &h, 2, 5, 0.0).unwrap();
    let reference = [7.48e-4, 2.57e-4, 8.85e-5, 3.04e-5, 1.04e-5];
    for (it, r) in full.iterations.iter().zip(reference) {
        assert!((it.excited_weight - r).abs() < 0.01 * r, "{} vs {r}", it.excited_weight);
    }
}

#[test]
fn tfim2_refinement_from_rough_preparation() {
    let h = transverse_field_ising(J, 1.0, 2).unwrap();
    let psi = prepare(&h, 8.0);
    let report = refine_iteratively(&psi, &h, 3, 5, 1e-4).unwrap();
    assert!((report.initial_fidelity - 0.90745).abs() < 1e-4);
    assert_eq!(report.status, RefinementStatus::TargetReached);
    assert_oracle_ratios(&report, 3);
}

#[test]
fn success_probability_matches_eigen_formula() {
    let h = transverse_field_ising(J, 1.0, 2).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    let psi = prepare(&h, 8.0);
    for theta in [-3.0, -1.2, 0.4, 2.5] {
        let cfg = FilterConfig::new(2, theta).unwrap();
        let out = apply_filter(&psi, &h, &cfg, true).unwrap();
        let predicted = predicted_success_probability(&psi, &sp, &cfg).unwrap();
        assert!((out.success_probability - predicted).abs() < 1e-10);
    }
}

#[test]
fn random_triples_match_closed_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..200 {
        let e: f64 = rng.random_range(-3.0..3.0);
        let theta: f64 = rng.random_range(-6.0..6.0);
        let m = rng.random_range(1..=3);
        // One-qubit Hamiltonian e·(cos φ Z + sin φ X) has eigenvalues ±e.
        let phi: f64 = rng.random_range(0.0..PI);
        let h = PauliSum::new(1, [(e * phi.cos(), "Z".parse().unwrap()), (e * phi.sin(), "X".parse().unwrap())])
            .unwrap();
        let sp = exact_diagonalize(&h).unwrap();
        let cfg = FilterConfig::new(m, theta).unwrap();
        let full = filter_circuit_matrix(&h, &cfg).unwrap();
        for j in 0..2 {
            let v = sp.eigenstate(j);
            let image = full.matvec(&StateVector::zero_state(m).unwrap().tensor(&v).into_amplitudes());
            let amp: Complex64 = v.amplitudes().iter().zip(&image[..2]).map(|(a, b)| a.conj() * b).sum();
            let closed = filter_amplitude(sp.eigenvalues()[j], theta, &cfg);
            assert!((amp - closed).norm() < 1e-10);
        }
    }
}

#[test]
fn resonant_gate_is_identity_on_ground_state() {
    let h = transverse_field_ising(J, 1.0, 2).unwrap();
    let sp = exact_diagonalize(&h).unwrap();
    let theta = choose_theta(sp.ground_energy()).unwrap();
    let mut joint = StateVector::zero_state(1).unwrap().tensor(&sp.ground_state());
    joint.apply_gate(&GateMatrix::hadamard(), &[0]).unwrap();
    for k in 1..=4 {
        let out = controlled_u_power(&joint, 0, &h, theta, k).unwrap();
        assert!((out.fidelity(&joint).unwrap() - 1.0).abs() < 1e-12);
    }
}
