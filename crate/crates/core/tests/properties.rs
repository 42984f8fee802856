use num_complex::Complex64;
use proptest::prelude::*;
use vacuum_core::filter::{apply_filter, filter_amplitude, FilterConfig};
use vacuum_core::linalg::Matrix;
use vacuum_core::{
    estimator::decompose_expectation, evolution_unitary, exact_diagonalize, interpolate, BitString, GateMatrix,
    Pauli, PauliString, PauliSum, StateVector,
};

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| Complex64::new(a, b)), len)
}

fn random_state(n: usize) -> impl Strategy<Value = StateVector> {
    complex_vec(1 << n)
        .prop_filter("nonzero", |v| v.iter().map(|c| c.norm_sqr()).sum::<f64>() > 1e-3)
        .prop_map(|v| StateVector::normalized(v).unwrap())
}

/// Random unitary on `arity` qubits as exp(-i H) for a random Hermitian H.
fn random_unitary(arity: usize) -> impl Strategy<Value = GateMatrix> {
    let d = 1 << arity;
    complex_vec(d * d).prop_map(move |v| {
        let a = Matrix::from_fn(d, d, |i, j| v[i * d + j]);
        let h = a.add(&a.adjoint());
        let eig = vacuum_core::linalg::hermitian_eigen(&h).unwrap();
        let phases: Vec<Complex64> = eig.values.iter().map(|&l| Complex64::from_polar(1.0, -l)).collect();
        let u = eig.vectors.matmul(&Matrix::diagonal(&phases)).matmul(&eig.vectors.adjoint());
        GateMatrix::new(u).unwrap()
    })
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)], n)
        .prop_map(PauliString::new)
}

fn pauli_sum(n: usize) -> impl Strategy<Value = PauliSum> {
    prop::collection::vec((-1.5f64..1.5, pauli_string(n)), 1..6).prop_map(move |terms| PauliSum::new(n, terms).unwrap())
}

/// Dense operator of `gate` on `targets` within an n-qubit register, built
/// by permuting basis indices (independent of the gather kernel).
fn dense_embedding(n: usize, gate: &GateMatrix, targets: &[usize]) -> Matrix {
    let dim = 1 << n;
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    Matrix::from_fn(dim, dim, |row, col| {
        for q in 0..n {
            if !targets.contains(&q) && bit(row, q) != bit(col, q) {
                return Complex64::new(0.0, 0.0);
            }
        }
        let sub = |x: usize| targets.iter().fold(0, |acc, &q| (acc << 1) | bit(x, q));
        gate.matrix()[(sub(row), sub(col))]
    })
}

fn kron_chain(factors: &[Matrix]) -> Matrix {
    factors[1..].iter().fold(factors[0].clone(), |acc, m| acc.kron(m))
}

fn vec_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn single_qubit_gate_matches_kron(state in random_state(3), u in random_unitary(1), q in 0usize..3) {
        let mut factors = vec![Matrix::identity(2); 3];
        factors[q] = u.matrix().clone();
        let expect = kron_chain(&factors).matvec(state.amplitudes());
        let mut got = state.clone();
        got.apply_gate(&u, &[q]).unwrap();
        prop_assert!(vec_diff(got.amplitudes(), &expect) < 1e-12);
    }

    #[test]
    fn two_qubit_gate_matches_dense(state in random_state(3), u in random_unitary(2), a in 0usize..3, b in 0usize..3) {
        prop_assume!(a != b);
        let expect = dense_embedding(3, &u, &[a, b]).matvec(state.amplitudes());
        let mut got = state.clone();
        got.apply_gate(&u, &[a, b]).unwrap();
        prop_assert!(vec_diff(got.amplitudes(), &expect) < 1e-12);
        // Adjacent ascending targets are a plain Kronecker product.
        if b == a + 1 {
            let dense = if a == 0 { u.matrix().kron(&Matrix::identity(2)) } else { Matrix::identity(2).kron(u.matrix()) };
            prop_assert!(vec_diff(got.amplitudes(), &dense.matvec(state.amplitudes())) < 1e-12);
        }
    }

    #[test]
    fn controlled_gate_matches_projector_form(state in random_state(3), u in random_unitary(1), c in 0usize..3, t in 0usize..3) {
        prop_assume!(c != t);
        let p0 = Matrix::diagonal(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let p1 = Matrix::diagonal(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let mut off = vec![Matrix::identity(2); 3];
        off[c] = p0;
        let mut on = vec![Matrix::identity(2); 3];
        on[c] = p1;
        on[t] = u.matrix().clone();
        let dense = kron_chain(&off).add(&kron_chain(&on));
        let mut got = state.clone();
        got.apply_controlled(&[c], &u, &[t]).unwrap();
        prop_assert!(vec_diff(got.amplitudes(), &dense.matvec(state.amplitudes())) < 1e-12);
    }

    #[test]
    fn gate_sequences_preserve_norm(state in random_state(3), gates in prop::collection::vec((random_unitary(1), 0usize..3, 0usize..3), 1..20)) {
        let mut s = state;
        for (u, q, c) in gates {
            if q == c {
                s.apply_gate(&u, &[q]).unwrap();
            } else {
                s.apply_controlled(&[c], &u, &[q]).unwrap();
            }
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn postselect_probabilities_sum_to_one(state in random_state(3), mask in 1usize..7) {
        let qubits: Vec<usize> = (0..3).filter(|q| mask >> q & 1 == 1).collect();
        let k = qubits.len();
        let mut total = 0.0;
        for outcome in 0..(1 << k) {
            match state.postselect(&qubits, &BitString::from_index(outcome, k)) {
                Ok((p, _)) => total += p,
                Err(vacuum_core::Error::ImpossibleOutcome { probability, .. }) => total += probability,
                Err(e) => panic!("{e}"),
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn interpolate_is_affine(h0 in pauli_sum(2), h1 in pauli_sum(2), s in 0.0f64..1.0) {
        let m = interpolate(&h0, &h1, s).unwrap().to_matrix().unwrap();
        let expect = h0.to_matrix().unwrap().scale(Complex64::new(1.0 - s, 0.0))
            .add(&h1.to_matrix().unwrap().scale(Complex64::new(s, 0.0)));
        prop_assert!(m.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn diagonalization_reconstructs(h in pauli_sum(3)) {
        let sp = exact_diagonalize(&h).unwrap();
        let rebuilt = sp.function(|l| Complex64::new(l, 0.0));
        prop_assert!(rebuilt.max_abs_diff(&h.to_matrix().unwrap()) < 1e-10);
    }

    #[test]
    fn evolution_group_property(h in pauli_sum(2), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let u1 = evolution_unitary(&h, t1).unwrap();
        let u2 = evolution_unitary(&h, t2).unwrap();
        let u12 = evolution_unitary(&h, t1 + t2).unwrap();
        prop_assert!(u1.matrix().matmul(u2.matrix()).max_abs_diff(u12.matrix()) < 1e-10);
    }

    #[test]
    fn expectation_decomposes(state in random_state(2), h in pauli_sum(2), obs in pauli_sum(2)) {
        let sp = exact_diagonalize(&h).unwrap();
        let (diag, cross) = decompose_expectation(&state, &sp, &obs).unwrap();
        prop_assert!((diag + cross - state.expectation(&obs).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn filter_amplitude_bounded(e in -10.0f64..10.0, theta in -10.0f64..10.0, m in 1usize..4) {
        let cfg = FilterConfig::new(m, theta).unwrap();
        prop_assert!(filter_amplitude(e, theta, &cfg).norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn resonance_passes(e in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0], m in 1usize..4) {
        let theta = std::f64::consts::PI / e;
        let cfg = FilterConfig::new(m, theta).unwrap();
        prop_assert!((filter_amplitude(e, theta, &cfg) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn circuit_matches_closed_form(h in pauli_sum(2), theta in -4.0f64..4.0, m in 1usize..4, j in 0usize..4) {
        let sp = exact_diagonalize(&h).unwrap();
        let cfg = FilterConfig::new(m, theta).unwrap();
        let e = sp.eigenvalues()[j];
        let a = filter_amplitude(e, theta, &cfg);
        prop_assume!(a.norm_sqr() > 1e-10);
        let out = apply_filter(&sp.eigenstate(j), &h, &cfg, true).unwrap();
        prop_assert!((out.success_probability - a.norm_sqr()).abs() < 1e-10);
        prop_assert!((out.refined_state.fidelity(&sp.eigenstate(j)).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn success_probability_matches_eigenbasis(state in random_state(2), h in pauli_sum(2), theta in -4.0f64..4.0) {
        let sp = exact_diagonalize(&h).unwrap();
        let cfg = FilterConfig::new(2, theta).unwrap();
        let predicted = vacuum_core::filter::predicted_success_probability(&state, &sp, &cfg).unwrap();
        match apply_filter(&state, &h, &cfg, false) {
            Ok(out) => prop_assert!((out.success_probability - predicted).abs() < 1e-10),
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn sampling_total_variation_bound() {
    let amps: Vec<Complex64> = (0..8).map(|i| Complex64::new(1.0 + i as f64, 0.5 * i as f64)).collect();
    let state = StateVector::normalized(amps).unwrap();
    for (qubits, shots) in [(vec![0usize], 2_000u64), (vec![0, 2], 10_000), (vec![0, 1, 2], 100_000)] {
        let k = qubits.len();
        let born = state.marginal_probabilities(&qubits).unwrap();
        let hist = state.measure_sample(&qubits, shots, 99).unwrap();
        assert_eq!(hist.values().sum::<u64>(), shots);
        let tv: f64 = 0.5
            * (0..1 << k)
                .map(|x| {
                    let n = hist.get(&BitString::from_index(x, k)).copied().unwrap_or(0);
                    (n as f64 / shots as f64 - born[x]).abs()
                })
                .sum::<f64>();
        let bound = 5.0 * ((1 << k) as f64 / shots as f64).sqrt();
        assert!(tv <= bound, "k={k} tv={tv} bound={bound}");
    }
}
