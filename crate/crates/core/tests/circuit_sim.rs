mod common;

use std::f64::consts::PI;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::Rng;

use vqe_core::circuit::{hop_decomposition, kind_matrix, run, rxxyy_decomposition};
use vqe_core::noise::{noisy_evolve, NoiseModel};
use vqe_core::pauli::particle_number_operator;
use vqe_core::{Angle, Circuit, Gate, GateKind, Statevector};

const KINDS: [GateKind; 8] = [
    GateKind::X,
    GateKind::H,
    GateKind::SX,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::Cnot,
    GateKind::Rxxyy,
    GateKind::Hop,
];

fn random_gate(r: &mut impl Rng, n: usize) -> Gate {
    let kind = KINDS[r.random_range(0..KINDS.len())];
    let a = r.random_range(0..n);
    let mut b = r.random_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    let angle = kind
        .is_parametric()
        .then(|| Angle::Fixed(r.random_range(-PI..PI)));
    let targets: Vec<usize> = if kind.arity() == 2 {
        vec![a, b]
    } else {
        vec![a]
    };
    Gate::new(kind, &targets, angle).unwrap()
}

fn random_circuit(r: &mut impl Rng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n, 0);
    for _ in 0..len {
        c.push(random_gate(r, n)).unwrap();
    }
    c
}

fn composed(gates: &[Gate], n: usize, params: &[f64]) -> DMatrix<C> {
    let mut c = Circuit::new(n, params.len());
    c.extend(gates.iter().cloned()).unwrap();
    circuit_dense(&c, params)
}

#[test]
fn every_gate_is_unitary() {
    let mut r = rng(1);
    for kind in KINDS {
        for _ in 0..100 {
            let angle = kind.is_parametric().then(|| r.random_range(-10.0..10.0));
            let u = local_dense(&kind_matrix(kind, angle).unwrap());
            let id = DMatrix::<C>::identity(u.nrows(), u.nrows());
            assert!(max_abs_diff(&(u.adjoint() * &u), &id) < 1e-12, "{kind:?}");
        }
    }
}

#[test]
fn hop_matrix_at_zero_and_ry_at_pi() {
    let hop = local_dense(&kind_matrix(GateKind::Hop, Some(0.0)).unwrap());
    let diag: Vec<f64> = (0..4).map(|i| hop[(i, i)].re).collect();
    assert_eq!(diag, vec![1.0, 1.0, 1.0, -1.0]);
    let ry = local_dense(&kind_matrix(GateKind::Ry, Some(PI)).unwrap());
    assert!(
        (ry[(0, 1)] - C::new(-1.0, 0.0)).norm() < 1e-15
            && (ry[(1, 0)] - C::new(1.0, 0.0)).norm() < 1e-15
    );
}

#[test]
fn rxxyy_leaves_00_and_11_alone() {
    let mut r = rng(2);
    for _ in 0..20 {
        let theta = r.random_range(-PI..PI);
        for b in [0b00, 0b11] {
            let mut psi = Statevector::basis_state(2, b);
            psi.apply_gate(&Gate::rxxyy(0, 1, Angle::Fixed(theta)), &[])
                .unwrap();
            assert!((psi.amplitudes()[b] - C::new(1.0, 0.0)).norm() < 1e-14);
        }
    }
}

#[test]
fn hop_decomposition_is_exact_on_a_grid() {
    for k in 0..50 {
        let theta = -PI + 2.0 * PI * k as f64 / 49.0;
        let target = local_dense(&kind_matrix(GateKind::Hop, Some(theta)).unwrap());
        let built = composed(&hop_decomposition(0, 1, Angle::param(0)), 2, &[theta]);
        assert!(distance_up_to_phase(&built, &target) < 1e-10, "θ = {theta}");
    }
    let cnots = hop_decomposition(0, 1, Angle::param(0))
        .iter()
        .filter(|g| g.kind == GateKind::Cnot)
        .count();
    assert_eq!(cnots, 3);
}

/// `tr(U σyσy Uᵀ σyσy)` for `U` scaled into SU(4). A two-qubit gate needs at most two
/// CNOTs exactly when this trace is real.
fn two_cnot_invariant(u: &DMatrix<C>) -> C {
    let det = u.determinant();
    let u = u * det.powf(-0.25);
    let y = single(vqe_core::pauli::Pauli::Y);
    let yy = kron(&y, &y);
    (&u * &yy * u.transpose() * &yy).trace()
}

#[test]
fn hop_needs_three_cnots() {
    for theta in [0.3, 1.0, 2.2] {
        let hop = local_dense(&kind_matrix(GateKind::Hop, Some(theta)).unwrap());
        assert!(two_cnot_invariant(&hop).im.abs() > 0.1, "θ = {theta}");
        let xy = local_dense(&kind_matrix(GateKind::Rxxyy, Some(theta)).unwrap());
        assert!(two_cnot_invariant(&xy).im.abs() < 1e-12);
    }
}

#[test]
fn rxxyy_decomposition_is_exact() {
    let mut r = rng(3);
    for _ in 0..50 {
        let theta = r.random_range(-PI..PI);
        let target = local_dense(&kind_matrix(GateKind::Rxxyy, Some(theta)).unwrap());
        let built = composed(&rxxyy_decomposition(0, 1, Angle::param(0)), 2, &[theta]);
        assert!(distance_up_to_phase(&built, &target) < 1e-10);
    }
}

#[test]
fn hop_on_single_excitation() {
    let theta = 0.7;
    let mut psi = Statevector::basis_state(2, 0b01);
    psi.apply_gate(&Gate::hop(0, 1, Angle::Fixed(theta)), &[])
        .unwrap();
    let a = psi.amplitudes();
    assert!((a[0b01] - C::new(theta.cos(), 0.0)).norm() < 1e-15);
    assert!((a[0b10] - C::new(-theta.sin(), 0.0)).norm() < 1e-15);
}

#[test]
fn shared_parameter_binds_both_gates() {
    let mut c = Circuit::new(4, 1);
    c.push(Gate::x(0)).unwrap();
    c.push(Gate::x(2)).unwrap();
    c.push(Gate::hop(0, 1, Angle::param(0))).unwrap();
    c.push(Gate::hop(2, 3, Angle::param(0))).unwrap();
    let mut manual = Circuit::new(4, 0);
    manual.push(Gate::x(0)).unwrap();
    manual.push(Gate::x(2)).unwrap();
    manual.push(Gate::hop(0, 1, Angle::Fixed(0.4))).unwrap();
    manual.push(Gate::hop(2, 3, Angle::Fixed(0.4))).unwrap();
    let zero = Statevector::zero_state(4);
    let a = run(&c, &[0.4], &zero).unwrap();
    let b = run(&manual, &[], &zero).unwrap();
    assert_eq!(a.amplitudes(), b.amplitudes());
}

#[test]
fn norm_survives_ten_thousand_gates() {
    let mut r = rng(4);
    let mut psi = random_state(&mut r, 4);
    for _ in 0..10_000 {
        psi.apply_gate(&random_gate(&mut r, 4), &[]).unwrap();
    }
    assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn purity_never_increases_along_a_circuit() {
    let mut r = rng(5);
    let noise = NoiseModel {
        p1: 0.02,
        p2: 0.05,
        ..NoiseModel::default()
    };
    let c = random_circuit(&mut r, 3, 30);
    let mut last = f64::INFINITY;
    for k in 0..=c.len() {
        let mut prefix = Circuit::new(3, 0);
        prefix.extend(c.gates()[..k].iter().cloned()).unwrap();
        let purity = noisy_evolve(&prefix, &[], &noise).unwrap().purity();
        assert!(purity <= last + 1e-12);
        last = purity;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn run_equals_dense_product(seed in any::<u64>(), n in 1usize..=4, len in 0usize..25) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, n.max(2), len);
        let psi0 = random_state(&mut r, c.n_qubits());
        let out = run(&c, &[], &psi0).unwrap();
        let dense = circuit_dense(&c, &[]);
        let v = DMatrix::from_column_slice(psi0.amplitudes().len(), 1, psi0.amplitudes());
        let expected = dense * v;
        for (a, b) in out.amplitudes().iter().zip(expected.iter()) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn exchange_gates_conserve_particle_number(seed in any::<u64>(), theta in -PI..PI) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, 4);
        let number = particle_number_operator(4);
        let before = psi.expectation(&number).unwrap();
        for g in [Gate::hop(1, 3, Angle::Fixed(theta)), Gate::rxxyy(2, 0, Angle::Fixed(theta))] {
            let mut out = psi.clone();
            out.apply_gate(&g, &[]).unwrap();
            prop_assert!((out.expectation(&number).unwrap() - before).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_matches_quadratic_form(seed in any::<u64>()) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, 4);
        let terms = random_hermitian_fermion_terms(&mut r, 2);
        let h = vqe_core::pauli::jordan_wigner(&terms, 4).unwrap();
        let v = DMatrix::from_column_slice(16, 1, psi.amplitudes());
        let quad = (v.adjoint() * sum_dense(&h) * &v)[(0, 0)];
        prop_assert!((psi.expectation(&h).unwrap() - quad.re).abs() < 1e-10);
    }

    #[test]
    fn noisy_evolution_gives_valid_density_matrices(seed in any::<u64>(), p1 in 0.0..0.3f64, p2 in 0.0..0.5f64) {
        let mut r = rng(seed);
        let c = random_circuit(&mut r, 3, 20);
        let noise = NoiseModel { p1, p2, ..NoiseModel::default() };
        let rho = noisy_evolve(&c, &[], &noise).unwrap().to_matrix();
        prop_assert!(max_abs_diff(&rho, &rho.adjoint()) < 1e-10);
        prop_assert!((rho.trace() - C::new(1.0, 0.0)).norm() < 1e-10);
        let herm = (&rho + rho.adjoint()) * C::new(0.5, 0.0);
        let eig = nalgebra::linalg::SymmetricEigen::new(herm);
        prop_assert!(eig.eigenvalues.iter().all(|&e| e > -1e-9));
    }

    #[test]
    fn sampling_is_deterministic_per_seed(seed in any::<u64>(), shots in 1u64..5000) {
        let mut r = rng(seed);
        let psi = random_state(&mut r, 3);
        let a = psi.sample_counts(shots, seed);
        prop_assert_eq!(&a, &psi.sample_counts(shots, seed));
        prop_assert_eq!(a.values().sum::<u64>(), shots);
    }
}
