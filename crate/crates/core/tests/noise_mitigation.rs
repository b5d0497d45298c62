mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vqe_core::circuit::{run, sample_histogram};
use vqe_core::noise::*;
use vqe_core::pauli::{penalty_operator, PenaltyForm};
use vqe_core::resources::lower_to_basis;
use vqe_core::vqe::{cost, ExecutionMode};
use vqe_core::{AnsatzFamily, AnsatzSpec, Circuit, Gate, Statevector, VqeError};

fn confusion_matrix(e: &ReadoutError) -> DMatrix<f64> {
    let c = e.confusion();
    DMatrix::from_row_slice(2, 2, &[c[0][0], c[0][1], c[1][0], c[1][1]])
}

fn random_dist(seed: u64, n: usize) -> Vec<f64> {
    let psi = random_state(&mut rng(seed), n);
    psi.probabilities()
}

#[test]
fn noiseless_density_matches_statevector() {
    let spec = AnsatzSpec::new(AnsatzFamily::Uccsd, 4, 2);
    let c = spec.build().unwrap();
    let x = [0.3, -0.1, 0.8];
    let rho = noisy_evolve(&c, &x, &NoiseModel::noiseless()).unwrap();
    let psi = run(&c, &x, &Statevector::zero_state(4)).unwrap();
    let v = DVector::from_column_slice(psi.amplitudes());
    let pure = &v * v.adjoint();
    assert!(max_abs_diff(&rho.to_matrix(), &pure) < 1e-12);
}

#[test]
fn full_depolarization_after_x() {
    let mut c = Circuit::new(1, 0);
    c.push(Gate::x(0)).unwrap();
    let noise = NoiseModel {
        p1: 1.0,
        ..NoiseModel::noiseless()
    };
    let rho = noisy_evolve(&c, &[], &noise).unwrap().to_matrix();
    let half = DMatrix::identity(2, 2) * num_complex::Complex64::new(0.5, 0.0);
    assert!(max_abs_diff(&rho, &half) < 1e-15);
}

#[test]
fn two_qubit_readout_matches_confusion_product() {
    let errors = [
        ReadoutError {
            p01: 0.03,
            p10: 0.07,
        },
        ReadoutError {
            p01: 0.11,
            p10: 0.02,
        },
    ];
    let dist = random_dist(1, 2);
    // qubit 1 is the more significant index bit
    let m = confusion_matrix(&errors[1]).kronecker(&confusion_matrix(&errors[0]));
    let expected = m * DVector::from_column_slice(&dist);
    let got = apply_readout_error(&dist, &errors).unwrap();
    for (a, b) in got.iter().zip(expected.iter()) {
        assert!((a - b).abs() < 1e-15);
    }
}

#[test]
fn readout_limits() {
    let dist = random_dist(2, 3);
    assert_eq!(
        apply_readout_error(&dist, &[ReadoutError::NONE; 3]).unwrap(),
        dist
    );
    let mixed = apply_readout_error(&[1.0, 0.0], &[ReadoutError::symmetric(0.5)]).unwrap();
    assert_eq!(mixed, vec![0.5, 0.5]);
    let same = mitigate_readout(&dist, &[ReadoutError::NONE; 3]).unwrap();
    assert!(same.iter().zip(&dist).all(|(a, b)| (a - b).abs() < 1e-15));
}

#[test]
fn singular_confusion_is_numerical_error() {
    let err = mitigate_readout(&[0.5, 0.5], &[ReadoutError { p01: 0.4, p10: 0.6 }]);
    assert!(matches!(err, Err(VqeError::Numerical { .. })));
}

#[test]
fn finite_shot_mitigation_reduces_bias() {
    let truth = [0.8, 0.2];
    let z_true = truth[0] - truth[1];
    let errors = [ReadoutError::symmetric(0.02)];
    let noisy = apply_readout_error(&truth, &errors).unwrap();
    let mut improved = 0;
    for seed in 0..10 {
        let hist = sample_histogram(&noisy, 100_000, &mut ChaCha8Rng::seed_from_u64(seed));
        let empirical: Vec<f64> = hist.iter().map(|&k| k as f64 / 1e5).collect();
        let fixed = mitigate_readout(&empirical, &errors).unwrap();
        let raw_bias = (empirical[0] - empirical[1] - z_true).abs();
        let fixed_bias = (fixed[0] - fixed[1] - z_true).abs();
        improved += usize::from(fixed_bias < raw_bias);
    }
    assert!(improved >= 9, "{improved}/10");
}

#[test]
fn calibration_recovers_model_rates() {
    let errors = vec![
        ReadoutError {
            p01: 0.02,
            p10: 0.05,
        },
        ReadoutError {
            p01: 0.01,
            p10: 0.03,
        },
    ];
    let mut r = ChaCha8Rng::seed_from_u64(5);
    let runs: Vec<(usize, Vec<u64>)> = [0b00, 0b11]
        .iter()
        .map(|&b| {
            let mut ideal = vec![0.0; 4];
            ideal[b] = 1.0;
            let noisy = apply_readout_error(&ideal, &errors).unwrap();
            (b, sample_histogram(&noisy, 400_000, &mut r))
        })
        .collect();
    let est = calibrate_readout(2, &runs).unwrap();
    for (e, t) in est.iter().zip(&errors) {
        assert!((e.p01 - t.p01).abs() < 2e-3 && (e.p10 - t.p10).abs() < 2e-3);
    }
}

#[test]
fn noisy_error_grows_with_entangling_gates() {
    let h = h2();
    let pen = penalty_operator(PenaltyForm::Squared, 4, 2).unwrap();
    let noise = NoiseModel::default();
    let exact_e = vqe_core::hamiltonian::hf_energy(&h.qubit_hamiltonian, 2).unwrap();
    // identical (zero) parameters: both circuits prepare the HF state, only the noise differs
    let mut mean_err = Vec::new();
    for family in [AnsatzFamily::Givens, AnsatzFamily::Uccsd] {
        let c = AnsatzSpec::new(family, 4, 2).build().unwrap();
        let x = vec![0.0; c.n_parameters()];
        let errs: Vec<f64> = (0..5)
            .map(|seed| {
                let mode = ExecutionMode::Noisy {
                    noise: noise.clone(),
                    shots: 256_000,
                    seed,
                    mitigate_readout: true,
                };
                (cost(&x, &h.qubit_hamiltonian, &pen, 0.0, &c, &mode)
                    .unwrap()
                    .energy
                    - exact_e)
                    .abs()
            })
            .collect();
        mean_err.push(errs.iter().sum::<f64>() / 5.0);
    }
    assert!(mean_err[0] < mean_err[1], "{mean_err:?}");

    // padding with CNOT pairs leaves the unitary alone but adds noise
    let base =
        lower_to_basis(&AnsatzSpec::new(AnsatzFamily::Givens, 4, 2).build().unwrap()).unwrap();
    let mut last = 0.0;
    for pairs in 0..4 {
        let mut c = base.clone();
        for _ in 0..pairs {
            c.push(Gate::cnot(0, 1)).unwrap();
            c.push(Gate::cnot(0, 1)).unwrap();
        }
        let e = noisy_evolve(&c, &[0.2, -0.1], &noise)
            .unwrap()
            .expectation(&h.qubit_hamiltonian)
            .unwrap();
        let pure = run(&base, &[0.2, -0.1], &Statevector::zero_state(4))
            .unwrap()
            .expectation(&h.qubit_hamiltonian)
            .unwrap();
        let err = (e - pure).abs();
        assert!(err > last);
        last = err;
    }
}

proptest! {
    #[test]
    fn exact_model_mitigation_inverts_readout(seed in any::<u64>(), n in 1usize..5, p01 in 0.0..0.3f64, p10 in 0.0..0.3f64) {
        let dist = random_dist(seed, n);
        let errors: Vec<ReadoutError> = (0..n).map(|q| ReadoutError { p01: p01 / (q + 1) as f64, p10 }).collect();
        let noisy = apply_readout_error(&dist, &errors).unwrap();
        prop_assert!((noisy.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let back = mitigate_readout(&noisy, &errors).unwrap();
        for (a, b) in back.iter().zip(&dist) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }
}
