mod common;

use common::*;
use proptest::prelude::*;

use vqe_core::circuit::run;
use vqe_core::hamiltonian::{casci_ground_state, hf_energy};
use vqe_core::pauli::{penalty_operator, PauliString, PauliSum, PauliTerm, PenaltyForm};
use vqe_core::scan::default_config;
use vqe_core::vqe::*;
use vqe_core::{Angle, AnsatzFamily, AnsatzSpec, Circuit, Gate, Statevector, VqeError};

fn penalty() -> PauliSum {
    penalty_operator(PenaltyForm::Squared, 4, 2).unwrap()
}

fn casci() -> f64 {
    casci_ground_state(&h2().qubit_hamiltonian, 2)
        .unwrap()
        .energy
}

fn exact(family: AnsatzFamily) -> VqeConfig {
    default_config(family, 4, 2, ExecutionMode::Exact)
}

fn central_difference(f: &mut CostFunction, x: &[f64], k: usize) -> f64 {
    let h = 1e-5;
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[k] += h;
    minus[k] -= h;
    (f.evaluate(&plus).unwrap().total - f.evaluate(&minus).unwrap().total) / (2.0 * h)
}

#[test]
fn ry_gradient_follows_cosine() {
    let mut c = Circuit::new(1, 1);
    c.push(Gate::ry(0, Angle::param(0))).unwrap();
    let z = PauliSum::from_terms(
        1,
        [PauliTerm::new(1.0, "Z".parse::<PauliString>().unwrap())],
    )
    .unwrap();
    assert!(parameter_shift_gradient(&[0.0], &z, &c).unwrap()[0].abs() < 1e-15);
    assert!(
        (parameter_shift_gradient(&[std::f64::consts::FRAC_PI_2], &z, &c).unwrap()[0] + 1.0).abs()
            < 1e-12
    );
    assert!(parameter_shift_gradient(&[], &z, &Circuit::new(1, 0))
        .unwrap()
        .is_empty());
}

#[test]
fn givens_at_zero_is_hartree_fock() {
    let h = h2();
    let c = AnsatzSpec::new(AnsatzFamily::Givens, 4, 2).build().unwrap();
    let v = cost(
        &[0.0, 0.0],
        &h.qubit_hamiltonian,
        &penalty(),
        1e5,
        &c,
        &ExecutionMode::Exact,
    )
    .unwrap();
    assert!((v.energy - hf_energy(&h.qubit_hamiltonian, 2).unwrap()).abs() < 1e-12);
    assert_eq!(v.penalty, 0.0);
}

#[test]
fn zero_weight_is_plain_energy() {
    let h = h2();
    let c = AnsatzSpec::new(AnsatzFamily::RyRz, 4, 2).build().unwrap();
    let x = random_params(&mut rng(3), c.n_parameters());
    let v = cost(
        &x,
        &h.qubit_hamiltonian,
        &penalty(),
        0.0,
        &c,
        &ExecutionMode::Exact,
    )
    .unwrap();
    let psi = run(&c, &x, &Statevector::zero_state(4)).unwrap();
    assert!((v.total - psi.expectation(&h.qubit_hamiltonian).unwrap()).abs() < 1e-12);
}

/// Union of strings in plan order, grouped the same way the sampler groups them.
fn sampling_sigma(psi: &Statevector, h: &PauliSum, pen: &PauliSum, shots: u64) -> f64 {
    let mut strings: Vec<PauliString> = Vec::new();
    for sum in [h, pen] {
        for t in sum.terms() {
            if !t.string.is_identity() && !strings.contains(&t.string) {
                strings.push(t.string);
            }
        }
    }
    let coef = |s: &PauliString| {
        h.terms()
            .iter()
            .find(|t| t.string == *s)
            .map_or(0.0, |t| t.coefficient.re)
    };
    let groups = qwc_groups(&strings);
    let per_group = (shots / groups.len() as u64) as f64;
    groups
        .iter()
        .map(|g| {
            let o = PauliSum::from_terms(
                4,
                g.iter()
                    .map(|&i| PauliTerm::new(coef(&strings[i]), strings[i])),
            )
            .unwrap();
            let mean = psi.expectation(&o).unwrap();
            (psi.expectation(&(&o * &o)).unwrap() - mean * mean) / per_group
        })
        .sum::<f64>()
        .sqrt()
}

#[test]
fn sampled_estimate_within_five_sigma() {
    let h = h2();
    let pen = penalty();
    let c = AnsatzSpec::new(AnsatzFamily::Uccsd, 4, 2).build().unwrap();
    let x = [0.1, -0.2, 0.3];
    let psi = run(&c, &x, &Statevector::zero_state(4)).unwrap();
    let exact_e = psi.expectation(&h.qubit_hamiltonian).unwrap();
    let sigma = sampling_sigma(&psi, &h.qubit_hamiltonian, &pen, 256_000);
    assert!(sigma > 0.0);
    for seed in 0..5 {
        let mode = ExecutionMode::Sampled {
            shots: 256_000,
            seed,
        };
        let v = cost(&x, &h.qubit_hamiltonian, &pen, 0.0, &c, &mode).unwrap();
        assert!(
            (v.energy - exact_e).abs() < 5.0 * sigma,
            "seed {seed}: {} vs {exact_e} (σ {sigma})",
            v.energy
        );
    }
}

#[test]
fn every_family_reaches_chemical_accuracy() {
    let e0 = casci();
    for family in AnsatzFamily::ALL {
        let trace = minimize(&exact(family), &h2().qubit_hamiltonian, &penalty()).unwrap();
        assert!(
            trace.final_energy >= e0 - 1e-9,
            "{family}: variational bound"
        );
        assert!(
            (trace.final_energy - e0).abs() <= CHEMICAL_ACCURACY,
            "{family}"
        );
    }
}

#[test]
fn ryrz_optimum_is_in_the_sector() {
    let trace = minimize(
        &exact(AnsatzFamily::RyRz),
        &h2().qubit_hamiltonian,
        &penalty(),
    )
    .unwrap();
    assert!(trace.final_penalty < 1e-6);
    let c = AnsatzSpec::new(AnsatzFamily::RyRz, 4, 2)
        .with_repetitions(3)
        .build()
        .unwrap();
    let psi = run(&c, &trace.final_parameters, &Statevector::zero_state(4)).unwrap();
    let number = vqe_core::pauli::particle_number_operator(4);
    assert!((psi.expectation(&number).unwrap() - 2.0).abs() < 1e-3);
}

#[test]
fn uccsd_first_record_is_hartree_fock() {
    let h = h2();
    let trace = minimize(
        &exact(AnsatzFamily::Uccsd),
        &h.qubit_hamiltonian,
        &penalty(),
    )
    .unwrap();
    assert!((trace.records[0].energy - hf_energy(&h.qubit_hamiltonian, 2).unwrap()).abs() < 1e-12);
}

#[test]
fn conserving_families_never_pay_penalty() {
    for family in [
        AnsatzFamily::SwapRz,
        AnsatzFamily::Uccsd,
        AnsatzFamily::Givens,
    ] {
        for mu in [0.0, 10.0] {
            let mut config = exact(family);
            config.mu = mu;
            let trace = minimize(&config, &h2().qubit_hamiltonian, &penalty()).unwrap();
            assert!(
                trace.records.iter().all(|r| r.penalty.abs() < 1e-10),
                "{family} μ={mu}"
            );
        }
    }
}

#[test]
fn accepted_exact_steps_never_increase_cost() {
    for family in AnsatzFamily::ALL {
        for optimizer in [OptimizerKind::QuasiNewton, OptimizerKind::Simplex] {
            let mut config = exact(family);
            config.optimizer = optimizer;
            config.max_evaluations = 1500;
            let trace = minimize(&config, &h2().qubit_hamiltonian, &penalty()).unwrap();
            let accepted: Vec<f64> = trace.accepted().map(|r| r.cost).collect();
            assert!(
                accepted.windows(2).all(|w| w[1] <= w[0] + 1e-12),
                "{family} {optimizer:?}"
            );
        }
    }
}

#[test]
fn penalty_does_not_undercut_unpenalized_energy() {
    let h = h2();
    let mut free = exact(AnsatzFamily::RyRz);
    free.mu = 0.0;
    free.allow_unpenalized = true;
    let unconstrained = minimize(&free, &h.qubit_hamiltonian, &penalty()).unwrap();
    let penalized = minimize(&exact(AnsatzFamily::RyRz), &h.qubit_hamiltonian, &penalty()).unwrap();
    assert!(penalized.final_energy >= unconstrained.final_energy - 1e-9);
}

#[test]
fn unpenalized_ryrz_needs_override() {
    let mut config = exact(AnsatzFamily::RyRz);
    config.mu = 0.0;
    assert!(matches!(config.validate(), Err(VqeError::Contract(_))));
    config.cost_kind = CostKind::Projected;
    assert!(config.validate().is_ok());
}

#[test]
fn gradient_optimizer_rejected_when_sampling() {
    let mut config = default_config(
        AnsatzFamily::Givens,
        4,
        2,
        ExecutionMode::Sampled {
            shots: 100,
            seed: 1,
        },
    );
    config.optimizer = OptimizerKind::QuasiNewton;
    assert!(matches!(config.validate(), Err(VqeError::Contract(_))));
}

#[test]
fn zero_start_of_ryrz_warns_through_termination() {
    let mut config = exact(AnsatzFamily::RyRz);
    config.init = InitStrategy::Zeros;
    config.mu = 0.0;
    config.allow_unpenalized = true;
    let trace = minimize(&config, &h2().qubit_hamiltonian, &penalty()).unwrap();
    assert_eq!(trace.termination, Termination::ZeroGradient);
}

#[test]
fn divergence_carries_the_trace() {
    // RyRz at zero parameters prepares |0000>, which has no weight in the two-electron sector
    let mut config = exact(AnsatzFamily::RyRz);
    config.init = InitStrategy::Zeros;
    config.mu = 0.0;
    config.cost_kind = CostKind::Projected;
    match minimize(&config, &h2().qubit_hamiltonian, &penalty()) {
        Err(VqeError::Numerical { trace: Some(t), .. }) => assert!(t.records.is_empty()),
        other => panic!("expected a numerical error, got {other:?}"),
    }
}

#[test]
fn sampled_runs_are_reproducible() {
    let mode = ExecutionMode::Sampled {
        shots: 4000,
        seed: 17,
    };
    let mut config = default_config(AnsatzFamily::Givens, 4, 2, mode);
    config.max_evaluations = 200;
    let a = minimize(&config, &h2().qubit_hamiltonian, &penalty()).unwrap();
    let b = minimize(&config, &h2().qubit_hamiltonian, &penalty()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn trace_csv_layout() {
    let trace = minimize(
        &exact(AnsatzFamily::Givens),
        &h2().qubit_hamiltonian,
        &penalty(),
    )
    .unwrap();
    let csv = trace.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,energy_ha,penalty,p0,p1"));
    assert_eq!(lines.count(), trace.evaluations());
}

#[test]
fn convergence_ordering_over_seeds() {
    let h = h2();
    let e0 = casci();
    let reach = |c: &VqeConfig| {
        minimize(c, &h.qubit_hamiltonian, &penalty())
            .unwrap()
            .evaluations_to_reach(e0, CHEMICAL_ACCURACY)
            .unwrap_or(usize::MAX)
    };
    let median = |mut v: Vec<usize>| {
        v.sort();
        v[v.len() / 2]
    };
    let givens = reach(&exact(AnsatzFamily::Givens));
    let uccsd = reach(&exact(AnsatzFamily::Uccsd));
    let mut penalized = Vec::new();
    let mut projected = Vec::new();
    let mut projected_total = Vec::new();
    let mut penalized_total = Vec::new();
    for seed in 0..10 {
        let mut c = exact(AnsatzFamily::RyRz);
        c.init = InitStrategy::random(seed);
        penalized.push(reach(&c));
        penalized_total.push(
            minimize(&c, &h.qubit_hamiltonian, &penalty())
                .unwrap()
                .evaluations(),
        );
        c.mu = 0.0;
        c.cost_kind = CostKind::Projected;
        projected.push(reach(&c));
        projected_total.push(
            minimize(&c, &h.qubit_hamiltonian, &penalty())
                .unwrap()
                .evaluations(),
        );
    }
    assert!(givens <= uccsd, "{givens} vs {uccsd}");
    assert!(uccsd < median(penalized.clone()));
    assert!(median(projected) < median(penalized));
    assert!(median(projected_total) < median(penalized_total));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shift_rule_matches_finite_differences(seed in any::<u64>(), family_idx in 0usize..4, projected in any::<bool>()) {
        let family = AnsatzFamily::ALL[family_idx];
        let spec = AnsatzSpec::new(family, 4, 2);
        let c = spec.build().unwrap();
        let h = h2();
        let mut r = rng(seed);
        let kind = if projected { CostKind::Projected } else { CostKind::Penalized };
        let mut f = CostFunction::new(&c, &h.qubit_hamiltonian, &penalty(), 0.7, kind, ExecutionMode::Exact, 2).unwrap();
        let x = random_params(&mut r, c.n_parameters());
        let g = f.gradient(&x).unwrap();
        for (k, gk) in g.iter().enumerate() {
            let fd = central_difference(&mut f, &x, k);
            prop_assert!((gk - fd).abs() <= 1e-6 * fd.abs().max(1e-2), "{} p{}: {} vs {}", family, k, gk, fd);
        }
    }
}
