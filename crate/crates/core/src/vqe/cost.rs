use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::gradient::RotationProgram;
use crate::circuit::{run, sample_histogram, Angle, Circuit, Gate, Statevector};
use crate::error::{Result, VqeError};
use crate::hamiltonian::sector_states;
use crate::noise::{
    apply_readout_error, mitigate_readout, noisy_evolve, DensityMatrix, NoiseModel,
};
use crate::pauli::{Pauli, PauliString, PauliSum, HERMITIAN_TOLERANCE};
use crate::resources::lower_to_basis;

/// How expectation values are obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum ExecutionMode {
    Exact,
    Sampled {
        shots: u64,
        seed: u64,
    },
    Noisy {
        noise: NoiseModel,
        shots: u64,
        seed: u64,
        mitigate_readout: bool,
    },
}

impl ExecutionMode {
    pub fn is_exact(&self) -> bool {
        matches!(self, ExecutionMode::Exact)
    }

    pub fn label(&self) -> String {
        match self {
            ExecutionMode::Exact => "exact".into(),
            ExecutionMode::Sampled { shots, .. } => format!("sampled:{shots}"),
            ExecutionMode::Noisy {
                shots,
                mitigate_readout,
                ..
            } => format!(
                "noisy:{shots}{}",
                if *mitigate_readout { "+mitigated" } else { "" }
            ),
        }
    }

    /// Same mode with a different seed (no-op for exact).
    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut m = self.clone();
        match &mut m {
            ExecutionMode::Exact => {}
            ExecutionMode::Sampled { seed, .. } | ExecutionMode::Noisy { seed, .. } => {
                *seed = new_seed
            }
        }
        m
    }
}

/// What the optimiser minimises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CostKind {
    /// `<H> + μ <penalty>`
    #[default]
    Penalized,
    /// `<ΠHΠ> / <Π>` with `Π` the projector onto the fixed-particle sector; exact mode only.
    Projected,
}

/// Electronic energy, penalty expectation, and the combined objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostValue {
    pub energy: f64,
    pub penalty: f64,
    pub total: f64,
}

/// Greedy qubit-wise-commuting partition, in input order.
pub fn qwc_groups(strings: &[PauliString]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Vec<usize>, PauliString)> = Vec::new();
    for (i, s) in strings.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|(_, basis)| basis.qubit_wise_commutes(s))
        {
            Some((members, basis)) => {
                members.push(i);
                *basis = PauliString::from_masks(
                    s.n_qubits(),
                    basis.x_mask() | s.x_mask(),
                    basis.z_mask() | s.z_mask(),
                )
                .expect("same register");
            }
            None => groups.push((vec![i], *s)),
        }
    }
    groups.into_iter().map(|(m, _)| m).collect()
}

/// Gates rotating each qubit's measured letter onto Z.
pub fn measurement_basis_gates(basis: &PauliString) -> Vec<Gate> {
    let mut gates = Vec::new();
    for q in 0..basis.n_qubits() {
        match basis.letter(q) {
            Pauli::X => gates.push(Gate::h(q)),
            Pauli::Y => {
                gates.push(Gate::rz(q, Angle::Fixed(-FRAC_PI_2)));
                gates.push(Gate::h(q));
            }
            _ => {}
        }
    }
    gates
}

/// `Σ_b w_b (-1)^{|b ∧ support(P)|}` for a distribution measured in P's eigenbasis.
pub fn parity_expectation(dist: &[f64], support: u64) -> f64 {
    dist.iter()
        .enumerate()
        .map(|(b, w)| {
            if (b as u64 & support).count_ones().is_multiple_of(2) {
                *w
            } else {
                -*w
            }
        })
        .sum()
}

#[derive(Debug, Clone)]
struct MeasurementGroup {
    members: Vec<usize>,
    rotation: Circuit,
}

/// Shared measurement layout for the Hamiltonian and penalty.
#[derive(Debug, Clone)]
struct MeasurementPlan {
    strings: Vec<PauliString>,
    h_coef: Vec<f64>,
    p_coef: Vec<f64>,
    h_const: f64,
    p_const: f64,
    groups: Vec<MeasurementGroup>,
}

impl MeasurementPlan {
    fn new(h: &PauliSum, penalty: &PauliSum, lowered: bool) -> Result<Self> {
        let mut index: BTreeMap<PauliString, usize> = BTreeMap::new();
        let mut strings = Vec::new();
        let mut h_coef = Vec::new();
        let mut p_coef = Vec::new();
        let (mut h_const, mut p_const) = (0.0, 0.0);
        for (which, sum) in [(0, h), (1, penalty)] {
            for t in sum.terms() {
                if t.string.is_identity() {
                    if which == 0 {
                        h_const += t.coefficient.re;
                    } else {
                        p_const += t.coefficient.re;
                    }
                    continue;
                }
                let i = *index.entry(t.string).or_insert_with(|| {
                    strings.push(t.string);
                    h_coef.push(0.0);
                    p_coef.push(0.0);
                    strings.len() - 1
                });
                if which == 0 {
                    h_coef[i] += t.coefficient.re;
                } else {
                    p_coef[i] += t.coefficient.re;
                }
            }
        }
        let n = h.n_qubits();
        let mut groups = Vec::new();
        for members in qwc_groups(&strings) {
            let (x, z) = members.iter().fold((0, 0), |(x, z), &i| {
                (x | strings[i].x_mask(), z | strings[i].z_mask())
            });
            let basis = PauliString::from_masks(n, x, z)?;
            let mut rotation = Circuit::new(n, 0);
            rotation.extend(measurement_basis_gates(&basis))?;
            if lowered {
                rotation = lower_to_basis(&rotation)?;
            }
            groups.push(MeasurementGroup { members, rotation });
        }
        Ok(Self {
            strings,
            h_coef,
            p_coef,
            h_const,
            p_const,
            groups,
        })
    }

    fn combine(&self, estimates: &[f64]) -> (f64, f64) {
        let mut e = self.h_const;
        let mut p = self.p_const;
        for (i, v) in estimates.iter().enumerate() {
            e += self.h_coef[i] * v;
            p += self.p_coef[i] * v;
        }
        (e, p)
    }
}

/// Stateful cost evaluator; the sampling RNG advances across calls so a run is
/// reproducible from its seed.
#[derive(Debug, Clone)]
pub struct CostFunction {
    circuit: Circuit,
    hamiltonian: PauliSum,
    penalty: PauliSum,
    mu: f64,
    kind: CostKind,
    mode: ExecutionMode,
    rng: ChaCha8Rng,
    plan: Option<MeasurementPlan>,
    program: Option<RotationProgram>,
    sector_mask: Vec<bool>,
}

impl CostFunction {
    pub fn new(
        circuit: &Circuit,
        hamiltonian: &PauliSum,
        penalty: &PauliSum,
        mu: f64,
        kind: CostKind,
        mode: ExecutionMode,
        n_electrons: usize,
    ) -> Result<Self> {
        let n = circuit.n_qubits();
        if hamiltonian.n_qubits() != n || penalty.n_qubits() != n {
            return Err(VqeError::Size(format!(
                "{}-qubit circuit with {}-qubit Hamiltonian and {}-qubit penalty",
                n,
                hamiltonian.n_qubits(),
                penalty.n_qubits()
            )));
        }
        for (name, op) in [("Hamiltonian", hamiltonian), ("penalty", penalty)] {
            if !op.is_hermitian(HERMITIAN_TOLERANCE) {
                return Err(VqeError::Contract(format!("{name} is not Hermitian")));
            }
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(VqeError::Contract(format!(
                "penalty weight {mu} must be finite and ≥ 0"
            )));
        }
        if kind == CostKind::Projected && !mode.is_exact() {
            return Err(VqeError::Contract(
                "projected cost is only available in exact mode".into(),
            ));
        }
        let seed = match &mode {
            ExecutionMode::Exact => 0,
            ExecutionMode::Sampled { shots, seed } | ExecutionMode::Noisy { shots, seed, .. } => {
                if *shots == 0 {
                    return Err(VqeError::Contract("shots must be ≥ 1".into()));
                }
                *seed
            }
        };
        let (circuit, plan, program) = match &mode {
            ExecutionMode::Exact => (
                circuit.clone(),
                None,
                Some(RotationProgram::from_circuit(circuit)?),
            ),
            ExecutionMode::Sampled { .. } => (
                circuit.clone(),
                Some(MeasurementPlan::new(hamiltonian, penalty, false)?),
                None,
            ),
            ExecutionMode::Noisy { noise, .. } => {
                noise.validate()?;
                (
                    lower_to_basis(circuit)?,
                    Some(MeasurementPlan::new(hamiltonian, penalty, true)?),
                    None,
                )
            }
        };
        let mut sector_mask = vec![false; 1 << n];
        if kind == CostKind::Projected {
            for s in sector_states(n, n_electrons) {
                sector_mask[s] = true;
            }
        }
        Ok(Self {
            circuit,
            hamiltonian: hamiltonian.clone(),
            penalty: penalty.clone(),
            mu,
            kind,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            plan,
            program,
            sector_mask,
        })
    }

    pub fn n_parameters(&self) -> usize {
        self.circuit.n_parameters()
    }

    pub fn mode(&self) -> &ExecutionMode {
        &self.mode
    }

    /// The circuit actually executed (basis-lowered in noisy mode).
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    fn check_len(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.circuit.n_parameters() {
            return Err(VqeError::Binding(format!(
                "circuit has {} parameters, {} supplied",
                self.circuit.n_parameters(),
                params.len()
            )));
        }
        Ok(())
    }

    fn project(&self, psi: &Statevector) -> Statevector {
        let amps = psi
            .amplitudes()
            .iter()
            .zip(&self.sector_mask)
            .map(|(a, &keep)| if keep { *a } else { Default::default() })
            .collect();
        Statevector::from_amplitudes(amps).expect("same length")
    }

    /// Quadratic forms behind the exact cost: `[<H>, <pen>]`, plus `[<ΠHΠ>, <Π>]` when projected.
    fn exact_forms(&self, psi: &Statevector) -> Result<Vec<f64>> {
        let mut out = vec![
            psi.expectation(&self.hamiltonian)?,
            psi.expectation(&self.penalty)?,
        ];
        if self.kind == CostKind::Projected {
            let proj = self.project(psi);
            out.push(proj.expectation(&self.hamiltonian)?);
            out.push(proj.norm_sqr());
        }
        Ok(out)
    }

    fn value_from_forms(&self, f: &[f64]) -> Result<CostValue> {
        match self.kind {
            CostKind::Penalized => Ok(CostValue {
                energy: f[0],
                penalty: f[1],
                total: f[0] + self.mu * f[1],
            }),
            CostKind::Projected => {
                if f[3] < 1e-14 {
                    return Err(VqeError::numerical(
                        "state has no weight in the fixed-particle sector",
                    ));
                }
                let e = f[2] / f[3];
                Ok(CostValue {
                    energy: e,
                    penalty: f[1],
                    total: e + self.mu * f[1],
                })
            }
        }
    }

    pub fn evaluate(&mut self, params: &[f64]) -> Result<CostValue> {
        self.check_len(params)?;
        let value = match &self.mode {
            ExecutionMode::Exact => {
                let psi = self.program.as_ref().expect("exact program").run(params)?;
                self.value_from_forms(&self.exact_forms(&psi)?)?
            }
            ExecutionMode::Sampled { shots, .. } => {
                let shots = *shots;
                let psi = run(
                    &self.circuit,
                    params,
                    &Statevector::zero_state(self.circuit.n_qubits()),
                )?;
                self.sampled(shots, |rot| {
                    let mut s = psi.clone();
                    for g in rot.gates() {
                        s.apply_gate(g, &[])?;
                    }
                    Ok(s.probabilities())
                })?
            }
            ExecutionMode::Noisy {
                noise,
                shots,
                mitigate_readout: mitigate,
                ..
            } => {
                let (noise, shots, mitigate) = (noise.clone(), *shots, *mitigate);
                let rho = noisy_evolve(&self.circuit, params, &noise)?;
                let errors = noise.readout_errors(self.circuit.n_qubits());
                self.sampled_with(
                    shots,
                    |rot| {
                        let mut r: DensityMatrix = rho.clone();
                        for g in rot.gates() {
                            r.apply_noisy_gate(g, &[], &noise)?;
                        }
                        apply_readout_error(&r.probabilities(), &errors)
                    },
                    |dist| {
                        if mitigate {
                            mitigate_readout(dist, &errors)
                        } else {
                            Ok(dist.to_vec())
                        }
                    },
                )?
            }
        };
        if !value.total.is_finite() {
            return Err(VqeError::numerical(format!(
                "cost evaluated to {} at {:?}",
                value.total, params
            )));
        }
        Ok(value)
    }

    fn sampled<F>(&mut self, shots: u64, probs: F) -> Result<CostValue>
    where
        F: Fn(&Circuit) -> Result<Vec<f64>>,
    {
        self.sampled_with(shots, probs, |d| Ok(d.to_vec()))
    }

    fn sampled_with<F, G>(&mut self, shots: u64, probs: F, post: G) -> Result<CostValue>
    where
        F: Fn(&Circuit) -> Result<Vec<f64>>,
        G: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let plan = self.plan.as_ref().expect("sampling plan");
        let mut estimates = vec![0.0; plan.strings.len()];
        if !plan.groups.is_empty() {
            let per_group = (shots / plan.groups.len() as u64).max(1);
            for group in &plan.groups {
                let p = probs(&group.rotation)?;
                let hist = sample_histogram(&p, per_group, &mut self.rng);
                let empirical: Vec<f64> =
                    hist.iter().map(|&k| k as f64 / per_group as f64).collect();
                let dist = post(&empirical)?;
                for &i in &group.members {
                    estimates[i] = parity_expectation(&dist, plan.strings[i].support());
                }
            }
        }
        let (energy, penalty) = plan.combine(&estimates);
        Ok(CostValue {
            energy,
            penalty,
            total: energy + self.mu * penalty,
        })
    }

    /// Parameter-shift gradient of the total cost; exact mode only.
    pub fn gradient(&self, params: &[f64]) -> Result<Vec<f64>> {
        self.check_len(params)?;
        let program = self.program.as_ref().ok_or_else(|| {
            VqeError::Contract("gradients are only available in exact mode".into())
        })?;
        let n_out = if self.kind == CostKind::Projected {
            4
        } else {
            2
        };
        let jac = program.jacobian(params, n_out, |psi| self.exact_forms(psi))?;
        let m = params.len();
        Ok(match self.kind {
            CostKind::Penalized => (0..m).map(|j| jac[0][j] + self.mu * jac[1][j]).collect(),
            CostKind::Projected => {
                let f = self.exact_forms(&program.run(params)?)?;
                let (a, b) = (f[2], f[3]);
                (0..m)
                    .map(|j| (jac[2][j] * b - a * jac[3][j]) / (b * b) + self.mu * jac[1][j])
                    .collect()
            }
        })
    }
}

/// One-off cost evaluation (penalized form).
pub fn cost(
    params: &[f64],
    hamiltonian: &PauliSum,
    penalty: &PauliSum,
    mu: f64,
    circuit: &Circuit,
    mode: &ExecutionMode,
) -> Result<CostValue> {
    CostFunction::new(
        circuit,
        hamiltonian,
        penalty,
        mu,
        CostKind::Penalized,
        mode.clone(),
        0,
    )?
    .evaluate(params)
}
