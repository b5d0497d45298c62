use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::circuit::Circuit;
use super::gate::{gate_matrix, Gate};
use super::kernel;
use crate::error::{Result, VqeError};
use crate::pauli::{PauliString, PauliSum, HERMITIAN_TOLERANCE};

/// Amplitudes over `2^n` basis states, little-endian (qubit 0 = least significant bit).
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two. Not renormalised.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(VqeError::Size(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        Ok(Self {
            n_qubits: amps.len().trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn apply_gate(&mut self, g: &Gate, params: &[f64]) -> Result<()> {
        self.check_targets(g.targets())?;
        let m = gate_matrix(g, params)?;
        kernel::apply_matrix(&mut self.amps, g.targets(), &m);
        Ok(())
    }

    /// `|ψ> <- P|ψ>`
    pub fn apply_pauli(&mut self, p: &PauliString) {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (phase, dst) = p.apply_to_basis(b);
            out[dst] = phase * a;
        }
        self.amps = out;
    }

    /// `|ψ> <- exp(-iφP/2)|ψ> = cos(φ/2)|ψ> - i sin(φ/2) P|ψ>`
    pub fn apply_pauli_rotation(&mut self, p: &PauliString, phi: f64) {
        let (s, c) = (phi / 2.0).sin_cos();
        let mut rotated = self.clone();
        rotated.apply_pauli(p);
        let k = Complex64::new(0.0, -s);
        for (a, r) in self.amps.iter_mut().zip(&rotated.amps) {
            *a = *a * c + k * r;
        }
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        if let Some(&q) = targets.iter().find(|&&q| q >= self.n_qubits) {
            return Err(VqeError::Size(format!(
                "gate on qubit {q} applied to a {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// `<ψ|P|ψ>` for a single string (always real for normalised input).
    pub fn pauli_expectation(&self, p: &PauliString) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (phase, dst) = p.apply_to_basis(b);
            acc += self.amps[dst].conj() * phase * a;
        }
        acc
    }

    /// Exact `Σ_j h_j <ψ|P_j|ψ>`.
    pub fn expectation(&self, obs: &PauliSum) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(VqeError::Size(format!(
                "{}-qubit observable on a {}-qubit state",
                obs.n_qubits(),
                self.n_qubits
            )));
        }
        if !obs.is_hermitian(HERMITIAN_TOLERANCE) {
            return Err(VqeError::Contract(
                "expectation requires a Hermitian observable (real coefficients)".into(),
            ));
        }
        Ok(obs
            .terms()
            .iter()
            .map(|t| t.coefficient.re * self.pauli_expectation(&t.string).re)
            .sum())
    }

    pub fn sample_counts(&self, shots: u64, seed: u64) -> BTreeMap<String, u64> {
        sample_counts(&self.probabilities(), self.n_qubits, shots, seed)
    }
}

/// Apply one gate, returning the new state.
pub fn apply(state: &Statevector, g: &Gate, params: &[f64]) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply_gate(g, params)?;
    Ok(out)
}

/// Run `circuit` left to right from `initial`.
pub fn run(circuit: &Circuit, params: &[f64], initial: &Statevector) -> Result<Statevector> {
    if params.len() != circuit.n_parameters() {
        return Err(VqeError::Binding(format!(
            "circuit has {} parameters, {} supplied",
            circuit.n_parameters(),
            params.len()
        )));
    }
    if initial.n_qubits() != circuit.n_qubits() {
        return Err(VqeError::Size(format!(
            "{}-qubit circuit on a {}-qubit state",
            circuit.n_qubits(),
            initial.n_qubits()
        )));
    }
    let mut state = initial.clone();
    for g in circuit.gates() {
        let m = gate_matrix(g, params)?;
        kernel::apply_matrix(&mut state.amps, g.targets(), &m);
    }
    Ok(state)
}

pub fn expectation(state: &Statevector, obs: &PauliSum) -> Result<f64> {
    state.expectation(obs)
}

/// Multinomial draw over basis-state indices.
pub fn sample_histogram(probabilities: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut hist = vec![0u64; probabilities.len()];
    let mut remaining_shots = shots;
    let mut remaining_mass: f64 = probabilities.iter().map(|p| p.max(0.0)).sum();
    for (i, &p) in probabilities.iter().enumerate() {
        if remaining_shots == 0 {
            break;
        }
        let p = p.max(0.0);
        if i + 1 == probabilities.len() || remaining_mass <= p {
            hist[i] = remaining_shots;
            break;
        }
        let q = (p / remaining_mass).clamp(0.0, 1.0);
        let k = Binomial::new(remaining_shots, q)
            .expect("probability clamped to [0, 1]")
            .sample(rng);
        hist[i] = k;
        remaining_shots -= k;
        remaining_mass -= p;
    }
    hist
}

/// Counts keyed by bitstring written `q_{n-1} … q_0`.
pub fn sample_counts(
    probabilities: &[f64],
    n_qubits: usize,
    shots: u64,
    seed: u64,
) -> BTreeMap<String, u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_histogram(probabilities, shots, &mut rng)
        .into_iter()
        .enumerate()
        .filter(|&(_, k)| k > 0)
        .map(|(i, k)| (format!("{:0width$b}", i, width = n_qubits), k))
        .collect()
}
