use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ansatz::hf_index;
use crate::circuit::Statevector;
use crate::error::{Result, VqeError};
use crate::pauli::{PauliSum, DEFAULT_DENSE_QUBIT_CAP};

/// Lowest eigenpair inside the fixed-particle sector.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub state: Statevector,
}

/// Basis-state indices with `n_electrons` set bits and minimal spin projection.
///
/// For an even register (blocked spin ordering) the spin-up count is `ceil(N/2)`; for an odd
/// register only the particle number is fixed.
pub fn sector_states(n_qubits: usize, n_electrons: usize) -> Vec<usize> {
    let m = n_qubits / 2;
    let up_mask = (1usize << m) - 1;
    (0..1usize << n_qubits)
        .filter(|&b| b.count_ones() as usize == n_electrons)
        .filter(|&b| {
            n_qubits % 2 == 1 || (b & up_mask).count_ones() as usize == n_electrons.div_ceil(2)
        })
        .collect()
}

/// `H` restricted to the given basis states: `block[(i, j)] = <s_i|H|s_j>`.
pub fn sector_block(h: &PauliSum, states: &[usize]) -> DMatrix<Complex64> {
    let position: HashMap<usize, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut block = DMatrix::<Complex64>::zeros(states.len(), states.len());
    for (col, &b) in states.iter().enumerate() {
        for t in h.terms() {
            let (phase, out) = t.string.apply_to_basis(b);
            if let Some(&row) = position.get(&out) {
                block[(row, col)] += t.coefficient * phase;
            }
        }
    }
    block
}

/// Exact ground state of `h` in the `n_electrons`, lowest-|S_z| sector.
pub fn casci_ground_state(h: &PauliSum, n_electrons: usize) -> Result<GroundState> {
    let n = h.n_qubits();
    if n > DEFAULT_DENSE_QUBIT_CAP {
        return Err(VqeError::Resource(format!(
            "{n} qubits exceed the {DEFAULT_DENSE_QUBIT_CAP}-qubit dense cap"
        )));
    }
    let states = sector_states(n, n_electrons);
    if states.is_empty() {
        return Err(VqeError::Contract(format!(
            "no basis states with {n_electrons} electrons on {n} qubits"
        )));
    }
    let eig = sector_block(h, &states).symmetric_eigen();
    let (k, &energy) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty sector");
    if !energy.is_finite() {
        return Err(VqeError::numerical("non-finite CASCI eigenvalue"));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (i, &s) in states.iter().enumerate() {
        amps[s] = eig.eigenvectors[(i, k)];
    }
    let mut state = Statevector::from_amplitudes(amps)?;
    state.normalize();
    Ok(GroundState { energy, state })
}

/// `<HF|H|HF>` for the blocked closed-shell reference.
pub fn hf_energy(h: &PauliSum, n_electrons: usize) -> Result<f64> {
    let hf = Statevector::basis_state(h.n_qubits(), hf_index(h.n_qubits(), n_electrons)?);
    hf.expectation(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::penalty_hamiltonian;

    #[test]
    fn sector_of_four_qubits_two_electrons() {
        assert_eq!(sector_states(4, 2), vec![0b0101, 0b0110, 0b1001, 0b1010]);
        assert_eq!(sector_states(3, 1), vec![1, 2, 4]);
    }

    #[test]
    fn penalty_alone_has_zero_sector_energy() {
        let gs = casci_ground_state(&penalty_hamiltonian(4, 2).unwrap(), 2).unwrap();
        assert!(gs.energy.abs() < 1e-12);
    }

    #[test]
    fn empty_sector_rejected() {
        let h = PauliSum::identity(2, 1.0);
        assert!(matches!(
            casci_ground_state(&h, 3),
            Err(VqeError::Contract(_))
        ));
    }
}
