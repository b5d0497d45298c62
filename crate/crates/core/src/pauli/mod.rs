//! Pauli-string algebra, fermionic operators and the Jordan–Wigner map.

mod fermion;
mod string;
mod sum;

pub use fermion::{
    jordan_wigner, particle_number_operator, penalty_hamiltonian, penalty_operator, FermionTerm,
    LadderOp, PenaltyForm,
};
pub use string::{multiply, Pauli, PauliString, MAX_PAULI_QUBITS};
pub use sum::{
    to_dense_matrix, to_dense_matrix_capped, PauliSum, PauliTerm, DEFAULT_DENSE_QUBIT_CAP,
    DEFAULT_SIMPLIFY_THRESHOLD, HERMITIAN_TOLERANCE,
};
