//! Fermionic ladder operators and the Jordan–Wigner encoding.
//!
//! Spin-orbital `p` maps to qubit `p`, with
//! `a_p^† -> (X_p - iY_p)/2 · Z_{p-1}…Z_0` and `a_p -> (X_p + iY_p)/2 · Z_{p-1}…Z_0`.
//! Qubit `|1>` means the spin-orbital is occupied.

use num_complex::Complex64;

use super::string::PauliString;
use super::sum::{PauliSum, PauliTerm};
use crate::error::{Result, VqeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderOp {
    pub index: usize,
    pub creation: bool,
}

impl LadderOp {
    pub fn create(index: usize) -> Self {
        Self {
            index,
            creation: true,
        }
    }

    pub fn annihilate(index: usize) -> Self {
        Self {
            index,
            creation: false,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            index: self.index,
            creation: !self.creation,
        }
    }
}

/// `coefficient · op_0 op_1 … op_k` (leftmost operator acts last).
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub coefficient: f64,
    pub ops: Vec<LadderOp>,
}

impl FermionTerm {
    pub fn new(coefficient: f64, ops: Vec<LadderOp>) -> Self {
        Self { coefficient, ops }
    }

    /// `c · a_p^† a_q`
    pub fn one_body(coefficient: f64, p: usize, q: usize) -> Self {
        Self::new(
            coefficient,
            vec![LadderOp::create(p), LadderOp::annihilate(q)],
        )
    }

    /// `c · a_p^† a_q^† a_r a_s`
    pub fn two_body(coefficient: f64, p: usize, q: usize, r: usize, s: usize) -> Self {
        Self::new(
            coefficient,
            vec![
                LadderOp::create(p),
                LadderOp::create(q),
                LadderOp::annihilate(r),
                LadderOp::annihilate(s),
            ],
        )
    }

    /// Hermitian conjugate: reversed order, each operator adjointed.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.coefficient,
            self.ops.iter().rev().map(|op| op.adjoint()).collect(),
        )
    }
}

fn ladder_image(op: LadderOp, n: usize) -> PauliSum {
    let z_below = (1u64 << op.index) - 1;
    let bit = 1u64 << op.index;
    let x_string = PauliString::from_masks(n, bit, z_below).expect("index checked");
    let y_string = PauliString::from_masks(n, bit, z_below | bit).expect("index checked");
    let y_sign = if op.creation { -0.5 } else { 0.5 };
    PauliSum::from_terms(
        n,
        [
            PauliTerm::new(0.5, x_string),
            PauliTerm::new(Complex64::new(0.0, y_sign), y_string),
        ],
    )
    .expect("ladder image is well-formed")
}

/// Map a sum of fermionic terms onto `n_spin_orbitals` qubits.
pub fn jordan_wigner(terms: &[FermionTerm], n_spin_orbitals: usize) -> Result<PauliSum> {
    if n_spin_orbitals > super::string::MAX_PAULI_QUBITS {
        return Err(VqeError::Size(format!(
            "{n_spin_orbitals} spin-orbitals exceed the Pauli register limit"
        )));
    }
    let images: Vec<[PauliSum; 2]> = (0..n_spin_orbitals)
        .map(|p| {
            [
                ladder_image(LadderOp::annihilate(p), n_spin_orbitals),
                ladder_image(LadderOp::create(p), n_spin_orbitals),
            ]
        })
        .collect();

    let mut total = PauliSum::zero(n_spin_orbitals);
    for term in terms {
        let mut product = PauliSum::identity(n_spin_orbitals, term.coefficient);
        for op in &term.ops {
            if op.index >= n_spin_orbitals {
                return Err(VqeError::Size(format!(
                    "spin-orbital {} out of range for {} spin-orbitals",
                    op.index, n_spin_orbitals
                )));
            }
            product = &product * &images[op.index][op.creation as usize];
        }
        total = &total + &product;
    }
    Ok(total)
}

/// Jordan–Wigner image of `P = Σ_i a_i^† a_i`.
pub fn particle_number_operator(n_spin_orbitals: usize) -> PauliSum {
    let terms: Vec<FermionTerm> = (0..n_spin_orbitals)
        .map(|i| FermionTerm::one_body(1.0, i, i))
        .collect();
    jordan_wigner(&terms, n_spin_orbitals).expect("indices in range")
}

/// Functional form of the particle-number penalty added to the cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyForm {
    /// `(P - N)^2`: zero exactly on the N-particle sector, positive elsewhere.
    #[default]
    Squared,
    /// `P` itself: a linear weight on the number operator.
    /// Rewards under-occupation; kept for comparison only.
    Linear,
}

/// `(P - N·I)^2` on `n_spin_orbitals` qubits.
pub fn penalty_hamiltonian(n_spin_orbitals: usize, n_electrons: usize) -> Result<PauliSum> {
    penalty_operator(PenaltyForm::Squared, n_spin_orbitals, n_electrons)
}

pub fn penalty_operator(
    form: PenaltyForm,
    n_spin_orbitals: usize,
    n_electrons: usize,
) -> Result<PauliSum> {
    if n_electrons > n_spin_orbitals {
        return Err(VqeError::Contract(format!(
            "{n_electrons} electrons do not fit in {n_spin_orbitals} spin-orbitals"
        )));
    }
    let number = particle_number_operator(n_spin_orbitals);
    Ok(match form {
        PenaltyForm::Linear => number,
        PenaltyForm::Squared => {
            let shifted = &number - &PauliSum::identity(n_spin_orbitals, n_electrons as f64);
            &shifted * &shifted
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::sum::to_dense_matrix;

    fn coeff(s: &PauliSum, string: &str) -> Complex64 {
        let target: PauliString = string.parse().unwrap();
        s.terms()
            .iter()
            .find(|t| t.string == target)
            .map(|t| t.coefficient)
            .unwrap_or_default()
    }

    #[test]
    fn number_operator_one_orbital() {
        let n = particle_number_operator(1);
        assert_eq!(n.len(), 2);
        assert!((coeff(&n, "I") - 0.5).norm() < 1e-15);
        assert!((coeff(&n, "Z") + 0.5).norm() < 1e-15);
        let m = to_dense_matrix(&n).unwrap();
        assert!(m[(0, 0)].norm() < 1e-15);
        assert!((m[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hopping_term_maps_to_xx_plus_yy() {
        let h = jordan_wigner(
            &[
                FermionTerm::one_body(1.0, 0, 1),
                FermionTerm::one_body(1.0, 1, 0),
            ],
            2,
        )
        .unwrap();
        assert_eq!(h.len(), 2);
        assert!((coeff(&h, "XX") - 0.5).norm() < 1e-15);
        assert!((coeff(&h, "YY") - 0.5).norm() < 1e-15);
    }

    #[test]
    fn number_operator_four_orbitals() {
        let n = particle_number_operator(4);
        assert_eq!(n.len(), 5);
        assert!((coeff(&n, "IIII") - 2.0).norm() < 1e-15);
        for z in ["ZIII", "IZII", "IIZI", "IIIZ"] {
            assert!((coeff(&n, z) + 0.5).norm() < 1e-15);
        }
    }

    #[test]
    fn penalty_values_on_basis_states() {
        let pen = penalty_hamiltonian(4, 2).unwrap();
        let m = to_dense_matrix(&pen).unwrap();
        // |0101> in (q3 q2 q1 q0) order is index 5, |0001> is 1, |1111> is 15.
        assert!(m[(5, 5)].norm() < 1e-12);
        assert!((m[(1, 1)].re - 1.0).abs() < 1e-12);
        assert!((m[(15, 15)].re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn index_out_of_range() {
        assert!(matches!(
            jordan_wigner(&[FermionTerm::one_body(1.0, 0, 3)], 2),
            Err(VqeError::Size(_))
        ));
    }

    #[test]
    fn too_many_electrons() {
        assert!(penalty_hamiltonian(2, 3).is_err());
    }

    #[test]
    fn linear_form_is_number_operator() {
        assert_eq!(
            penalty_operator(PenaltyForm::Linear, 3, 1).unwrap(),
            particle_number_operator(3)
        );
    }
}
