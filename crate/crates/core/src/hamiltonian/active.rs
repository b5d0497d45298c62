use std::collections::BTreeSet;

use super::integrals::IntegralSet;
use crate::error::{Result, VqeError};
use crate::pauli::{jordan_wigner, FermionTerm, PauliSum, DEFAULT_DENSE_QUBIT_CAP};

/// Folds doubly occupied `frozen` orbitals into a mean-field core and keeps `active`.
///
/// The result is indexed by position in `active`; its electron count is the full count
/// minus two per frozen orbital.
pub fn reduce_to_active(
    full: &IntegralSet,
    frozen: &[usize],
    active: &[usize],
) -> Result<IntegralSet> {
    let n = full.n_orbitals();
    let check = |list: &[usize], what: &str| -> Result<()> {
        let set: BTreeSet<_> = list.iter().collect();
        if set.len() != list.len() {
            return Err(VqeError::Contract(format!("duplicate {what} orbital")));
        }
        if let Some(&o) = list.iter().find(|&&o| o >= n) {
            return Err(VqeError::Size(format!(
                "{what} orbital {o} out of range for {n} orbitals"
            )));
        }
        Ok(())
    };
    check(frozen, "frozen")?;
    check(active, "active")?;
    if let Some(o) = frozen.iter().find(|o| active.contains(o)) {
        return Err(VqeError::Contract(format!(
            "orbital {o} is both frozen and active"
        )));
    }
    let n_frozen_electrons = 2 * frozen.len();
    if n_frozen_electrons > full.n_electrons {
        return Err(VqeError::Contract(format!(
            "freezing {} orbitals needs {} electrons, only {} available",
            frozen.len(),
            n_frozen_electrons,
            full.n_electrons
        )));
    }
    let n_active_electrons = full.n_electrons - n_frozen_electrons;
    if n_active_electrons > 2 * active.len() {
        return Err(VqeError::Contract(format!(
            "{} active electrons do not fit in {} active orbitals",
            n_active_electrons,
            active.len()
        )));
    }

    let mut out = IntegralSet::zeros(active.len(), n_active_electrons);
    out.ms2 = full.ms2;

    let mut e_core = full.e_core;
    for &i in frozen {
        e_core += 2.0 * full.h1(i, i);
        for &j in frozen {
            e_core += 2.0 * full.h2(i, i, j, j) - full.h2(i, j, j, i);
        }
    }
    out.e_core = e_core;

    for (a, &p) in active.iter().enumerate() {
        for (b, &q) in active.iter().enumerate().take(a + 1) {
            let mut h = full.h1(p, q);
            for &i in frozen {
                h += 2.0 * full.h2(p, q, i, i) - full.h2(p, i, i, q);
            }
            out.set_h1(a, b, h);
        }
    }
    for (a, &p) in active.iter().enumerate() {
        for (b, &q) in active.iter().enumerate() {
            for (c, &r) in active.iter().enumerate() {
                for (d, &s) in active.iter().enumerate() {
                    out.set_h2(a, b, c, d, full.h2(p, q, r, s));
                }
            }
        }
    }
    Ok(out)
}

/// Spin-orbital index of spatial orbital `p` with spin `down`, blocked ordering.
fn spin_orbital(p: usize, down: bool, n_orbitals: usize) -> usize {
    p + if down { n_orbitals } else { 0 }
}

/// Second-quantised electronic Hamiltonian over the spin-orbitals of `ints`.
pub fn fermionic_hamiltonian(ints: &IntegralSet) -> Vec<FermionTerm> {
    let m = ints.n_orbitals();
    let mut terms = Vec::new();
    for p in 0..m {
        for q in 0..m {
            let h = ints.h1(p, q);
            if h == 0.0 {
                continue;
            }
            for down in [false, true] {
                terms.push(FermionTerm::one_body(
                    h,
                    spin_orbital(p, down, m),
                    spin_orbital(q, down, m),
                ));
            }
        }
    }
    // (1/2) Σ (pq|rs) a†_{pσ} a†_{rτ} a_{sτ} a_{qσ}
    for p in 0..m {
        for q in 0..m {
            for r in 0..m {
                for s in 0..m {
                    let v = ints.h2(p, q, r, s);
                    if v == 0.0 {
                        continue;
                    }
                    for sigma in [false, true] {
                        for tau in [false, true] {
                            let (ps, qs) = (spin_orbital(p, sigma, m), spin_orbital(q, sigma, m));
                            let (rs, ss) = (spin_orbital(r, tau, m), spin_orbital(s, tau, m));
                            if ps == rs || qs == ss {
                                continue;
                            }
                            terms.push(FermionTerm::two_body(0.5 * v, ps, rs, ss, qs));
                        }
                    }
                }
            }
        }
    }
    terms
}

/// Jordan–Wigner qubit Hamiltonian on `2 × n_orbitals` qubits; the identity term carries `e_core`.
pub fn assemble_qubit_hamiltonian(ints: &IntegralSet) -> Result<PauliSum> {
    let n_qubits = 2 * ints.n_orbitals();
    if n_qubits > DEFAULT_DENSE_QUBIT_CAP {
        return Err(VqeError::Resource(format!(
            "{n_qubits}-qubit active space exceeds the {DEFAULT_DENSE_QUBIT_CAP}-qubit cap"
        )));
    }
    let electronic = jordan_wigner(&fermionic_hamiltonian(ints), n_qubits)?;
    let core = PauliSum::identity(n_qubits, ints.e_core);
    let total = &electronic + &core;
    // JW of real integrals leaves only real coefficients; drop round-off residue.
    let terms = total.terms().iter().map(|t| {
        let mut t = *t;
        t.coefficient.im = 0.0;
        t
    });
    PauliSum::from_terms(n_qubits, terms)
}

/// Active-space integrals together with their qubit Hamiltonian.
#[derive(Debug, Clone)]
pub struct ActiveSpaceHamiltonian {
    pub integrals: IntegralSet,
    pub qubit_hamiltonian: PauliSum,
}

impl ActiveSpaceHamiltonian {
    pub fn new(integrals: IntegralSet) -> Result<Self> {
        let qubit_hamiltonian = assemble_qubit_hamiltonian(&integrals)?;
        Ok(Self {
            integrals,
            qubit_hamiltonian,
        })
    }

    /// Reduce `full` to the given window and assemble it.
    pub fn from_window(full: &IntegralSet, frozen: &[usize], active: &[usize]) -> Result<Self> {
        Self::new(reduce_to_active(full, frozen, active)?)
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.integrals.n_orbitals()
    }

    pub fn n_electrons(&self) -> usize {
        self.integrals.n_electrons
    }
}
