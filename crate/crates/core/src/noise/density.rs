use nalgebra::DMatrix;
use num_complex::Complex64;

use super::model::NoiseModel;
use crate::circuit::kernel;
use crate::circuit::{gate_matrix, Circuit, Gate, Statevector};
use crate::error::{Result, VqeError};
use crate::pauli::{PauliSum, HERMITIAN_TOLERANCE};

type C = Complex64;

/// Largest register the density-matrix engine accepts.
pub const DENSITY_QUBIT_CAP: usize = 8;

/// `2^n × 2^n` density matrix stored column-major as a `4^n` vector:
/// entry `(r, c)` sits at `r + 2^n · c`, so rows behave like qubits `0..n`
/// and columns like qubits `n..2n` of a doubled register.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<C>,
}

impl DensityMatrix {
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        Self::from_statevector(&Statevector::zero_state(n_qubits))
    }

    pub fn from_statevector(psi: &Statevector) -> Result<Self> {
        let n = psi.n_qubits();
        check_cap(n)?;
        let d = 1usize << n;
        let a = psi.amplitudes();
        let mut data = vec![C::new(0.0, 0.0); d * d];
        for c in 0..d {
            for r in 0..d {
                data[r + d * c] = a[r] * a[c].conj();
            }
        }
        Ok(Self { n_qubits: n, data })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        self.data[r + self.dim() * c]
    }

    pub fn to_matrix(&self) -> DMatrix<C> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |r, c| self.get(r, c))
    }

    pub fn trace(&self) -> C {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(ρ²)`
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ_rc ρ_rc ρ_cr = Σ |ρ_rc|² for Hermitian ρ
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Diagonal, clipped at zero.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.get(i, i).re.max(0.0))
            .collect()
    }

    /// `ρ ← U ρ U†`
    pub fn apply_gate(&mut self, g: &Gate, params: &[f64]) -> Result<()> {
        let n = self.n_qubits;
        if let Some(&q) = g.targets().iter().find(|&&q| q >= n) {
            return Err(VqeError::Size(format!(
                "gate on qubit {q} applied to a {n}-qubit density matrix"
            )));
        }
        let m = gate_matrix(g, params)?;
        let shifted: Vec<usize> = g.targets().iter().map(|q| q + n).collect();
        kernel::apply_matrix(&mut self.data, g.targets(), &m);
        kernel::apply_matrix(&mut self.data, &shifted, &m.conj());
        Ok(())
    }

    /// `ρ ← (1-p)ρ + p · Tr_S(ρ) ⊗ I_S / 2^|S|` on the qubit set `support`.
    pub fn depolarize(&mut self, support: &[usize], p: f64) {
        if p == 0.0 || support.is_empty() {
            return;
        }
        let n = self.n_qubits;
        let d = self.dim();
        let k = support.len();
        let row_mask: usize = support.iter().map(|q| 1usize << q).sum();
        let col_mask = row_mask << n;
        // spread bit j of `s` onto support qubit j
        let spread = |s: usize| -> usize {
            support
                .iter()
                .enumerate()
                .filter(|(j, _)| s >> j & 1 == 1)
                .map(|(_, q)| 1usize << q)
                .sum()
        };
        let offsets: Vec<usize> = (0..1usize << k).map(spread).collect();
        let weight = p / (1usize << k) as f64;
        for base in 0..d * d {
            if base & (row_mask | col_mask) != 0 {
                continue;
            }
            let partial: C = offsets
                .iter()
                .map(|&o| self.data[base + o + (o << n)])
                .sum();
            for &o_r in &offsets {
                for &o_c in &offsets {
                    let i = base + o_r + (o_c << n);
                    self.data[i] *= 1.0 - p;
                    if o_r == o_c {
                        self.data[i] += partial * weight;
                    }
                }
            }
        }
    }

    /// Gate followed by depolarizing noise on its support.
    pub fn apply_noisy_gate(&mut self, g: &Gate, params: &[f64], noise: &NoiseModel) -> Result<()> {
        self.apply_gate(g, params)?;
        let p = if g.is_two_qubit() { noise.p2 } else { noise.p1 };
        self.depolarize(g.targets(), p);
        Ok(())
    }

    /// `Tr(ρ O)` for a Hermitian observable.
    pub fn expectation(&self, obs: &PauliSum) -> Result<f64> {
        if obs.n_qubits() != self.n_qubits {
            return Err(VqeError::Size(format!(
                "{}-qubit observable on a {}-qubit density matrix",
                obs.n_qubits(),
                self.n_qubits
            )));
        }
        if !obs.is_hermitian(HERMITIAN_TOLERANCE) {
            return Err(VqeError::Contract(
                "expectation requires a Hermitian observable".into(),
            ));
        }
        let mut acc = C::new(0.0, 0.0);
        for t in obs.terms() {
            // Tr(ρP) = Σ_c <c|ρ P|c> = Σ_c phase(c) ρ[P(c), c]
            for c in 0..self.dim() {
                let (phase, r) = t.string.apply_to_basis(c);
                acc += t.coefficient * phase * self.get(c, r);
            }
        }
        Ok(acc.re)
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > DENSITY_QUBIT_CAP {
        return Err(VqeError::Resource(format!(
            "{n} qubits exceed the {DENSITY_QUBIT_CAP}-qubit density-matrix cap"
        )));
    }
    Ok(())
}

/// Run `circuit` from `|0…0>` with depolarizing noise after every gate.
pub fn noisy_evolve(
    circuit: &Circuit,
    params: &[f64],
    noise: &NoiseModel,
) -> Result<DensityMatrix> {
    check_cap(circuit.n_qubits())?;
    if params.len() != circuit.n_parameters() {
        return Err(VqeError::Binding(format!(
            "circuit has {} parameters, {} supplied",
            circuit.n_parameters(),
            params.len()
        )));
    }
    let mut rho = DensityMatrix::zero_state(circuit.n_qubits())?;
    for g in circuit.gates() {
        rho.apply_noisy_gate(g, params, noise)?;
    }
    Ok(rho)
}
