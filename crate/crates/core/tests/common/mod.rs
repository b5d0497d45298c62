//! Oracles shared by the integration tests. Everything here is built from first principles
//! (explicit Kronecker products and occupation-number matrices), never from the library's
//! own dense conversion, so agreement is meaningful.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vqe_core::circuit::{gate_matrix, GateMatrix};
use vqe_core::hamiltonian::{ActiveSpaceHamiltonian, IntegralSet};
use vqe_core::pauli::{FermionTerm, LadderOp, Pauli, PauliString, PauliSum};
use vqe_core::{Circuit, Gate, Statevector};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn h2() -> ActiveSpaceHamiltonian {
    let ints = IntegralSet::from_fcidump_file(&fixture("h2_sto3g.fcidump")).unwrap();
    ActiveSpaceHamiltonian::new(ints).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn single(p: Pauli) -> DMatrix<C> {
    let (z, o, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

pub fn kron(a: &DMatrix<C>, b: &DMatrix<C>) -> DMatrix<C> {
    a.kronecker(b)
}

/// `P_{n-1} ⊗ … ⊗ P_0`, so qubit 0 is the least significant index bit.
pub fn string_dense(s: &PauliString) -> DMatrix<C> {
    let mut m = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    for q in (0..s.n_qubits()).rev() {
        m = kron(&m, &single(s.letter(q)));
    }
    m
}

pub fn sum_dense(s: &PauliSum) -> DMatrix<C> {
    let dim = 1 << s.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for t in s.terms() {
        m += string_dense(&t.string) * t.coefficient;
    }
    m
}

/// `a_p` on `n` spin-orbitals with the sign `(-1)^(occupied modes below p)`.
pub fn annihilator(p: usize, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        if b >> p & 1 == 1 {
            let sign = if (b & ((1 << p) - 1)).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            m[(b ^ (1 << p), b)] = C::new(sign, 0.0);
        }
    }
    m
}

pub fn ladder(op: LadderOp, n: usize) -> DMatrix<C> {
    let a = annihilator(op.index, n);
    if op.creation {
        a.adjoint()
    } else {
        a
    }
}

/// Apply one ladder operator to an occupation-number basis state.
fn ladder_on_basis(op: LadderOp, b: usize) -> Option<(f64, usize)> {
    let occupied = b >> op.index & 1 == 1;
    if occupied == op.creation {
        return None;
    }
    let sign = if (b & ((1 << op.index) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((sign, b ^ (1 << op.index)))
}

pub fn fermion_dense(terms: &[FermionTerm], n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let mut total = DMatrix::zeros(dim, dim);
    for t in terms {
        for col in 0..dim {
            let mut acc = Some((t.coefficient, col));
            for op in t.ops.iter().rev() {
                acc = acc.and_then(|(c, b)| ladder_on_basis(*op, b).map(|(s, b2)| (c * s, b2)));
            }
            if let Some((c, row)) = acc {
                total[(row, col)] += C::new(c, 0.0);
            }
        }
    }
    total
}

#[test]
fn sparse_and_matrix_ladders_agree() {
    let mut r = rng(99);
    let terms = random_hermitian_fermion_terms(&mut r, 2);
    let mut slow = DMatrix::zeros(16, 16);
    for t in &terms {
        let mut m = DMatrix::identity(16, 16) * C::new(t.coefficient, 0.0);
        for op in &t.ops {
            m *= ladder(*op, 4);
        }
        slow += m;
    }
    assert!(max_abs_diff(&slow, &fermion_dense(&terms, 4)) < 1e-14);
}

/// Random one- and two-body terms plus their adjoints on `2·n_spatial` spin-orbitals.
pub fn random_hermitian_fermion_terms(rng: &mut impl Rng, n_spatial: usize) -> Vec<FermionTerm> {
    let n = 2 * n_spatial;
    let mut terms = Vec::new();
    for _ in 0..rng.random_range(1..6) {
        let t = FermionTerm::one_body(
            rng.random_range(-1.0..1.0),
            rng.random_range(0..n),
            rng.random_range(0..n),
        );
        terms.push(t.adjoint());
        terms.push(t);
    }
    for _ in 0..rng.random_range(1..6) {
        let idx: Vec<usize> = (0..4).map(|_| rng.random_range(0..n)).collect();
        let t = FermionTerm::two_body(rng.random_range(-1.0..1.0), idx[0], idx[1], idx[2], idx[3]);
        terms.push(t.adjoint());
        terms.push(t);
    }
    terms
}

pub fn max_abs_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

pub fn random_state(rng: &mut impl Rng, n: usize) -> Statevector {
    let amps: Vec<C> = (0..1 << n)
        .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Statevector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

pub fn random_params(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect()
}

/// Embed a 1- or 2-qubit gate into the full space by iterating over basis states.
pub fn embed(g: &Gate, params: &[f64], n: usize) -> DMatrix<C> {
    let local = gate_matrix(g, params).unwrap();
    let t = g.targets();
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    let local_index =
        |b: usize| -> usize { t.iter().enumerate().map(|(k, q)| (b >> q & 1) << k).sum() };
    for col in 0..dim {
        for row in 0..dim {
            let untouched = t.iter().fold(usize::MAX, |mask, q| mask & !(1 << q));
            if row & untouched != col & untouched {
                continue;
            }
            m[(row, col)] = local.get(local_index(row), local_index(col));
        }
    }
    m
}

pub fn circuit_dense(c: &Circuit, params: &[f64]) -> DMatrix<C> {
    let dim = 1 << c.n_qubits();
    let mut u = DMatrix::identity(dim, dim);
    for g in c.gates() {
        u = embed(g, params, c.n_qubits()) * u;
    }
    u
}

pub fn local_dense(m: &GateMatrix) -> DMatrix<C> {
    let d = m.dim();
    DMatrix::from_fn(d, d, |r, c| m.get(r, c))
}

/// `|<a|b>|` equals one for states equal up to global phase.
pub fn phase_insensitive_overlap(a: &Statevector, b: &Statevector) -> f64 {
    a.inner(b).norm()
}

/// Max entrywise distance after removing the relative global phase.
pub fn distance_up_to_phase(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let (mut best, mut idx) = (0.0, (0, 0));
    for r in 0..a.nrows() {
        for c in 0..a.ncols() {
            if a[(r, c)].norm() > best {
                best = a[(r, c)].norm();
                idx = (r, c);
            }
        }
    }
    let phase = b[idx] / a[idx];
    let phase = phase / phase.norm();
    max_abs_diff(&(a * phase), b)
}

pub fn hamming_weight_leak(state: &Statevector, n_electrons: u32) -> f64 {
    state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(b, _)| b.count_ones() != n_electrons)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Depth of the synthetic double well, in hartree.
pub const WELL_DEPTH: f64 = 0.018807;
pub const WELL_MINIMUM: f64 = 0.425;

/// Core-energy offset `a(δ² − δ₀²)²` scaled so the centre sits `WELL_DEPTH` above the minima.
pub fn well_offset(delta: f64) -> f64 {
    let a = WELL_DEPTH / WELL_MINIMUM.powi(4);
    a * (delta * delta - WELL_MINIMUM * WELL_MINIMUM).powi(2)
}

/// The H2 integrals re-used at every δ with a double-well core energy; returns the manifest path.
pub fn write_double_well(dir: &std::path::Path, deltas: &[f64]) -> PathBuf {
    let base = IntegralSet::from_fcidump_file(&fixture("h2_sto3g.fcidump")).unwrap();
    let mut manifest = String::from("# synthetic double well\n");
    for (k, &d) in deltas.iter().enumerate() {
        let mut ints = base.clone();
        ints.e_core += well_offset(d);
        let name = format!("point_{k}.fcidump");
        std::fs::write(dir.join(&name), ints.to_fcidump()).unwrap();
        manifest.push_str(&format!("{d} {name}\n"));
    }
    let path = dir.join("scan.manifest");
    std::fs::write(&path, manifest).unwrap();
    path
}
