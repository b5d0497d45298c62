//! Builders for the four ansatz families: RyRz and SwapRz (hardware-efficient),
//! UCCSD, and the hop-gate Givens circuit for CAS(2e,2o).
//!
//! Spin-orbitals use blocked ordering: with `M = n_qubits / 2` spatial orbitals,
//! qubits `0..M` are spin-up and `M..2M` spin-down.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use crate::circuit::{Angle, Circuit, Gate};
use crate::error::{Result, VqeError};
use crate::pauli::{jordan_wigner, FermionTerm, Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnsatzFamily {
    RyRz,
    SwapRz,
    Uccsd,
    Givens,
}

impl AnsatzFamily {
    pub const ALL: [AnsatzFamily; 4] = [
        AnsatzFamily::RyRz,
        AnsatzFamily::SwapRz,
        AnsatzFamily::Uccsd,
        AnsatzFamily::Givens,
    ];

    /// Whether every circuit of the family stays in the reference particle-number sector.
    pub fn conserves_particles(self) -> bool {
        !matches!(self, AnsatzFamily::RyRz)
    }

    pub fn is_hardware_efficient(self) -> bool {
        matches!(self, AnsatzFamily::RyRz | AnsatzFamily::SwapRz)
    }

    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::RyRz => "ryrz",
            AnsatzFamily::SwapRz => "swaprz",
            AnsatzFamily::Uccsd => "uccsd",
            AnsatzFamily::Givens => "givens",
        }
    }
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzFamily {
    type Err = VqeError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ryrz" => Ok(AnsatzFamily::RyRz),
            "swaprz" => Ok(AnsatzFamily::SwapRz),
            "uccsd" => Ok(AnsatzFamily::Uccsd),
            "givens" => Ok(AnsatzFamily::Givens),
            other => Err(VqeError::Contract(format!(
                "unknown ansatz family '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Entanglement {
    /// Every pair `(i, j)`, `i < j`, in ascending order.
    #[default]
    Full,
    /// Nearest neighbours `(i, i+1)`.
    Linear,
}

impl Entanglement {
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        match self {
            Entanglement::Full => (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .collect(),
            Entanglement::Linear => (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        }
    }
}

impl FromStr for Entanglement {
    type Err = VqeError;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Entanglement::Full),
            "linear" => Ok(Entanglement::Linear),
            other => Err(VqeError::Contract(format!(
                "unknown entanglement '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub n_qubits: usize,
    pub n_electrons: usize,
    /// Rotation/entangler block repetitions; ignored for UCCSD and Givens.
    pub repetitions: usize,
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn new(family: AnsatzFamily, n_qubits: usize, n_electrons: usize) -> Self {
        Self {
            family,
            n_qubits,
            n_electrons,
            repetitions: 1,
            entanglement: Entanglement::Full,
        }
    }

    pub fn with_repetitions(mut self, r: usize) -> Self {
        self.repetitions = r;
        self
    }

    pub fn with_entanglement(mut self, e: Entanglement) -> Self {
        self.entanglement = e;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_electrons > self.n_qubits {
            return Err(VqeError::Contract(format!(
                "{} electrons exceed {} qubits",
                self.n_electrons, self.n_qubits
            )));
        }
        if self.family.is_hardware_efficient() && self.repetitions == 0 {
            return Err(VqeError::Contract(
                "hardware-efficient ansatz needs at least one repetition".into(),
            ));
        }
        if self.family != AnsatzFamily::RyRz && !self.n_qubits.is_multiple_of(2) {
            return Err(VqeError::Contract(
                "blocked spin ordering needs an even qubit count".into(),
            ));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Circuit> {
        match self.family {
            AnsatzFamily::RyRz => build_ryrz(self),
            AnsatzFamily::SwapRz => build_swaprz(self),
            AnsatzFamily::Uccsd => {
                let ex = uccsd_excitations(self.n_qubits, self.n_electrons)?;
                build_uccsd(self, &ex)
            }
            AnsatzFamily::Givens => build_givens(self),
        }
    }
}

fn expect_family(spec: &AnsatzSpec, family: AnsatzFamily) -> Result<()> {
    if spec.family != family {
        return Err(VqeError::Contract(format!(
            "{} builder called with a {} spec",
            family, spec.family
        )));
    }
    spec.validate()
}

/// X gates on the lowest `ceil(N/2)` spin-up and `floor(N/2)` spin-down qubits.
pub fn hf_reference(n_qubits: usize, n_electrons: usize) -> Result<Circuit> {
    let occ = hf_occupied(n_qubits, n_electrons)?;
    let mut c = Circuit::new(n_qubits, 0);
    c.extend(occ.into_iter().map(Gate::x))?;
    Ok(c)
}

/// Occupied spin-orbitals of the Hartree–Fock determinant, ascending.
pub fn hf_occupied(n_qubits: usize, n_electrons: usize) -> Result<Vec<usize>> {
    if !n_qubits.is_multiple_of(2) || n_electrons > n_qubits {
        return Err(VqeError::Contract(format!(
            "no closed blocked reference for {n_electrons} electrons on {n_qubits} qubits"
        )));
    }
    let m = n_qubits / 2;
    let n_up = n_electrons.div_ceil(2);
    let n_down = n_electrons / 2;
    Ok((0..n_up).chain(m..m + n_down).collect())
}

/// Index of the Hartree–Fock basis state.
pub fn hf_index(n_qubits: usize, n_electrons: usize) -> Result<usize> {
    Ok(hf_occupied(n_qubits, n_electrons)?
        .into_iter()
        .fold(0usize, |acc, q| acc | (1 << q)))
}

fn push_layer(c: &mut Circuit, n: usize, make: impl Fn(usize, Angle) -> Gate) -> Result<()> {
    for q in 0..n {
        let p = c.add_parameter();
        c.push(make(q, Angle::param(p)))?;
    }
    Ok(())
}

/// `r × [Ry layer, Rz layer, CNOT layer]` plus a closing Ry+Rz layer; no reference preparation.
pub fn build_ryrz(spec: &AnsatzSpec) -> Result<Circuit> {
    expect_family(spec, AnsatzFamily::RyRz)?;
    let n = spec.n_qubits;
    let mut c = Circuit::new(n, 0);
    for _ in 0..spec.repetitions {
        push_layer(&mut c, n, Gate::ry)?;
        push_layer(&mut c, n, Gate::rz)?;
        for (i, j) in spec.entanglement.pairs(n) {
            c.push(Gate::cnot(i, j))?;
        }
    }
    push_layer(&mut c, n, Gate::ry)?;
    push_layer(&mut c, n, Gate::rz)?;
    Ok(c)
}

/// HF preparation, then `r × [Rz layer, RXXYY layer]` and a closing Rz layer.
pub fn build_swaprz(spec: &AnsatzSpec) -> Result<Circuit> {
    expect_family(spec, AnsatzFamily::SwapRz)?;
    let n = spec.n_qubits;
    let mut c = hf_reference(n, spec.n_electrons)?;
    for _ in 0..spec.repetitions {
        push_layer(&mut c, n, Gate::rz)?;
        for (i, j) in spec.entanglement.pairs(n) {
            let p = c.add_parameter();
            c.push(Gate::rxxyy(i, j, Angle::param(p)))?;
        }
    }
    push_layer(&mut c, n, Gate::rz)?;
    Ok(c)
}

/// Spin-preserving particle-hole excitation out of the HF determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Excitation {
    Single {
        from: usize,
        to: usize,
    },
    Double {
        from: (usize, usize),
        to: (usize, usize),
    },
}

impl Excitation {
    /// Generator `T - T^†` with `T = a_to^† a_from` or `a_a^† a_b^† a_j a_i`.
    pub fn generator(&self) -> Vec<FermionTerm> {
        let t = match *self {
            Excitation::Single { from, to } => FermionTerm::one_body(1.0, to, from),
            Excitation::Double {
                from: (i, j),
                to: (a, b),
            } => FermionTerm::two_body(1.0, a, b, j, i),
        };
        let mut dag = t.adjoint();
        dag.coefficient = -1.0;
        vec![t, dag]
    }

    fn indices(&self) -> Vec<usize> {
        match *self {
            Excitation::Single { from, to } => vec![from, to],
            Excitation::Double { from, to } => vec![from.0, from.1, to.0, to.1],
        }
    }
}

/// Singles (ascending), then doubles, all spin-preserving.
pub fn uccsd_excitations(n_qubits: usize, n_electrons: usize) -> Result<Vec<Excitation>> {
    let occ = hf_occupied(n_qubits, n_electrons)?;
    let m = n_qubits / 2;
    let virt: Vec<usize> = (0..n_qubits).filter(|q| !occ.contains(q)).collect();
    let spin = |q: usize| q >= m;

    let mut out = Vec::new();
    for &i in &occ {
        for &a in &virt {
            if spin(i) == spin(a) {
                out.push(Excitation::Single { from: i, to: a });
            }
        }
    }
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in virt.iter().enumerate() {
                for &b in &virt[y + 1..] {
                    let up_from = [i, j].iter().filter(|&&q| !spin(q)).count();
                    let up_to = [a, b].iter().filter(|&&q| !spin(q)).count();
                    if up_from == up_to {
                        out.push(Excitation::Double {
                            from: (i, j),
                            to: (a, b),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Gates for `exp(-iφP/2)` with `φ = angle`: basis change, CNOT staircase, Rz, reverse.
pub fn pauli_rotation_gates(p: &PauliString, angle: Angle) -> Vec<Gate> {
    let support: Vec<usize> = (0..p.n_qubits())
        .filter(|&q| p.letter(q) != Pauli::I)
        .collect();
    let Some(&last) = support.last() else {
        return Vec::new();
    };
    let mut pre = Vec::new();
    let mut post = Vec::new();
    for &q in &support {
        match p.letter(q) {
            Pauli::X => {
                pre.push(Gate::h(q));
                post.push(Gate::h(q));
            }
            Pauli::Y => {
                pre.push(Gate::rz(q, Angle::Fixed(-FRAC_PI_2)));
                pre.push(Gate::h(q));
                post.push(Gate::h(q));
                post.push(Gate::rz(q, Angle::Fixed(FRAC_PI_2)));
            }
            _ => {}
        }
    }
    let ladder: Vec<Gate> = support.windows(2).map(|w| Gate::cnot(w[0], w[1])).collect();
    let mut gates = pre;
    gates.extend(ladder.iter().copied());
    gates.push(Gate::rz(last, angle));
    gates.extend(ladder.iter().rev().copied());
    gates.extend(post);
    gates
}

/// HF preparation, then one first-order Trotter step of `exp(Σ t_k (T_k - T_k^†))`,
/// one parameter per excitation.
pub fn build_uccsd(spec: &AnsatzSpec, excitations: &[Excitation]) -> Result<Circuit> {
    expect_family(spec, AnsatzFamily::Uccsd)?;
    let n = spec.n_qubits;
    let mut c = hf_reference(n, spec.n_electrons)?;
    for ex in excitations {
        if let Some(&q) = ex.indices().iter().find(|&&q| q >= n) {
            return Err(VqeError::Contract(format!(
                "excitation index {q} outside the {n}-spin-orbital active space"
            )));
        }
        let p = c.add_parameter();
        let generator = jordan_wigner(&ex.generator(), n)?;
        // generator = Σ i c_k P_k, so exp(t·G) = Π exp(-i(-2 c_k t) P_k / 2)
        for term in generator.terms() {
            debug_assert!(term.coefficient.re.abs() < 1e-12);
            let angle = Angle::Param {
                index: p,
                scale: -2.0 * term.coefficient.im,
                offset: 0.0,
            };
            c.extend(pauli_rotation_gates(&term.string, angle))?;
        }
    }
    Ok(c)
}

/// The hop-gate circuit for CAS(2e,2o) on 4 qubits, 2 parameters.
///
/// `X(q0)`, `Hop(θ0)` on (q0,q1) mixes HF with the spin-up excitation, the CNOTs
/// (q1→q3), (q0→q2) copy spin-up occupation onto spin-down (giving HF + double),
/// and `Hop(θ1)` on (q0,q1) and (q2,q3) with a shared parameter adds the singles.
pub fn build_givens(spec: &AnsatzSpec) -> Result<Circuit> {
    expect_family(spec, AnsatzFamily::Givens)?;
    if spec.n_qubits != 4 || spec.n_electrons != 2 {
        return Err(VqeError::Contract(format!(
            "Givens circuit is defined for CAS(2e,2o) only, got {} qubits / {} electrons",
            spec.n_qubits, spec.n_electrons
        )));
    }
    let mut c = Circuit::new(4, 2);
    c.extend([
        Gate::x(0),
        Gate::hop(0, 1, Angle::param(0)),
        Gate::cnot(1, 3),
        Gate::cnot(0, 2),
        Gate::hop(0, 1, Angle::param(1)),
        Gate::hop(2, 3, Angle::param(1)),
    ])?;
    Ok(c)
}
