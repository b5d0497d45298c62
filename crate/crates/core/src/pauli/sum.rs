use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::string::{i_pow, PauliString};
use crate::error::{Result, VqeError};

/// Coefficients at or below this magnitude are dropped by [`PauliSum::simplify`].
pub const DEFAULT_SIMPLIFY_THRESHOLD: f64 = 1e-12;

/// Largest register [`to_dense_matrix`] will expand.
pub const DEFAULT_DENSE_QUBIT_CAP: usize = 12;

/// Coefficients with imaginary part above this are treated as non-Hermitian.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coefficient: impl Into<Complex64>, string: PauliString) -> Self {
        Self {
            coefficient: coefficient.into(),
            string,
        }
    }
}

/// Weighted sum of Pauli strings on a common register.
///
/// Arithmetic results are always simplified, so a `PauliSum` never holds two
/// terms with the same string and its term order is canonical.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize, coefficient: impl Into<Complex64>) -> Self {
        Self::from_terms(
            n_qubits,
            [PauliTerm::new(coefficient, PauliString::identity(n_qubits))],
        )
        .expect("identity matches register")
    }

    pub fn from_terms(n_qubits: usize, terms: impl IntoIterator<Item = PauliTerm>) -> Result<Self> {
        let terms: Vec<PauliTerm> = terms.into_iter().collect();
        for t in &terms {
            if t.string.n_qubits() != n_qubits {
                return Err(VqeError::Size(format!(
                    "term on {} qubits in a {}-qubit sum",
                    t.string.n_qubits(),
                    n_qubits
                )));
            }
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(VqeError::Contract(format!(
                    "non-finite coefficient on {}",
                    t.string
                )));
            }
        }
        Ok(Self { n_qubits, terms }.simplify(DEFAULT_SIMPLIFY_THRESHOLD))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Merge like terms, drop |c| <= threshold, sort by bitmask.
    pub fn simplify(&self, threshold: f64) -> PauliSum {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry(t.string).or_insert(Complex64::new(0.0, 0.0)) += t.coefficient;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > threshold)
            .map(|(string, coefficient)| PauliTerm {
                coefficient,
                string,
            })
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> PauliSum {
        let f = factor.into();
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: t.coefficient * f,
                string: t.string,
            })
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_SIMPLIFY_THRESHOLD)
    }

    pub fn try_add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let terms = self.terms.iter().chain(&other.terms).copied().collect();
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_SIMPLIFY_THRESHOLD))
    }

    pub fn try_mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let (k, p) = a.string.mul_exponent(&b.string);
                *acc.entry(p).or_insert(Complex64::new(0.0, 0.0)) +=
                    a.coefficient * b.coefficient * i_pow(k);
            }
        }
        let terms = acc
            .into_iter()
            .map(|(string, coefficient)| PauliTerm {
                coefficient,
                string,
            })
            .collect();
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(DEFAULT_SIMPLIFY_THRESHOLD))
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(VqeError::Size(format!(
                "Pauli sums on {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(())
    }

    /// Adjoint: conjugate every coefficient (Pauli strings are Hermitian).
    pub fn adjoint(&self) -> PauliSum {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: t.coefficient.conj(),
                string: t.string,
            })
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.coefficient.im.abs() <= tol)
    }

    /// Coefficient of the identity string.
    pub fn constant(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.string.is_identity())
            .map(|t| t.coefficient)
            .unwrap_or_default()
    }

    /// Text form: optional `# qubits N` header, then `<re> <im> <string>` per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("# qubits {}\n", self.n_qubits);
        for t in &self.terms {
            let _ = writeln!(
                out,
                "{:e} {:e} {}",
                t.coefficient.re, t.coefficient.im, t.string
            );
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PauliSum> {
        let mut declared: Option<usize> = None;
        let mut terms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let mut it = comment.split_whitespace();
                if it.next() == Some("qubits") {
                    let n = it
                        .next()
                        .and_then(|v| v.parse().ok())
                        .ok_or_else(|| VqeError::parse(line_no, "bad '# qubits' header"))?;
                    declared = Some(n);
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(VqeError::parse(line_no, "expected '<re> <im> <string>'"));
            }
            let re: f64 = fields[0]
                .parse()
                .map_err(|_| VqeError::parse(line_no, format!("bad number '{}'", fields[0])))?;
            let im: f64 = fields[1]
                .parse()
                .map_err(|_| VqeError::parse(line_no, format!("bad number '{}'", fields[1])))?;
            let string: PauliString = fields[2]
                .parse()
                .map_err(|e: VqeError| VqeError::parse(line_no, e.to_string()))?;
            terms.push(PauliTerm::new(Complex64::new(re, im), string));
        }
        let n = match (declared, terms.first()) {
            (Some(n), _) => n,
            (None, Some(t)) => t.string.n_qubits(),
            (None, None) => {
                return Err(VqeError::parse(
                    0,
                    "empty Pauli sum without '# qubits' header",
                ))
            }
        };
        PauliSum::from_terms(n, terms)
    }
}

impl Add for &PauliSum {
    type Output = PauliSum;
    fn add(self, rhs: &PauliSum) -> PauliSum {
        self.try_add(rhs).expect("qubit counts must match")
    }
}

impl Sub for &PauliSum {
    type Output = PauliSum;
    fn sub(self, rhs: &PauliSum) -> PauliSum {
        self.try_add(&-rhs).expect("qubit counts must match")
    }
}

impl Mul for &PauliSum {
    type Output = PauliSum;
    fn mul(self, rhs: &PauliSum) -> PauliSum {
        self.try_mul(rhs).expect("qubit counts must match")
    }
}

impl Neg for &PauliSum {
    type Output = PauliSum;
    fn neg(self) -> PauliSum {
        self.scale(-1.0)
    }
}

/// Dense `2^n x 2^n` matrix, little-endian (qubit 0 is the least significant bit).
pub fn to_dense_matrix(s: &PauliSum) -> Result<DMatrix<Complex64>> {
    to_dense_matrix_capped(s, DEFAULT_DENSE_QUBIT_CAP)
}

pub fn to_dense_matrix_capped(s: &PauliSum, cap: usize) -> Result<DMatrix<Complex64>> {
    if s.n_qubits() > cap {
        return Err(VqeError::Resource(format!(
            "dense matrix of {} qubits exceeds cap {}",
            s.n_qubits(),
            cap
        )));
    }
    let dim = 1usize << s.n_qubits();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for t in s.terms() {
        for b in 0..dim {
            let (phase, out) = t.string.apply_to_basis(b);
            m[(out, b)] += t.coefficient * phase;
        }
    }
    Ok(m)
}
