use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, VqeError};

/// Largest register a [`PauliString`] can describe (one bit per qubit in a `u64`).
pub const MAX_PAULI_QUBITS: usize = 64;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | 'i' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// Tensor product of single-qubit Paulis in symplectic form.
///
/// Bit `q` of `x` is set for X or Y on qubit `q`, bit `q` of `z` for Z or Y.
/// The operator is `i^{|x & z|} X^x Z^z`, so every string is Hermitian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_PAULI_QUBITS, "at most 64 qubits");
        Self {
            n_qubits,
            x: 0,
            z: 0,
        }
    }

    pub fn from_masks(n_qubits: usize, x: u64, z: u64) -> Result<Self> {
        if n_qubits > MAX_PAULI_QUBITS {
            return Err(VqeError::Size(format!(
                "{n_qubits} qubits exceeds the {MAX_PAULI_QUBITS}-qubit Pauli limit"
            )));
        }
        let mask = low_mask(n_qubits);
        if (x | z) & !mask != 0 {
            return Err(VqeError::Size(format!(
                "bitmask touches qubits beyond n_qubits = {n_qubits}"
            )));
        }
        Ok(Self { n_qubits, x, z })
    }

    /// Single-letter string `p` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        Self::from_letters(n_qubits, &[(qubit, p)])
    }

    pub fn from_letters(n_qubits: usize, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        for &(q, p) in letters {
            if q >= n_qubits {
                return Err(VqeError::Size(format!(
                    "qubit {q} out of range for {n_qubits} qubits"
                )));
            }
            let (bx, bz) = p.bits();
            let bit = 1u64 << q;
            x = (x & !bit) | if bx { bit } else { 0 };
            z = (z & !bit) | if bz { bit } else { 0 };
        }
        Self::from_masks(n_qubits, x, z)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let bx = (self.x >> qubit) & 1 == 1;
        let bz = (self.z >> qubit) & 1 == 1;
        match (bx, bz) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Number of Y letters; the `i^{|x&z|}` factor in the symplectic form.
    pub(crate) fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// True when the two strings agree letter-by-letter wherever both are non-identity.
    pub fn qubit_wise_commutes(&self, other: &PauliString) -> bool {
        let both = self.support() & other.support();
        (self.x ^ other.x) & both == 0 && (self.z ^ other.z) & both == 0
    }

    /// `self · other = i^k · product`; returns `(k mod 4, product)`.
    pub(crate) fn mul_exponent(&self, other: &PauliString) -> (u32, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let product = PauliString {
            n_qubits: self.n_qubits,
            x,
            z,
        };
        // i^{a} X^{x1}Z^{z1} i^{b} X^{x2}Z^{z2} = i^{a+b} (-1)^{|z1 & x2|} X^{x}Z^{z}
        let k = self.y_count() as i64 + other.y_count() as i64 - product.y_count() as i64
            + 2 * (self.z & other.x).count_ones() as i64;
        (k.rem_euclid(4) as u32, product)
    }

    /// Action on a computational basis state: `P|b> = phase · |b ^ x>`.
    pub fn apply_to_basis(&self, b: usize) -> (Complex64, usize) {
        let k = self.y_count() as usize + 2 * ((self.z & b as u64).count_ones() as usize);
        (i_pow(k as u32), b ^ self.x as usize)
    }
}

/// Pauli product with its phase: returns `(phase, product)` with `a · b = phase · product`.
pub fn multiply(a: &PauliString, b: &PauliString) -> Result<(Complex64, PauliString)> {
    if a.n_qubits != b.n_qubits {
        return Err(VqeError::Size(format!(
            "cannot multiply Pauli strings on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    let (k, p) = a.mul_exponent(b);
    Ok((i_pow(k), p))
}

pub(crate) fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Qubit 0 is written leftmost.
impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl std::str::FromStr for PauliString {
    type Err = VqeError;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .enumerate()
            .map(|(q, c)| {
                Pauli::from_char(c)
                    .map(|p| (q, p))
                    .ok_or_else(|| VqeError::parse(0, format!("invalid Pauli letter '{c}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_letters(letters.len(), &letters)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let (phase, p) = multiply(&ps("XI"), &ps("ZI")).unwrap();
        assert_eq!(phase, Complex64::new(0.0, -1.0));
        assert_eq!(p, ps("YI"));
    }

    #[test]
    fn identity_is_neutral() {
        let s = ps("XYZI");
        let (phase, p) = multiply(&PauliString::identity(4), &s).unwrap();
        assert_eq!(phase, Complex64::new(1.0, 0.0));
        assert_eq!(p, s);
    }

    #[test]
    fn y_squared_on_three_qubits() {
        let (phase, p) = multiply(&ps("YYY"), &ps("YYY")).unwrap();
        assert_eq!(phase, Complex64::new(1.0, 0.0));
        assert_eq!(p, ps("III"));
    }

    #[test]
    fn mismatched_sizes_rejected() {
        assert!(matches!(
            multiply(&ps("X"), &ps("XX")),
            Err(VqeError::Size(_))
        ));
    }

    #[test]
    fn display_round_trip() {
        for s in ["IXYZ", "ZZZZZ", "Y"] {
            assert_eq!(ps(s).to_string(), s);
        }
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn identity_has_zero_masks() {
        let id = PauliString::identity(5);
        assert_eq!((id.x_mask(), id.z_mask()), (0, 0));
        assert!(id.is_identity());
    }

    #[test]
    fn qubit_wise_commutation() {
        assert!(ps("XIZ").qubit_wise_commutes(&ps("XZI")));
        assert!(!ps("XI").qubit_wise_commutes(&ps("YI")));
        assert!(ps("XX").commutes_with(&ps("YY")));
        assert!(!ps("XX").qubit_wise_commutes(&ps("YY")));
    }
}
