use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, VqeError};

type C = Complex64;

const fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Gate vocabulary. `SX` only appears in basis-lowered circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    H,
    SX,
    Ry,
    Rz,
    Cnot,
    /// `exp(-iθ(XX+YY)/4)`: rotates within span{|01>, |10>}.
    Rxxyy,
    /// Particle-conserving hop: Givens rotation on span{|01>, |10>}, `-1` on `|11>`.
    Hop,
}

impl GateKind {
    pub fn is_parametric(self) -> bool {
        matches!(
            self,
            GateKind::Ry | GateKind::Rz | GateKind::Rxxyy | GateKind::Hop
        )
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Rxxyy | GateKind::Hop => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::SX => "SX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cnot => "CNOT",
            GateKind::Rxxyy => "RXXYY",
            GateKind::Hop => "HOP",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name.to_ascii_uppercase().as_str() {
            "X" => GateKind::X,
            "H" => GateKind::H,
            "SX" => GateKind::SX,
            "RY" => GateKind::Ry,
            "RZ" => GateKind::Rz,
            "CNOT" | "CX" => GateKind::Cnot,
            "RXXYY" => GateKind::Rxxyy,
            "HOP" => GateKind::Hop,
            _ => return None,
        })
    }
}

/// Rotation angle: a literal, or `scale · θ[index] + offset` against a shared parameter vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Fixed(f64),
    Param {
        index: usize,
        scale: f64,
        offset: f64,
    },
}

impl Angle {
    pub fn param(index: usize) -> Self {
        Angle::Param {
            index,
            scale: 1.0,
            offset: 0.0,
        }
    }

    pub fn bind(&self, params: &[f64]) -> Result<f64> {
        match *self {
            Angle::Fixed(v) => Ok(v),
            Angle::Param {
                index,
                scale,
                offset,
            } => params
                .get(index)
                .map(|t| scale * t + offset)
                .ok_or_else(|| {
                    VqeError::Binding(format!(
                        "parameter p{index} requested but only {} supplied",
                        params.len()
                    ))
                }),
        }
    }

    /// `factor · angle` (scale and offset both multiplied).
    pub fn scaled(&self, factor: f64) -> Self {
        match *self {
            Angle::Fixed(v) => Angle::Fixed(v * factor),
            Angle::Param {
                index,
                scale,
                offset,
            } => Angle::Param {
                index,
                scale: scale * factor,
                offset: offset * factor,
            },
        }
    }

    pub fn shifted(&self, delta: f64) -> Self {
        match *self {
            Angle::Fixed(v) => Angle::Fixed(v + delta),
            Angle::Param {
                index,
                scale,
                offset,
            } => Angle::Param {
                index,
                scale,
                offset: offset + delta,
            },
        }
    }

    pub fn param_index(&self) -> Option<usize> {
        match *self {
            Angle::Fixed(_) => None,
            Angle::Param { index, .. } => Some(index),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Fixed(v) => write!(f, "{v}"),
            Angle::Param {
                index,
                scale,
                offset,
            } => {
                write!(f, "p{index}")?;
                if scale != 1.0 || offset != 0.0 {
                    write!(f, ":{scale}")?;
                }
                if offset != 0.0 {
                    write!(f, ":{offset}")?;
                }
                Ok(())
            }
        }
    }
}

/// A gate bound to qubits. Two-qubit gates list their qubits in the order the
/// 4x4 matrix expects: the first target is the low bit of the local index
/// (and the control, for CNOT).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    targets: [usize; 2],
    pub angle: Option<Angle>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: &[usize], angle: Option<Angle>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(VqeError::Contract(format!(
                "{} takes {} qubit(s), got {}",
                kind.name(),
                kind.arity(),
                targets.len()
            )));
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(VqeError::Contract(format!(
                "{} needs two distinct qubits",
                kind.name()
            )));
        }
        if kind.is_parametric() != angle.is_some() {
            return Err(VqeError::Binding(format!(
                "{} {} an angle",
                kind.name(),
                if kind.is_parametric() {
                    "requires"
                } else {
                    "takes no"
                }
            )));
        }
        let second = if kind.arity() == 2 {
            targets[1]
        } else {
            targets[0]
        };
        Ok(Self {
            kind,
            targets: [targets[0], second],
            angle,
        })
    }

    pub fn x(q: usize) -> Self {
        Self::one(GateKind::X, q, None)
    }

    pub fn h(q: usize) -> Self {
        Self::one(GateKind::H, q, None)
    }

    pub fn sx(q: usize) -> Self {
        Self::one(GateKind::SX, q, None)
    }

    pub fn ry(q: usize, angle: Angle) -> Self {
        Self::one(GateKind::Ry, q, Some(angle))
    }

    pub fn rz(q: usize, angle: Angle) -> Self {
        Self::one(GateKind::Rz, q, Some(angle))
    }

    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, &[control, target], None).expect("distinct qubits")
    }

    /// Panics if `a == b`.
    pub fn rxxyy(a: usize, b: usize, angle: Angle) -> Self {
        Self::new(GateKind::Rxxyy, &[a, b], Some(angle)).expect("distinct qubits")
    }

    /// Panics if `a == b`.
    pub fn hop(a: usize, b: usize, angle: Angle) -> Self {
        Self::new(GateKind::Hop, &[a, b], Some(angle)).expect("distinct qubits")
    }

    fn one(kind: GateKind, q: usize, angle: Option<Angle>) -> Self {
        Self {
            kind,
            targets: [q, q],
            angle,
        }
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets[..self.kind.arity()]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    pub fn bound_angle(&self, params: &[f64]) -> Result<Option<f64>> {
        self.angle.map(|a| a.bind(params)).transpose()
    }

    /// Same gate acting on relabelled qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        Self {
            kind: self.kind,
            targets: [map(self.targets[0]), map(self.targets[1])],
            angle: self.angle,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    One([[C; 2]; 2]),
    Two([[C; 4]; 4]),
}

impl GateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::One(_) => 2,
            GateMatrix::Two(_) => 4,
        }
    }

    pub fn get(&self, r: usize, c: usize) -> C {
        match self {
            GateMatrix::One(m) => m[r][c],
            GateMatrix::Two(m) => m[r][c],
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            GateMatrix::One(m) => GateMatrix::One(m.map(|row| row.map(|v| v.conj()))),
            GateMatrix::Two(m) => GateMatrix::Two(m.map(|row| row.map(|v| v.conj()))),
        }
    }
}

pub(crate) fn ry_matrix(theta: f64) -> [[C; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
}

pub(crate) fn rz_matrix(theta: f64) -> [[C; 2]; 2] {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]]
}

/// Matrix of `kind` at an already-bound angle.
pub fn kind_matrix(kind: GateKind, angle: Option<f64>) -> Result<GateMatrix> {
    let need = |a: Option<f64>| {
        a.ok_or_else(|| VqeError::Binding(format!("{} needs a bound angle", kind.name())))
    };
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    Ok(match kind {
        GateKind::X => GateMatrix::One([[z, one], [one, z]]),
        GateKind::H => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            GateMatrix::One([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]])
        }
        GateKind::SX => GateMatrix::One([[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]]),
        GateKind::Ry => GateMatrix::One(ry_matrix(need(angle)?)),
        GateKind::Rz => GateMatrix::One(rz_matrix(need(angle)?)),
        GateKind::Cnot => {
            // control is the low local bit: |1,0> (index 1) <-> |1,1> (index 3)
            GateMatrix::Two([
                [one, z, z, z],
                [z, z, z, one],
                [z, z, one, z],
                [z, one, z, z],
            ])
        }
        GateKind::Rxxyy => {
            let (s, co) = (need(angle)? / 2.0).sin_cos();
            GateMatrix::Two([
                [one, z, z, z],
                [z, c(co, 0.0), c(0.0, -s), z],
                [z, c(0.0, -s), c(co, 0.0), z],
                [z, z, z, one],
            ])
        }
        GateKind::Hop => {
            let (s, co) = need(angle)?.sin_cos();
            GateMatrix::Two([
                [one, z, z, z],
                [z, c(co, 0.0), c(s, 0.0), z],
                [z, c(-s, 0.0), c(co, 0.0), z],
                [z, z, z, c(-1.0, 0.0)],
            ])
        }
    })
}

/// Matrix of `g` with its angle resolved against `params`.
pub fn gate_matrix(g: &Gate, params: &[f64]) -> Result<GateMatrix> {
    kind_matrix(g.kind, g.bound_angle(params)?)
}

/// Hop gate as `{H, Ry, CNOT}`, exact up to global phase.
///
/// The two-CNOT core `H_b · CX(b→a) · Ry(θ)⊗Ry(θ) · CX(b→a) · H_b` is the Givens
/// rotation (it leaves `|11>` alone); the trailing `CX(a→b)` folds in the
/// controlled-Z that supplies the `-1` on `|11>`. No two-CNOT circuit can
/// produce that phase as well.
pub fn hop_decomposition(a: usize, b: usize, angle: Angle) -> Vec<Gate> {
    vec![
        Gate::h(b),
        Gate::cnot(b, a),
        Gate::ry(a, angle),
        Gate::ry(b, angle),
        Gate::cnot(b, a),
        Gate::cnot(a, b),
        Gate::h(b),
    ]
}

/// `RXXYY(θ)` as two CNOTs, exact up to global phase.
pub fn rxxyy_decomposition(a: usize, b: usize, angle: Angle) -> Vec<Gate> {
    let half = angle.scaled(0.5);
    vec![
        Gate::h(a),
        Gate::rz(b, Angle::Fixed(FRAC_PI_2)),
        Gate::cnot(a, b),
        Gate::ry(a, half),
        Gate::ry(b, half),
        Gate::cnot(a, b),
        Gate::h(a),
        Gate::rz(b, Angle::Fixed(-FRAC_PI_2)),
    ]
}
