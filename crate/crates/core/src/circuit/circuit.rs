use std::fmt::Write as _;

use super::gate::{Angle, Gate, GateKind};
use crate::error::{Result, VqeError};

/// Ordered gate list over `n_qubits` with `n_parameters` shared free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_parameters: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_parameters: usize) -> Self {
        Self {
            n_qubits,
            n_parameters,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_parameters(&self) -> usize {
        self.n_parameters
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Reserve a fresh parameter slot and return its index.
    pub fn add_parameter(&mut self) -> usize {
        self.n_parameters += 1;
        self.n_parameters - 1
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if let Some(&q) = g.targets().iter().find(|&&q| q >= self.n_qubits) {
            return Err(VqeError::Size(format!(
                "{} on qubit {q} in a {}-qubit circuit",
                g.kind.name(),
                self.n_qubits
            )));
        }
        if let Some(i) = g.angle.and_then(|a| a.param_index()) {
            if i >= self.n_parameters {
                return Err(VqeError::Binding(format!(
                    "reference p{i} beyond {} parameters",
                    self.n_parameters
                )));
            }
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        gates.into_iter().try_for_each(|g| self.push(g))
    }

    /// Append `other`'s gates; parameter references are shared, not offset.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(VqeError::Size(format!(
                "cannot append a {}-qubit circuit to a {}-qubit one",
                other.n_qubits, self.n_qubits
            )));
        }
        self.n_parameters = self.n_parameters.max(other.n_parameters);
        self.extend(other.gates.iter().copied())
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub(crate) fn from_parts(n_qubits: usize, n_parameters: usize, gates: Vec<Gate>) -> Self {
        Self {
            n_qubits,
            n_parameters,
            gates,
        }
    }

    /// Line-oriented text: `qubits N params M` header, then one gate per line,
    /// e.g. `HOP q0 q1 p0`, `RY q2 0.5`, `RZ q3 p4:0.5:1.5707963267948966`.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {} params {}\n", self.n_qubits, self.n_parameters);
        for g in &self.gates {
            out.push_str(g.kind.name());
            for q in g.targets() {
                let _ = write!(out, " q{q}");
            }
            if let Some(a) = g.angle {
                let _ = write!(out, " {a}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some(c) = circuit.as_mut() else {
                circuit = Some(parse_header(&fields, line_no)?);
                continue;
            };
            let kind = GateKind::from_name(fields[0]).ok_or_else(|| {
                VqeError::parse(line_no, format!("unknown gate kind '{}'", fields[0]))
            })?;
            let expected = kind.arity() + kind.is_parametric() as usize + 1;
            if fields.len() != expected {
                return Err(VqeError::parse(
                    line_no,
                    format!("{} expects {} fields", kind.name(), expected),
                ));
            }
            let targets = fields[1..1 + kind.arity()]
                .iter()
                .map(|f| parse_qubit(f, line_no))
                .collect::<Result<Vec<_>>>()?;
            let angle = if kind.is_parametric() {
                Some(parse_angle(fields[expected - 1], line_no)?)
            } else {
                None
            };
            let g = Gate::new(kind, &targets, angle)
                .map_err(|e| VqeError::parse(line_no, e.to_string()))?;
            c.push(g)
                .map_err(|e| VqeError::parse(line_no, e.to_string()))?;
        }
        circuit.ok_or_else(|| VqeError::parse(0, "missing 'qubits N params M' header"))
    }
}

fn parse_header(fields: &[&str], line_no: usize) -> Result<Circuit> {
    match fields {
        ["qubits", n, "params", m] => {
            let n = n
                .parse()
                .map_err(|_| VqeError::parse(line_no, "bad qubit count"))?;
            let m = m
                .parse()
                .map_err(|_| VqeError::parse(line_no, "bad parameter count"))?;
            Ok(Circuit::new(n, m))
        }
        _ => Err(VqeError::parse(
            line_no,
            "expected header 'qubits N params M'",
        )),
    }
}

fn parse_qubit(f: &str, line_no: usize) -> Result<usize> {
    f.strip_prefix('q')
        .unwrap_or(f)
        .parse()
        .map_err(|_| VqeError::parse(line_no, format!("bad qubit '{f}'")))
}

fn parse_angle(f: &str, line_no: usize) -> Result<Angle> {
    let bad = || VqeError::parse(line_no, format!("bad angle '{f}'"));
    if let Some(rest) = f.strip_prefix('p') {
        let mut parts = rest.split(':');
        let index = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let scale = match parts.next() {
            Some(s) => s.parse().map_err(|_| bad())?,
            None => 1.0,
        };
        let offset = match parts.next() {
            Some(s) => s.parse().map_err(|_| bad())?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Angle::Param {
            index,
            scale,
            offset,
        })
    } else {
        f.parse().map(Angle::Fixed).map_err(|_| bad())
    }
}
