use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Result, VqeError};

/// Asymmetric bit-flip probabilities of one qubit's measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReadoutError {
    /// P(read 1 | prepared 0)
    pub p01: f64,
    /// P(read 0 | prepared 1)
    pub p10: f64,
}

impl ReadoutError {
    pub const NONE: ReadoutError = ReadoutError { p01: 0.0, p10: 0.0 };

    pub fn symmetric(p: f64) -> Self {
        Self { p01: p, p10: p }
    }

    /// Column-stochastic confusion matrix `M[read][prepared]`.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }
}

/// Depolarizing gate noise plus readout flips.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub p1: f64,
    pub p2: f64,
    pub readout: ReadoutError,
    /// Per-qubit readout overrides.
    pub readout_overrides: BTreeMap<usize, ReadoutError>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            p1: 0.001,
            p2: 0.01,
            readout: ReadoutError::symmetric(0.02),
            readout_overrides: BTreeMap::new(),
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            p1: 0.0,
            p2: 0.0,
            readout: ReadoutError::NONE,
            readout_overrides: BTreeMap::new(),
        }
    }

    pub fn readout_for(&self, qubit: usize) -> ReadoutError {
        self.readout_overrides
            .get(&qubit)
            .copied()
            .unwrap_or(self.readout)
    }

    pub fn readout_errors(&self, n_qubits: usize) -> Vec<ReadoutError> {
        (0..n_qubits).map(|q| self.readout_for(q)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let mut all = vec![("p1", self.p1), ("p2", self.p2)];
        for r in std::iter::once(&self.readout).chain(self.readout_overrides.values()) {
            all.push(("readout_p01", r.p01));
            all.push(("readout_p10", r.p10));
        }
        for (name, p) in all {
            if !(0.0..=1.0).contains(&p) {
                return Err(VqeError::Contract(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines. Keys: `p1`, `p2`, `readout` (symmetric), `readout_p01`,
    /// `readout_p10`; the readout keys accept a `[q]` suffix for one qubit. `#` comments.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut model = NoiseModel::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .or_else(|| line.split_once(':'))
                .ok_or_else(|| VqeError::parse(line_no, "expected 'key = value'"))?;
            let key = key.trim().to_ascii_lowercase();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| VqeError::parse(line_no, format!("bad value for {key}")))?;
            if !(0.0..=1.0).contains(&value) {
                return Err(VqeError::parse(
                    line_no,
                    format!("{key} = {value} outside [0, 1]"),
                ));
            }
            let (base, qubit) = match key.split_once('[') {
                Some((b, rest)) => {
                    let q = rest
                        .strip_suffix(']')
                        .and_then(|s| s.trim().parse::<usize>().ok())
                        .ok_or_else(|| VqeError::parse(line_no, format!("bad qubit in {key}")))?;
                    (b.trim().to_string(), Some(q))
                }
                None => (key.clone(), None),
            };
            match (base.as_str(), qubit) {
                ("p1", None) => model.p1 = value,
                ("p2", None) => model.p2 = value,
                ("readout", _) => *readout_slot(&mut model, qubit) = ReadoutError::symmetric(value),
                ("readout_p01", _) => readout_slot(&mut model, qubit).p01 = value,
                ("readout_p10", _) => readout_slot(&mut model, qubit).p10 = value,
                _ => return Err(VqeError::parse(line_no, format!("unknown key '{key}'"))),
            }
        }
        Ok(model)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn readout_slot(m: &mut NoiseModel, qubit: Option<usize>) -> &mut ReadoutError {
    match qubit {
        Some(q) => {
            let default = m.readout;
            m.readout_overrides.entry(q).or_insert(default)
        }
        None => &mut m.readout,
    }
}
