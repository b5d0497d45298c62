use std::f64::consts::FRAC_PI_2;

use crate::circuit::{gate_matrix, kernel, Angle, Circuit, Gate, GateKind, Statevector};
use crate::error::{Result, VqeError};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Debug, Clone)]
enum Step {
    Gate(Gate),
    /// `exp(-iφP/2)` with `φ` taken from the angle.
    Rotation(PauliString, Angle),
    Cz(usize, usize),
}

/// A circuit rewritten so every parameter enters only through Pauli rotations
/// `exp(-iφP/2)`, for which the two-point shift rule is exact.
#[derive(Debug, Clone)]
pub struct RotationProgram {
    n_qubits: usize,
    n_parameters: usize,
    steps: Vec<Step>,
}

impl RotationProgram {
    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        let n = circuit.n_qubits();
        let letters = |pairs: &[(usize, Pauli)]| PauliString::from_letters(n, pairs);
        let mut steps = Vec::new();
        for &g in circuit.gates() {
            let angle = match g.angle {
                Some(a @ Angle::Param { .. }) => a,
                _ => {
                    steps.push(Step::Gate(g));
                    continue;
                }
            };
            let t = g.targets();
            match g.kind {
                GateKind::Ry => steps.push(Step::Rotation(letters(&[(t[0], Pauli::Y)])?, angle)),
                GateKind::Rz => steps.push(Step::Rotation(letters(&[(t[0], Pauli::Z)])?, angle)),
                GateKind::Rxxyy => {
                    let half = angle.scaled(0.5);
                    steps.push(Step::Rotation(
                        letters(&[(t[0], Pauli::X), (t[1], Pauli::X)])?,
                        half,
                    ));
                    steps.push(Step::Rotation(
                        letters(&[(t[0], Pauli::Y), (t[1], Pauli::Y)])?,
                        half,
                    ));
                }
                GateKind::Hop => {
                    // Hop(θ) = CZ · exp(iθ(X_aY_b - Y_aX_b)/2)
                    steps.push(Step::Cz(t[0], t[1]));
                    steps.push(Step::Rotation(
                        letters(&[(t[0], Pauli::X), (t[1], Pauli::Y)])?,
                        angle.scaled(-1.0),
                    ));
                    steps.push(Step::Rotation(
                        letters(&[(t[0], Pauli::Y), (t[1], Pauli::X)])?,
                        angle,
                    ));
                }
                other => {
                    return Err(VqeError::Contract(format!(
                        "{} cannot carry a parameter",
                        other.name()
                    )))
                }
            }
        }
        Ok(Self {
            n_qubits: n,
            n_parameters: circuit.n_parameters(),
            steps,
        })
    }

    pub fn n_parameters(&self) -> usize {
        self.n_parameters
    }

    /// Final state from `|0…0>`, with `extra` added to the angle of step `shifted.0`.
    fn state(&self, params: &[f64], shifted: Option<(usize, f64)>) -> Result<Statevector> {
        if params.len() != self.n_parameters {
            return Err(VqeError::Binding(format!(
                "circuit has {} parameters, {} supplied",
                self.n_parameters,
                params.len()
            )));
        }
        let mut psi = Statevector::zero_state(self.n_qubits);
        for (i, step) in self.steps.iter().enumerate() {
            match step {
                Step::Gate(g) => {
                    let m = gate_matrix(g, params)?;
                    kernel::apply_matrix(psi.amplitudes_mut(), g.targets(), &m);
                }
                Step::Rotation(p, angle) => {
                    let mut phi = angle.bind(params)?;
                    if let Some((k, extra)) = shifted {
                        if k == i {
                            phi += extra;
                        }
                    }
                    psi.apply_pauli_rotation(p, phi);
                }
                Step::Cz(a, b) => {
                    let mask = (1usize << a) | (1usize << b);
                    for (idx, amp) in psi.amplitudes_mut().iter_mut().enumerate() {
                        if idx & mask == mask {
                            *amp = -*amp;
                        }
                    }
                }
            }
        }
        Ok(psi)
    }

    pub fn run(&self, params: &[f64]) -> Result<Statevector> {
        self.state(params, None)
    }

    /// Jacobian `J[k][j] = ∂f_k/∂θ_j` of the vector-valued quadratic form `f`.
    pub fn jacobian<F>(&self, params: &[f64], n_out: usize, f: F) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(&Statevector) -> Result<Vec<f64>>,
    {
        let mut jac = vec![vec![0.0; self.n_parameters]; n_out];
        for (i, step) in self.steps.iter().enumerate() {
            let Step::Rotation(_, Angle::Param { index, scale, .. }) = step else {
                continue;
            };
            if *scale == 0.0 {
                continue;
            }
            let plus = f(&self.state(params, Some((i, FRAC_PI_2)))?)?;
            let minus = f(&self.state(params, Some((i, -FRAC_PI_2)))?)?;
            for k in 0..n_out {
                jac[k][*index] += scale * (plus[k] - minus[k]) / 2.0;
            }
        }
        Ok(jac)
    }
}

/// `∂<H>/∂θ` by the parameter-shift rule, summed over every occurrence of each parameter.
pub fn parameter_shift_gradient(
    params: &[f64],
    observable: &PauliSum,
    circuit: &Circuit,
) -> Result<Vec<f64>> {
    let program = RotationProgram::from_circuit(circuit)?;
    if params.len() != program.n_parameters {
        return Err(VqeError::Binding(format!(
            "circuit has {} parameters, {} supplied",
            program.n_parameters,
            params.len()
        )));
    }
    let mut jac = program.jacobian(params, 1, |psi| Ok(vec![psi.expectation(observable)?]))?;
    Ok(jac.pop().expect("one output"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::run;
    use num_complex::Complex64;

    fn z() -> PauliSum {
        PauliSum::from_text("1 0 Z").unwrap()
    }

    #[test]
    fn ry_gradient_is_minus_sine() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::ry(0, Angle::param(0))).unwrap();
        assert!(parameter_shift_gradient(&[0.0], &z(), &c).unwrap()[0].abs() < 1e-15);
        let g = parameter_shift_gradient(&[FRAC_PI_2], &z(), &c).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn no_parameters_no_gradient() {
        let mut c = Circuit::new(1, 0);
        c.push(Gate::h(0)).unwrap();
        assert!(parameter_shift_gradient(&[], &z(), &c).unwrap().is_empty());
    }

    #[test]
    fn program_reproduces_gate_simulation() {
        let mut c = Circuit::new(2, 2);
        c.extend([
            Gate::x(0),
            Gate::h(1),
            Gate::hop(0, 1, Angle::param(0)),
            Gate::rxxyy(1, 0, Angle::param(1)),
            Gate::hop(
                1,
                0,
                Angle::Param {
                    index: 1,
                    scale: -0.7,
                    offset: 0.3,
                },
            ),
        ])
        .unwrap();
        let params = [0.37, -1.1];
        let a = run(&c, &params, &Statevector::zero_state(2)).unwrap();
        let b = RotationProgram::from_circuit(&c)
            .unwrap()
            .run(&params)
            .unwrap();
        assert!((a.inner(&b) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }
}
