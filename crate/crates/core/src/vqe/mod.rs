//! Cost evaluation, parameter-shift gradients, optimisers and the VQE driver.

mod cost;
mod gradient;
mod optimizer;

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use cost::{
    cost, measurement_basis_gates, parity_expectation, qwc_groups, CostFunction, CostKind,
    CostValue, ExecutionMode,
};
pub use gradient::{parameter_shift_gradient, RotationProgram};
pub use optimizer::{Bfgs, NelderMead, Objective, OptimResult, Termination};

use crate::ansatz::AnsatzSpec;
use crate::circuit::Circuit;
use crate::error::{Result, VqeError};
use crate::pauli::PauliSum;

/// Chemical accuracy in hartree.
pub const CHEMICAL_ACCURACY: f64 = 1.6e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum InitStrategy {
    Zeros,
    /// Uniform in `[-scale, scale]`.
    Random {
        seed: u64,
        scale: f64,
    },
    Given(Vec<f64>),
}

impl InitStrategy {
    pub fn random(seed: u64) -> Self {
        InitStrategy::Random { seed, scale: 0.1 }
    }

    pub fn parameters(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            InitStrategy::Zeros => Ok(vec![0.0; n]),
            InitStrategy::Random { seed, scale } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..n).map(|_| rng.random_range(-*scale..=*scale)).collect())
            }
            InitStrategy::Given(v) if v.len() == n => Ok(v.clone()),
            InitStrategy::Given(v) => Err(VqeError::Binding(format!(
                "{} initial parameters for a {n}-parameter circuit",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OptimizerKind {
    /// BFGS in exact mode, Nelder–Mead otherwise.
    #[default]
    Auto,
    Simplex,
    QuasiNewton,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeConfig {
    pub ansatz: AnsatzSpec,
    pub optimizer: OptimizerKind,
    pub mu: f64,
    pub cost_kind: CostKind,
    pub init: InitStrategy,
    pub max_evaluations: usize,
    /// Energy-change tolerance; defaults to 1e-9 (exact) or 1e-5 (sampled/noisy).
    pub tolerance: Option<f64>,
    pub mode: ExecutionMode,
    /// Permit `μ = 0` with a family that does not conserve particle number.
    pub allow_unpenalized: bool,
}

impl VqeConfig {
    pub fn new(ansatz: AnsatzSpec) -> Self {
        Self {
            ansatz,
            optimizer: OptimizerKind::Auto,
            mu: 0.0,
            cost_kind: CostKind::Penalized,
            init: InitStrategy::Zeros,
            max_evaluations: 5000,
            tolerance: None,
            mode: ExecutionMode::Exact,
            allow_unpenalized: false,
        }
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
            .unwrap_or(if self.mode.is_exact() { 1e-9 } else { 1e-5 })
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        if self.mu == 0.0
            && !self.ansatz.family.conserves_particles()
            && self.cost_kind == CostKind::Penalized
            && !self.allow_unpenalized
        {
            return Err(VqeError::Contract(format!(
                "{} does not conserve particle number; set a penalty weight, use the projected cost, or override",
                self.ansatz.family
            )));
        }
        if self.optimizer == OptimizerKind::QuasiNewton && !self.mode.is_exact() {
            return Err(VqeError::Contract(
                "the gradient-based optimizer needs exact mode".into(),
            ));
        }
        Ok(())
    }
}

/// One cost evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    pub energy: f64,
    pub penalty: f64,
    pub cost: f64,
    /// Set when the optimiser moved to this point.
    pub accepted: bool,
    pub parameters: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeTrace {
    pub records: Vec<TraceRecord>,
    pub final_energy: f64,
    pub final_penalty: f64,
    pub final_parameters: Vec<f64>,
    pub termination: Termination,
    pub gradient_evaluations: usize,
}

impl VqeTrace {
    pub fn evaluations(&self) -> usize {
        self.records.len()
    }

    pub fn accepted(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records.iter().filter(|r| r.accepted)
    }

    /// Cost evaluations spent before the first accepted point within `tol` of `target`.
    pub fn evaluations_to_reach(&self, target: f64, tol: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.accepted && (r.energy - target).abs() <= tol)
            .map(|r| r.iteration + 1)
    }

    /// `iter,energy_ha,penalty,p0,p1,…`
    pub fn to_csv(&self) -> String {
        let n = self.final_parameters.len();
        let mut out = String::from("iter,energy_ha,penalty");
        for k in 0..n {
            let _ = write!(out, ",p{k}");
        }
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},{:.12},{:.6e}", r.iteration, r.energy, r.penalty);
            for p in &r.parameters {
                let _ = write!(out, ",{p:.10}");
            }
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

struct Traced<'a> {
    cost: &'a mut CostFunction,
    records: Vec<TraceRecord>,
    gradient_evaluations: usize,
}

impl Objective for Traced<'_> {
    fn value(&mut self, x: &[f64]) -> Result<(usize, f64)> {
        let v = self.cost.evaluate(x)?;
        let id = self.records.len();
        self.records.push(TraceRecord {
            iteration: id,
            energy: v.energy,
            penalty: v.penalty,
            cost: v.total,
            accepted: false,
            parameters: x.to_vec(),
        });
        Ok((id, v.total))
    }

    fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient_evaluations += 1;
        let g = self.cost.gradient(x)?;
        if g.iter().any(|v| !v.is_finite()) {
            return Err(VqeError::numerical("non-finite gradient"));
        }
        Ok(g)
    }

    fn accept(&mut self, id: usize) {
        if let Some(r) = self.records.get_mut(id) {
            r.accepted = true;
        }
    }
}

fn attach_trace(err: VqeError, records: &[TraceRecord], gradient_evaluations: usize) -> VqeError {
    match err {
        VqeError::Numerical {
            message,
            trace: None,
        } => {
            let last = records.last();
            VqeError::Numerical {
                message,
                trace: Some(Box::new(VqeTrace {
                    records: records.to_vec(),
                    final_energy: last.map_or(f64::NAN, |r| r.energy),
                    final_penalty: last.map_or(f64::NAN, |r| r.penalty),
                    final_parameters: last.map(|r| r.parameters.clone()).unwrap_or_default(),
                    termination: Termination::LineSearchFailed,
                    gradient_evaluations,
                })),
            }
        }
        other => other,
    }
}

/// Build the configured ansatz and optimise it.
pub fn minimize(
    config: &VqeConfig,
    hamiltonian: &PauliSum,
    penalty: &PauliSum,
) -> Result<VqeTrace> {
    config.validate()?;
    let circuit = config.ansatz.build()?;
    minimize_circuit(config, &circuit, hamiltonian, penalty)
}

/// Optimise an explicit circuit; `config.ansatz` supplies only the electron count and family checks.
pub fn minimize_circuit(
    config: &VqeConfig,
    circuit: &Circuit,
    hamiltonian: &PauliSum,
    penalty: &PauliSum,
) -> Result<VqeTrace> {
    config.validate()?;
    let mut cost = CostFunction::new(
        circuit,
        hamiltonian,
        penalty,
        config.mu,
        config.cost_kind,
        config.mode.clone(),
        config.ansatz.n_electrons,
    )?;
    let x0 = config.init.parameters(circuit.n_parameters())?;
    let tol = config.tolerance();
    let use_gradient = match config.optimizer {
        OptimizerKind::Auto => config.mode.is_exact(),
        OptimizerKind::QuasiNewton => true,
        OptimizerKind::Simplex => false,
    };

    let mut traced = Traced {
        cost: &mut cost,
        records: Vec::new(),
        gradient_evaluations: 0,
    };
    let result = if use_gradient {
        Bfgs {
            ftol: tol,
            max_evaluations: config.max_evaluations,
            ..Bfgs::default()
        }
        .minimize(&mut traced, &x0)
    } else {
        NelderMead {
            ftol: tol,
            xtol: if config.mode.is_exact() { 1e-6 } else { 1e-3 },
            max_evaluations: config.max_evaluations,
            ..NelderMead::default()
        }
        .minimize(&mut traced, &x0)
    };
    let result = match result {
        Ok(r) => r,
        Err(e) => {
            return Err(attach_trace(
                e,
                &traced.records,
                traced.gradient_evaluations,
            ))
        }
    };

    let gradient_evaluations = traced.gradient_evaluations;
    let mut records = std::mem::take(&mut traced.records);
    let best = records
        .iter()
        .filter(|r| r.parameters == result.x)
        .min_by(|a, b| a.cost.total_cmp(&b.cost))
        .cloned()
        .expect("optimum was evaluated");
    let (final_energy, final_penalty) = if config.mode.is_exact() {
        (best.energy, best.penalty)
    } else {
        // fresh shots at the optimum, free of the selection bias of the best vertex
        let v = cost
            .evaluate(&result.x)
            .map_err(|e| attach_trace(e, &records, gradient_evaluations))?;
        records.push(TraceRecord {
            iteration: records.len(),
            energy: v.energy,
            penalty: v.penalty,
            cost: v.total,
            accepted: false,
            parameters: result.x.clone(),
        });
        (v.energy, v.penalty)
    };
    Ok(VqeTrace {
        records,
        final_energy,
        final_penalty,
        final_parameters: result.x,
        termination: result.termination,
        gradient_evaluations,
    })
}
