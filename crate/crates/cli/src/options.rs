//! Flag groups shared by subcommands and the small string formats they accept.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};

use vqe_core::scan::{default_config, ActiveWindow};
use vqe_core::vqe::CostKind;
use vqe_core::{
    ActiveSpaceHamiltonian, AnsatzFamily, CouplingMap, Entanglement, ExecutionMode, InitStrategy,
    IntegralSet, NoiseModel, PenaltyForm, VqeConfig,
};

#[derive(Args, Debug, Clone, Default)]
pub struct WindowArgs {
    /// Zero-based orbitals to freeze as doubly occupied core, e.g. "0,1".
    #[arg(long, value_delimiter = ',')]
    pub frozen: Vec<usize>,
    /// Zero-based active orbitals, e.g. "2,3". Defaults to every unfrozen orbital.
    #[arg(long, value_delimiter = ',')]
    pub active: Option<Vec<usize>>,
    /// Active electron count (overrides the value implied by the FCIDUMP header).
    #[arg(long)]
    pub nelec: Option<usize>,
}

impl WindowArgs {
    pub fn window(&self) -> ActiveWindow {
        ActiveWindow {
            frozen: self.frozen.clone(),
            active: self.active.clone(),
            n_electrons: self.nelec,
        }
    }

    pub fn load(&self, fcidump: &Path) -> Result<ActiveSpaceHamiltonian> {
        let ints = IntegralSet::from_fcidump_file(fcidump)
            .with_context(|| format!("reading {}", fcidump.display()))?;
        Ok(self.window().apply(&ints)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EntanglementArg {
    Full,
    Linear,
}

impl From<EntanglementArg> for Entanglement {
    fn from(e: EntanglementArg) -> Self {
        match e {
            EntanglementArg::Full => Entanglement::Full,
            EntanglementArg::Linear => Entanglement::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum PenaltyFormArg {
    #[default]
    Squared,
    Linear,
}

impl From<PenaltyFormArg> for PenaltyForm {
    fn from(p: PenaltyFormArg) -> Self {
        match p {
            PenaltyFormArg::Squared => PenaltyForm::Squared,
            PenaltyFormArg::Linear => PenaltyForm::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, ValueEnum)]
pub enum CostArg {
    #[default]
    Penalized,
    Projected,
}

/// Optimisation settings layered over the per-family defaults.
#[derive(Args, Debug, Clone, Default)]
pub struct VqeArgs {
    /// Circuit repetitions for the hardware-efficient families.
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, value_enum)]
    pub entanglement: Option<EntanglementArg>,
    /// Particle-number penalty weight.
    #[arg(long)]
    pub mu: Option<f64>,
    /// zeros | random:SEED
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long, value_enum, default_value_t)]
    pub penalty_form: PenaltyFormArg,
    /// `projected` minimises the energy of the state projected onto the electron sector (exact mode).
    #[arg(long, value_enum, default_value_t)]
    pub cost: CostArg,
    #[arg(long)]
    pub max_evaluations: Option<usize>,
    /// Apply inverse-confusion readout correction in noisy mode.
    #[arg(long)]
    pub mitigate_readout: bool,
}

impl VqeArgs {
    pub fn config(
        &self,
        family: AnsatzFamily,
        h: &ActiveSpaceHamiltonian,
        mode: ExecutionMode,
    ) -> Result<VqeConfig> {
        let mut c = default_config(family, h.n_qubits(), h.n_electrons(), mode);
        if let Some(r) = self.reps {
            c.ansatz = c.ansatz.with_repetitions(r);
        }
        if let Some(e) = self.entanglement {
            c.ansatz = c.ansatz.with_entanglement(e.into());
        }
        if let Some(mu) = self.mu {
            c.mu = mu;
        }
        if let Some(init) = &self.init {
            c.init = parse_init(init)?;
        }
        if let Some(n) = self.max_evaluations {
            c.max_evaluations = n;
        }
        if let CostArg::Projected = self.cost {
            c.cost_kind = CostKind::Projected;
        }
        Ok(c)
    }

    pub fn mode(&self, text: &str) -> Result<ExecutionMode> {
        parse_mode(text, self.mitigate_readout)
    }
}

pub fn parse_init(text: &str) -> Result<InitStrategy> {
    match text.split_once(':') {
        None if text == "zeros" => Ok(InitStrategy::Zeros),
        Some(("random", seed)) => Ok(InitStrategy::random(
            seed.parse().context("random:SEED needs an integer seed")?,
        )),
        _ => bail!("--init expects zeros or random:SEED, got '{text}'"),
    }
}

/// `exact`, `sampled:SHOTS:SEED` or `noisy:MODELFILE:SHOTS:SEED`; `default` as MODELFILE uses the
/// built-in noise model.
pub fn parse_mode(text: &str, mitigate_readout: bool) -> Result<ExecutionMode> {
    let parts: Vec<&str> = text.split(':').collect();
    let number = |s: &str, what: &str| -> Result<u64> {
        s.parse()
            .with_context(|| format!("bad {what} '{s}' in --mode"))
    };
    match parts.as_slice() {
        ["exact"] => Ok(ExecutionMode::Exact),
        ["sampled", shots, seed] => Ok(ExecutionMode::Sampled {
            shots: number(shots, "shot count")?,
            seed: number(seed, "seed")?,
        }),
        ["noisy", model, shots, seed] => {
            let noise = if *model == "default" {
                NoiseModel::default()
            } else {
                NoiseModel::from_file(Path::new(model))
                    .with_context(|| format!("reading noise model {model}"))?
            };
            Ok(ExecutionMode::Noisy {
                noise,
                shots: number(shots, "shot count")?,
                seed: number(seed, "seed")?,
                mitigate_readout,
            })
        }
        _ => bail!(
            "--mode expects exact, sampled:SHOTS:SEED or noisy:MODELFILE:SHOTS:SEED, got '{text}'"
        ),
    }
}

pub fn parse_coupling(text: &str, n_qubits: usize) -> Result<CouplingMap> {
    let map = match text {
        "all" => CouplingMap::all_to_all(n_qubits),
        "linear" => CouplingMap::linear(n_qubits),
        file => CouplingMap::from_file(Path::new(file))
            .with_context(|| format!("reading coupling map {file}"))?,
    };
    Ok(map)
}

pub fn write_output(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
