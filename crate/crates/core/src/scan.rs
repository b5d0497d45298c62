//! Potential-energy scans over a geometry manifest and multi-ansatz comparisons.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::ansatz::{AnsatzFamily, AnsatzSpec};
use crate::error::{Result, VqeError};
use crate::hamiltonian::{
    casci_ground_state, hf_energy, ActiveSpaceHamiltonian, IntegralSet, ScanPoint,
};
use crate::pauli::{penalty_operator, PenaltyForm};
use crate::resources::{estimate_circuit, CouplingMap, ResourceReport};
use crate::vqe::{minimize, ExecutionMode, InitStrategy, VqeConfig};

pub const SCAN_CSV_VERSION: &str = "# vqe-scan v1";
pub const COMPARE_CSV_VERSION: &str = "# vqe-compare v1";

/// Recommended settings per family: HE families get repetitions, a random start and (RyRz)
/// a penalty of 1e5; UCCSD and Givens start from zeros.
pub fn default_config(
    family: AnsatzFamily,
    n_qubits: usize,
    n_electrons: usize,
    mode: ExecutionMode,
) -> VqeConfig {
    let reps = match family {
        AnsatzFamily::RyRz => 3,
        AnsatzFamily::SwapRz => 2,
        _ => 1,
    };
    let mut c =
        VqeConfig::new(AnsatzSpec::new(family, n_qubits, n_electrons).with_repetitions(reps));
    c.mode = mode;
    if family.is_hardware_efficient() {
        c.init = InitStrategy::random(7);
    }
    if family == AnsatzFamily::RyRz {
        c.mu = 1e5;
    }
    c
}

/// Orbital window applied to every integral file.
#[derive(Debug, Clone, Default)]
pub struct ActiveWindow {
    pub frozen: Vec<usize>,
    /// Defaults to every orbital that is not frozen.
    pub active: Option<Vec<usize>>,
    /// Overrides the active electron count.
    pub n_electrons: Option<usize>,
}

impl ActiveWindow {
    pub fn apply(&self, full: &IntegralSet) -> Result<ActiveSpaceHamiltonian> {
        let active: Vec<usize> = match &self.active {
            Some(a) => a.clone(),
            None => (0..full.n_orbitals())
                .filter(|o| !self.frozen.contains(o))
                .collect(),
        };
        let mut reduced = crate::hamiltonian::reduce_to_active(full, &self.frozen, &active)?;
        if let Some(n) = self.n_electrons {
            if n > 2 * active.len() {
                return Err(VqeError::Contract(format!(
                    "{n} electrons do not fit in {} active orbitals",
                    active.len()
                )));
            }
            reduced.n_electrons = n;
        }
        ActiveSpaceHamiltonian::new(reduced)
    }
}

/// A named VQE setup; qubit and electron counts are filled in per point.
#[derive(Debug, Clone)]
pub struct ScanAnsatz {
    pub label: String,
    pub config: VqeConfig,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub window: ActiveWindow,
    pub warm_start: bool,
    pub penalty_form: PenaltyForm,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            window: ActiveWindow::default(),
            warm_start: true,
            penalty_form: PenaltyForm::Squared,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRecord {
    pub delta: f64,
    pub label: String,
    pub casci: Option<f64>,
    pub hf: Option<f64>,
    /// One entry per configured ansatz.
    pub vqe: Vec<Option<f64>>,
    pub failures: Vec<String>,
}

impl ScanRecord {
    pub fn error_mha(&self, k: usize) -> Option<f64> {
        Some((self.vqe.get(k).copied()?? - self.casci?).abs() * 1e3)
    }
}

/// Which energy column barrier and minima are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyColumn {
    Casci,
    Vqe(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub ansatz_labels: Vec<String>,
    /// Ordered by ascending `delta`.
    pub records: Vec<ScanRecord>,
}

impl ScanResult {
    fn column(&self, col: EnergyColumn) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter_map(|r| {
                let e = match col {
                    EnergyColumn::Casci => r.casci,
                    EnergyColumn::Vqe(k) => r.vqe.get(k).copied().flatten(),
                };
                e.map(|e| (r.delta, e))
            })
            .collect()
    }

    /// `E(δ = 0) − min_δ E(δ)`; absent without a δ = 0 point or with a single point.
    pub fn barrier(&self, col: EnergyColumn) -> Option<f64> {
        let pts = self.column(col);
        if pts.len() < 2 {
            return None;
        }
        let center = pts.iter().find(|(d, _)| *d == 0.0)?.1;
        let min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        Some(center - min)
    }

    /// Interior local minima in δ order; the global minimum if there are none.
    pub fn minima(&self, col: EnergyColumn) -> Vec<f64> {
        let pts = self.column(col);
        let interior: Vec<f64> = pts
            .windows(3)
            .filter(|w| w[1].1 <= w[0].1 && w[1].1 <= w[2].1)
            .map(|w| w[1].0)
            .collect();
        if !interior.is_empty() || pts.is_empty() {
            return interior;
        }
        let best = pts
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        vec![best.0]
    }

    pub fn failed_points(&self) -> usize {
        self.records
            .iter()
            .filter(|r| !r.failures.is_empty())
            .count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{SCAN_CSV_VERSION}\ndelta_angstrom,label,casci_ha,hf_ha");
        for l in &self.ansatz_labels {
            let _ = write!(out, ",{l}_ha,{l}_err_mha");
        }
        out.push_str(",status\n");
        let fmt = |v: Option<f64>, prec: usize| v.map_or(String::new(), |v| format!("{v:.prec$}"));
        for r in &self.records {
            let _ = write!(
                out,
                "{},{},{},{}",
                r.delta,
                r.label.replace(',', ";"),
                fmt(r.casci, 10),
                fmt(r.hf, 10)
            );
            for k in 0..self.ansatz_labels.len() {
                let _ = write!(out, ",{},{}", fmt(r.vqe[k], 10), fmt(r.error_mha(k), 4));
            }
            let status = if r.failures.is_empty() {
                "ok".to_string()
            } else {
                format!(
                    "error: {}",
                    r.failures.join(" | ").replace([',', '\n'], ";")
                )
            };
            let _ = writeln!(out, ",{status}");
        }
        out
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| VqeError::Contract(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

struct Prepared {
    hamiltonian: ActiveSpaceHamiltonian,
    casci: f64,
    hf: f64,
}

fn prepare(point: &ScanPoint, window: &ActiveWindow) -> Result<Prepared> {
    let full = IntegralSet::from_fcidump_file(&point.path)?;
    let hamiltonian = window.apply(&full)?;
    let n = hamiltonian.n_electrons();
    let casci = casci_ground_state(&hamiltonian.qubit_hamiltonian, n)?.energy;
    let hf = hf_energy(&hamiltonian.qubit_hamiltonian, n)?;
    Ok(Prepared {
        hamiltonian,
        casci,
        hf,
    })
}

fn run_point(
    prepared: &Prepared,
    ansatz: &ScanAnsatz,
    form: PenaltyForm,
    warm: Option<&Vec<f64>>,
) -> Result<(f64, Vec<f64>)> {
    let h = &prepared.hamiltonian;
    let mut config = ansatz.config.clone();
    config.ansatz.n_qubits = h.n_qubits();
    config.ansatz.n_electrons = h.n_electrons();
    if let Some(p) = warm {
        config.init = InitStrategy::Given(p.clone());
    }
    let penalty = penalty_operator(form, h.n_qubits(), h.n_electrons())?;
    let trace = minimize(&config, &h.qubit_hamiltonian, &penalty)?;
    Ok((trace.final_energy, trace.final_parameters))
}

/// CASCI plus one VQE run per ansatz at every manifest point. Per-point failures are recorded,
/// not raised.
pub fn run_scan(
    points: &[ScanPoint],
    ansatze: &[ScanAnsatz],
    options: &ScanOptions,
) -> Result<ScanResult> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].delta.total_cmp(&points[b].delta));
    let points: Vec<&ScanPoint> = order.iter().map(|&i| &points[i]).collect();

    with_pool(options.workers, || {
        let prepared: Vec<std::result::Result<Prepared, String>> = points
            .par_iter()
            .map(|p| prepare(p, &options.window).map_err(|e| format!("{}: {e}", p.path.display())))
            .collect();

        let column = |a: &ScanAnsatz| -> Vec<std::result::Result<f64, String>> {
            if options.warm_start {
                let mut warm: Option<Vec<f64>> = None;
                prepared
                    .iter()
                    .map(|p| {
                        let p = p
                            .as_ref()
                            .map_err(|_| "integrals unavailable".to_string())?;
                        match run_point(p, a, options.penalty_form, warm.as_ref()) {
                            Ok((e, params)) => {
                                warm = Some(params);
                                Ok(e)
                            }
                            Err(err) => Err(err.to_string()),
                        }
                    })
                    .collect()
            } else {
                prepared
                    .par_iter()
                    .map(|p| {
                        let p = p
                            .as_ref()
                            .map_err(|_| "integrals unavailable".to_string())?;
                        run_point(p, a, options.penalty_form, None)
                            .map(|r| r.0)
                            .map_err(|e| e.to_string())
                    })
                    .collect()
            }
        };
        let columns: Vec<Vec<std::result::Result<f64, String>>> =
            ansatze.par_iter().map(column).collect();

        let records = points
            .iter()
            .enumerate()
            .map(|(i, pt)| {
                let mut failures = Vec::new();
                let (casci, hf) = match &prepared[i] {
                    Ok(p) => (Some(p.casci), Some(p.hf)),
                    Err(e) => {
                        failures.push(e.clone());
                        (None, None)
                    }
                };
                let vqe = columns
                    .iter()
                    .zip(ansatze)
                    .map(|(col, a)| match &col[i] {
                        Ok(e) => Some(*e),
                        Err(e) => {
                            if prepared[i].is_ok() {
                                failures.push(format!("{}: {e}", a.label));
                            }
                            None
                        }
                    })
                    .collect();
                ScanRecord {
                    delta: pt.delta,
                    label: pt.label.clone(),
                    casci,
                    hf,
                    vqe,
                    failures,
                }
            })
            .collect();
        ScanResult {
            ansatz_labels: ansatze.iter().map(|a| a.label.clone()).collect(),
            records,
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub label: String,
    pub mode: String,
    pub runs: usize,
    pub energy_mean: f64,
    pub energy_std: f64,
    pub error_mean_mha: f64,
    pub error_std_mha: f64,
    pub casci: f64,
    pub resources: ResourceReport,
    pub trace_files: Vec<PathBuf>,
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

/// Every entry in every mode; sampled and noisy modes repeat once per seed.
pub fn compare_ansatzes(
    hamiltonian: &ActiveSpaceHamiltonian,
    entries: &[ScanAnsatz],
    modes: &[ExecutionMode],
    seeds: &[u64],
    map: &CouplingMap,
    trace_dir: Option<&Path>,
    penalty_form: PenaltyForm,
) -> Result<Vec<ComparisonRow>> {
    let n_q = hamiltonian.n_qubits();
    let n_e = hamiltonian.n_electrons();
    let casci = casci_ground_state(&hamiltonian.qubit_hamiltonian, n_e)?.energy;
    let penalty = penalty_operator(penalty_form, n_q, n_e)?;
    let seeds: Vec<u64> = if seeds.is_empty() {
        vec![0]
    } else {
        seeds.to_vec()
    };

    let mut jobs = Vec::new();
    for (ei, entry) in entries.iter().enumerate() {
        for (mi, mode) in modes.iter().enumerate() {
            let run_seeds = if mode.is_exact() {
                vec![seeds[0]]
            } else {
                seeds.clone()
            };
            for s in run_seeds {
                let mut config = entry.config.clone();
                config.ansatz.n_qubits = n_q;
                config.ansatz.n_electrons = n_e;
                config.mode = mode.with_seed(s);
                jobs.push((ei, mi, s, config));
            }
        }
    }
    let traces: Vec<Result<crate::vqe::VqeTrace>> = jobs
        .par_iter()
        .map(|(_, _, _, c)| minimize(c, &hamiltonian.qubit_hamiltonian, &penalty))
        .collect();

    let mut rows = Vec::new();
    for (ei, entry) in entries.iter().enumerate() {
        let mut spec = entry.config.ansatz;
        spec.n_qubits = n_q;
        spec.n_electrons = n_e;
        let resources = estimate_circuit(&entry.label, &spec.build()?, map)?;
        for (mi, mode) in modes.iter().enumerate() {
            let mut energies = Vec::new();
            let mut files = Vec::new();
            for (job, trace) in jobs.iter().zip(&traces) {
                if job.0 != ei || job.1 != mi {
                    continue;
                }
                let trace = trace.as_ref().map_err(|e| {
                    VqeError::Contract(format!("{} ({}) failed: {e}", entry.label, mode.label()))
                })?;
                energies.push(trace.final_energy);
                if let Some(dir) = trace_dir {
                    let path = dir.join(format!(
                        "trace_{}_{}_seed{}.csv",
                        entry.label,
                        mode.label().replace([':', '+'], "_"),
                        job.2
                    ));
                    trace.write_csv(&path)?;
                    files.push(path);
                }
            }
            let errors: Vec<f64> = energies.iter().map(|e| (e - casci).abs() * 1e3).collect();
            let (energy_mean, energy_std) = mean_std(&energies);
            let (error_mean_mha, error_std_mha) = mean_std(&errors);
            rows.push(ComparisonRow {
                label: entry.label.clone(),
                mode: mode.label(),
                runs: energies.len(),
                energy_mean,
                energy_std,
                error_mean_mha,
                error_std_mha,
                casci,
                resources: resources.clone(),
                trace_files: files,
            });
        }
    }
    Ok(rows)
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!(
        "{COMPARE_CSV_VERSION}\nansatz,mode,runs,energy_mean_ha,energy_std_ha,abs_error_mean_mha,abs_error_std_mha,casci_ha,parameters,depth,cnot_count,total_gates\n"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{:.10},{:.3e},{:.4},{:.4},{:.10},{},{},{},{}",
            r.label,
            r.mode,
            r.runs,
            r.energy_mean,
            r.energy_std,
            r.error_mean_mha,
            r.error_std_mha,
            r.casci,
            r.resources.parameters,
            r.resources.depth,
            r.resources.cnot_count,
            r.resources.total_gates
        );
    }
    out
}
