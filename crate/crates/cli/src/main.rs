mod options;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use options::*;
use vqe_core::hamiltonian::{casci_ground_state, hf_energy, load_scan_manifest};
use vqe_core::pauli::penalty_operator;
use vqe_core::resources::{estimate_circuit, ResourceReport};
use vqe_core::scan::{
    compare_ansatzes, comparison_csv, run_scan, EnergyColumn, ScanAnsatz, ScanOptions,
};
use vqe_core::vqe::{minimize, CHEMICAL_ACCURACY};
use vqe_core::{AnsatzFamily, AnsatzSpec, Circuit, VqeError};

/// Variational eigensolver workbench for small active-space Hamiltonians.
///
/// The worker count for scans and comparisons comes from VQE_WORKERS.
#[derive(Parser, Debug)]
#[command(name = "vqe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimise one ansatz on one FCIDUMP and write the iteration trace.
    Run {
        #[arg(long)]
        fcidump: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value = "givens")]
        ansatz: AnsatzFamily,
        #[command(flatten)]
        vqe: VqeArgs,
        /// exact | sampled:SHOTS:SEED | noisy:MODELFILE:SHOTS:SEED
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Trace CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the qubit Hamiltonian as text.
        #[arg(long)]
        dump_hamiltonian: Option<PathBuf>,
    },
    /// CASCI and VQE energies over every geometry in a scan manifest.
    Scan {
        #[arg(long)]
        scan_manifest: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        /// Comma-separated families; empty for a CASCI-only scan.
        #[arg(long, value_delimiter = ',', default_value = "givens")]
        ansatz: Vec<AnsatzFamily>,
        #[command(flatten)]
        vqe: VqeArgs,
        #[arg(long, default_value = "exact")]
        mode: String,
        /// Start every point from the configured init instead of the previous optimum.
        #[arg(long)]
        no_warm_start: bool,
        /// Scan CSV destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Final energies, errors and resources for several families and modes.
    Compare {
        #[arg(long)]
        fcidump: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "ryrz,swaprz,uccsd,givens"
        )]
        ansatz: Vec<AnsatzFamily>,
        #[command(flatten)]
        vqe: VqeArgs,
        /// Repeatable.
        #[arg(long, default_value = "exact")]
        mode: Vec<String>,
        /// Seeds for sampled and noisy modes are 0..SEEDS.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        /// all | linear | FILE
        #[arg(long, default_value = "all")]
        coupling: String,
        /// Directory for per-run trace CSVs.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transpiled depth and CNOT count as a JSON report.
    Resources {
        #[arg(long, required_unless_present = "circuit_file")]
        ansatz: Option<AnsatzFamily>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long, value_enum)]
        entanglement: Option<EntanglementArg>,
        #[arg(long, default_value_t = 4)]
        qubits: usize,
        #[arg(long, default_value_t = 2)]
        nelec: usize,
        /// Estimate a circuit in the text format instead of a built-in ansatz.
        #[arg(long, conflicts_with = "ansatz")]
        circuit_file: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        coupling: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact ground energy in the fixed-electron sector.
    Exactdiag {
        #[arg(long)]
        fcidump: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_workers() {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn configure_workers() -> Result<()> {
    if let Ok(v) = std::env::var("VQE_WORKERS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("VQE_WORKERS='{v}' is not a count"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run {
            fcidump,
            window,
            ansatz,
            vqe,
            mode,
            out,
            dump_hamiltonian,
        } => {
            let h = window.load(&fcidump)?;
            if let Some(path) = dump_hamiltonian {
                std::fs::write(&path, h.qubit_hamiltonian.to_text())
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let config = vqe.config(ansatz, &h, vqe.mode(&mode)?)?;
            let penalty = penalty_operator(vqe.penalty_form.into(), h.n_qubits(), h.n_electrons())?;
            let casci = casci_ground_state(&h.qubit_hamiltonian, h.n_electrons())?.energy;
            let trace = match minimize(&config, &h.qubit_hamiltonian, &penalty) {
                Ok(t) => t,
                Err(VqeError::Numerical {
                    message,
                    trace: Some(t),
                }) => {
                    if let Some(p) = &out {
                        t.write_csv(p)?;
                    }
                    anyhow::bail!(
                        "optimisation broke down after {} evaluations: {message}",
                        t.evaluations()
                    );
                }
                Err(e) => return Err(e.into()),
            };
            match &out {
                Some(p) => trace.write_csv(p)?,
                None => print!("{}", trace.to_csv()),
            }
            let err = (trace.final_energy - casci).abs();
            eprintln!(
                "{ansatz}: E = {:.10} Ha, CASCI = {casci:.10} Ha, |error| = {:.4} mHa{}, {} evaluations, {:?}",
                trace.final_energy,
                err * 1e3,
                if err <= CHEMICAL_ACCURACY { " (chemical accuracy)" } else { "" },
                trace.evaluations(),
                trace.termination
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Scan {
            scan_manifest,
            window,
            ansatz,
            vqe,
            mode,
            no_warm_start,
            out,
        } => {
            let points = load_scan_manifest(&scan_manifest)?;
            let mode = vqe.mode(&mode)?;
            // shapes are filled in per point; the defaults only need a plausible size here
            let probe = points
                .iter()
                .find_map(|p| window.load(&p.path).ok())
                .context("no readable FCIDUMP in the manifest")?;
            let entries = ansatz
                .iter()
                .map(|&f| {
                    Ok(ScanAnsatz {
                        label: f.to_string(),
                        config: vqe.config(f, &probe, mode.clone())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let options = ScanOptions {
                window: window.window(),
                warm_start: !no_warm_start,
                penalty_form: vqe.penalty_form.into(),
                workers: None,
            };
            let result = run_scan(&points, &entries, &options)?;
            write_output(&out, &result.to_csv())?;
            let mut columns = vec![("casci".to_string(), EnergyColumn::Casci)];
            columns.extend(
                result
                    .ansatz_labels
                    .iter()
                    .enumerate()
                    .map(|(k, l)| (l.clone(), EnergyColumn::Vqe(k))),
            );
            for (label, col) in columns {
                match result.barrier(col) {
                    Some(b) => eprintln!("{label}: barrier {:.3} mHa, minima at {:?}", b * 1e3, result.minima(col)),
                    None => eprintln!("{label}: barrier undefined (needs a delta = 0 point and at least two points)"),
                }
            }
            let failed = result.failed_points();
            if failed > 0 {
                for r in result.records.iter().filter(|r| !r.failures.is_empty()) {
                    eprintln!("delta {}: {}", r.delta, r.failures.join("; "));
                }
                eprintln!("{failed} of {} points failed", result.records.len());
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            fcidump,
            window,
            ansatz,
            vqe,
            mode,
            seeds,
            coupling,
            trace_dir,
            out,
        } => {
            let h = window.load(&fcidump)?;
            let modes = mode
                .iter()
                .map(|m| vqe.mode(m))
                .collect::<Result<Vec<_>>>()?;
            let entries = ansatz
                .iter()
                .map(|&f| {
                    Ok(ScanAnsatz {
                        label: f.to_string(),
                        config: vqe.config(f, &h, modes[0].clone())?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if let Some(dir) = &trace_dir {
                std::fs::create_dir_all(dir)?;
            }
            let map = parse_coupling(&coupling, h.n_qubits())?;
            let seeds: Vec<u64> = (0..seeds.max(1)).collect();
            let rows = compare_ansatzes(
                &h,
                &entries,
                &modes,
                &seeds,
                &map,
                trace_dir.as_deref(),
                vqe.penalty_form.into(),
            )?;
            write_output(&out, &comparison_csv(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Resources {
            ansatz,
            reps,
            entanglement,
            qubits,
            nelec,
            circuit_file,
            coupling,
            out,
        } => {
            let (label, circuit) = match (circuit_file, ansatz) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    (path.display().to_string(), Circuit::from_text(&text)?)
                }
                (None, Some(family)) => {
                    let mut spec = AnsatzSpec::new(family, qubits, nelec);
                    if let Some(r) = reps {
                        spec = spec.with_repetitions(r);
                    }
                    if let Some(e) = entanglement {
                        spec = spec.with_entanglement(e.into());
                    }
                    (family.to_string(), spec.build()?)
                }
                (None, None) => unreachable!("clap requires one of --ansatz and --circuit-file"),
            };
            let map = parse_coupling(&coupling, circuit.n_qubits())?;
            let report: ResourceReport = estimate_circuit(&label, &circuit, &map)?;
            write_output(&out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exactdiag {
            fcidump,
            window,
            out,
        } => {
            let h = window.load(&fcidump)?;
            let n = h.n_electrons();
            let ground = casci_ground_state(&h.qubit_hamiltonian, n)?;
            let hf = hf_energy(&h.qubit_hamiltonian, n)?;
            let report = json!({
                "qubits": h.n_qubits(),
                "electrons": n,
                "casci_ha": ground.energy,
                "hf_ha": hf,
                "correlation_mha": (ground.energy - hf) * 1e3,
            });
            write_output(&out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
