//! Integral ingestion, active-space reduction, qubit Hamiltonian assembly and the CASCI reference.

mod active;
mod casci;
mod integrals;
mod manifest;

pub use active::{
    assemble_qubit_hamiltonian, fermionic_hamiltonian, reduce_to_active, ActiveSpaceHamiltonian,
};
pub use casci::{casci_ground_state, hf_energy, sector_block, sector_states, GroundState};
pub use integrals::{parse_fcidump, IntegralSet};
pub use manifest::{load_scan_manifest, parse_scan_manifest, ScanPoint};
