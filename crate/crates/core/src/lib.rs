//! Variational quantum eigensolver workbench: Pauli algebra and the Jordan–Wigner map,
//! statevector and density-matrix simulation, four ansatz families, FCIDUMP ingestion with
//! active-space reduction, optimisation, noise, resource estimation and potential-energy scans.

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod noise;
pub mod pauli;
pub mod resources;
pub mod scan;
pub mod vqe;

pub use ansatz::{AnsatzFamily, AnsatzSpec, Entanglement};
pub use circuit::{Angle, Circuit, Gate, GateKind, Statevector};
pub use error::{Result, VqeError};
pub use hamiltonian::{ActiveSpaceHamiltonian, IntegralSet};
pub use noise::{DensityMatrix, NoiseModel};
pub use pauli::{PauliString, PauliSum, PenaltyForm};
pub use resources::{CouplingMap, ResourceReport};
pub use vqe::{ExecutionMode, InitStrategy, VqeConfig, VqeTrace};
