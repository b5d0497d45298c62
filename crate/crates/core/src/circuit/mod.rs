//! Gate set, circuits, and exact statevector simulation.

#[allow(clippy::module_inception)]
mod circuit;
mod gate;
pub(crate) mod kernel;
mod statevector;

pub use circuit::Circuit;
pub use gate::{
    gate_matrix, hop_decomposition, kind_matrix, rxxyy_decomposition, Angle, Gate, GateKind,
    GateMatrix,
};
pub use statevector::{apply, expectation, run, sample_counts, sample_histogram, Statevector};
