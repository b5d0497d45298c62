//! Depolarizing density-matrix execution and readout-error modelling and mitigation.

mod density;
mod model;
mod readout;

pub use density::{noisy_evolve, DensityMatrix, DENSITY_QUBIT_CAP};
pub use model::{NoiseModel, ReadoutError};
pub use readout::{
    apply_model_readout, apply_readout_error, calibrate_readout, mitigate_readout, unfold_readout,
};
