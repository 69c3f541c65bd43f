//! Random reservoir instances and their feature map.

pub mod config;
pub mod featurize;
pub mod params;

pub use config::{DissipationMode, InitialStateMode, LindbladBackend, ObservableSet, ReservoirConfig};
pub use featurize::{
    evolve_input, featurize, featurize_batch, route, Counting, FeatureMap, Route, CERTIFIED_UNITARY_BOUND,
};
pub use params::{build_jump_ops, build_observables, sample_parameters, ReservoirParams};
