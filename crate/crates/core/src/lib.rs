//! Hamiltonian-encoded quantum reservoir computing on small qubit arrays.
//!
//! A scalar input `x` shifts the detunings of an interacting qubit array;
//! the state evolved for a fixed window is read out through Pauli
//! expectation values, and a ridge-regression layer maps those features to
//! targets.

pub mod encoding;
pub mod error;
pub mod experiment;
pub mod expm;
pub mod learner;
pub mod linalg;
pub mod ops;
pub mod reservoir;
pub mod rng;
pub mod tasks;

pub use error::{Error, Result};
