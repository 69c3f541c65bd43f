//! Qubit operators, Hamiltonians, GKSL generators and exact propagation.

pub mod evolve;
pub mod expect;
pub mod hamiltonian;
pub mod krylov;
pub mod lindblad;
pub mod operators;
pub mod state;

pub use evolve::{unitary_evolve, Propagator};
pub use expect::expectation_values;
pub use hamiltonian::{build_hamiltonian, encoding_operator};
pub use krylov::{krylov_evolve, KrylovOptions, LindbladAction};
pub use lindblad::{dissipative_evolve, lindblad_generator, Liouvillian};
pub use operators::{site_operator, two_site_operator, SiteOperator, MAX_QUBITS};
pub use state::QuantumState;
