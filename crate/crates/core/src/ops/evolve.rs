//! Closed-system propagation through the Hermitian eigendecomposition.

use ndarray::Array1;

use crate::error::{argument, integrity, Result};
use crate::linalg::{eigh, ensure_hermitian, CMatrix, CVector, C64, I};
use crate::ops::state::{QuantumState, PURE_NORM_TOL};

/// Hermiticity tolerance for Hamiltonians, relative to their largest entry.
pub const HAMILTONIAN_HERMITIAN_TOL: f64 = 1e-12;

pub(crate) fn check_hamiltonian(h: &CMatrix) -> Result<()> {
    let scale = h.iter().map(|z| z.norm()).fold(1.0, f64::max);
    ensure_hermitian(h, HAMILTONIAN_HERMITIAN_TOL * scale, "Hamiltonian")
}

/// Spectral form of `exp(−iHτ)`, reusable across several vectors.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigenvalues: Array1<f64>,
    eigenvectors: CMatrix,
    tau: f64,
}

impl Propagator {
    pub fn new(h: &CMatrix, tau: f64) -> Result<Self> {
        check_hamiltonian(h)?;
        if !tau.is_finite() {
            return Err(argument("evolution time must be finite"));
        }
        let (eigenvalues, eigenvectors) = eigh(h)?;
        Ok(Self { eigenvalues, eigenvectors, tau })
    }

    /// `V · diag(e^{−iE_kτ}) · V† · ψ`.
    pub fn apply(&self, psi: &CVector) -> CVector {
        let v = &self.eigenvectors;
        let coeffs = v.t().mapv(|z| z.conj()).dot(psi);
        let phased =
            Array1::from_iter(coeffs.iter().zip(self.eigenvalues.iter()).map(|(c, &e)| c * (-I * e * self.tau).exp()));
        v.dot(&phased)
    }

    /// Dense unitary matrix `exp(−iHτ)`.
    pub fn matrix(&self) -> CMatrix {
        let v = &self.eigenvectors;
        let phases: Vec<C64> = self.eigenvalues.iter().map(|&e| (-I * e * self.tau).exp()).collect();
        let mut scaled = v.clone();
        for (mut col, p) in scaled.columns_mut().into_iter().zip(phases) {
            col.mapv_inplace(|z| z * p);
        }
        scaled.dot(&v.t().mapv(|z| z.conj()))
    }
}

/// `ψ_τ = exp(−iHτ) ψ₀` for a pure state.
pub fn unitary_evolve(psi0: &QuantumState, h: &CMatrix, tau: f64) -> Result<QuantumState> {
    let psi = psi0.as_pure().ok_or_else(|| argument("unitary_evolve needs a pure state"))?;
    if psi.len() != h.nrows() {
        return Err(argument(format!(
            "state dimension {} does not match Hamiltonian dimension {}",
            psi.len(),
            h.nrows()
        )));
    }
    if tau == 0.0 {
        check_hamiltonian(h)?;
        return Ok(psi0.clone());
    }
    let out = Propagator::new(h, tau)?.apply(psi);
    let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > PURE_NORM_TOL {
        return Err(integrity(format!("propagated norm drifted to {norm}")));
    }
    Ok(QuantumState::Pure(out))
}
