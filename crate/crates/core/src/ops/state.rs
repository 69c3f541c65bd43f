use ndarray::{Array1, Array2};

use crate::error::{validation, Result};
use crate::linalg::{hermiticity_defect, is_finite, min_eigenvalue, CMatrix, CVector, C64, ONE};

pub const PURE_NORM_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
pub const DENSITY_POSITIVITY_TOL: f64 = -1e-9;

/// A register state: a normalized vector or a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumState {
    Pure(CVector),
    Density(CMatrix),
}

impl QuantumState {
    /// Wraps a state vector, checking `‖ψ‖₂ = 1` to 1e-10.
    pub fn pure(psi: CVector) -> Result<Self> {
        check_dim(psi.len())?;
        if !psi.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(validation("state vector has non-finite entries"));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(validation(format!("state vector norm {norm} is not 1")));
        }
        Ok(QuantumState::Pure(psi))
    }

    /// Wraps a density matrix, checking unit trace, Hermiticity and positivity.
    pub fn density(rho: CMatrix) -> Result<Self> {
        let (r, c) = rho.dim();
        if r != c {
            return Err(validation(format!("density matrix is {r}x{c}")));
        }
        check_dim(r)?;
        if !is_finite(&rho) {
            return Err(validation("density matrix has non-finite entries"));
        }
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > DENSITY_TRACE_TOL || tr.im.abs() > DENSITY_TRACE_TOL {
            return Err(validation(format!("density matrix trace {tr} is not 1")));
        }
        let defect = hermiticity_defect(&rho);
        if defect > DENSITY_HERMITIAN_TOL {
            return Err(validation(format!("density matrix not Hermitian ({defect:e})")));
        }
        let lo = min_eigenvalue(&rho)?;
        if lo < DENSITY_POSITIVITY_TOL {
            return Err(validation(format!("density matrix has eigenvalue {lo:e}")));
        }
        Ok(QuantumState::Density(rho))
    }

    /// Computational basis state `|index⟩` of an `n_qubits` register.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(validation(format!("basis index {index} outside dimension {dim}")));
        }
        let mut psi = Array1::zeros(dim);
        psi[index] = ONE;
        Ok(QuantumState::Pure(psi))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        QuantumState::Density(Array2::from_diag_elem(dim, C64::from(1.0 / dim as f64)))
    }

    pub fn dim(&self) -> usize {
        match self {
            QuantumState::Pure(v) => v.len(),
            QuantumState::Density(m) => m.nrows(),
        }
    }

    /// `|ψ⟩⟨ψ|` for a pure state; a density matrix is returned unchanged.
    pub fn to_density(&self) -> CMatrix {
        match self {
            QuantumState::Pure(v) => {
                let n = v.len();
                Array2::from_shape_fn((n, n), |(i, j)| v[i] * v[j].conj())
            }
            QuantumState::Density(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&CVector> {
        match self {
            QuantumState::Pure(v) => Some(v),
            QuantumState::Density(_) => None,
        }
    }

    pub fn as_density(&self) -> Option<&CMatrix> {
        match self {
            QuantumState::Density(m) => Some(m),
            QuantumState::Pure(_) => None,
        }
    }
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diag().iter().copied().sum()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(validation(format!("dimension {dim} is not 2^N")));
    }
    Ok(())
}
