//! Single-site qubit operators embedded in the N-qubit Hilbert space.
//!
//! Tensor ordering: site 0 is the leftmost Kronecker factor, so it maps to
//! the most significant bit of a computational-basis index. Basis state
//! `|0⟩` has `σ_z = +1` (ground); `|1⟩` is the excited state.

use ndarray::{array, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::linalg::{identity, kron, CMatrix, C64, I, ONE, ZERO};

/// Largest register the dense representations accept.
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SiteOperator {
    SigmaX,
    SigmaY,
    SigmaZ,
    /// Excited-state projector `½(I − σ_z)`.
    SDown,
    /// Lowering operator `|0⟩⟨1|`.
    Lower,
}

impl SiteOperator {
    pub fn matrix(self) -> CMatrix {
        match self {
            SiteOperator::SigmaX => array![[ZERO, ONE], [ONE, ZERO]],
            SiteOperator::SigmaY => array![[ZERO, -I], [I, ZERO]],
            SiteOperator::SigmaZ => array![[ONE, ZERO], [ZERO, -ONE]],
            SiteOperator::SDown => array![[ZERO, ZERO], [ZERO, ONE]],
            SiteOperator::Lower => array![[ZERO, ONE], [ZERO, ZERO]],
        }
    }
}

/// Bit mask selecting `site` in a basis index of an `n_qubits` register.
#[inline]
pub fn site_mask(site: usize, n_qubits: usize) -> usize {
    1 << (n_qubits - 1 - site)
}

/// `I ⊗ … ⊗ A ⊗ … ⊗ I` with `A` at position `site`.
pub fn site_operator(kind: SiteOperator, site: usize, n_qubits: usize) -> Result<CMatrix> {
    if n_qubits == 0 {
        return Err(argument("n_qubits must be at least 1"));
    }
    if site >= n_qubits {
        return Err(argument(format!("site {site} out of range for {n_qubits} qubits")));
    }
    let left = identity(1 << site);
    let right = identity(1 << (n_qubits - site - 1));
    Ok(kron(&kron(&left, &kind.matrix()), &right))
}

/// Product of two site operators, e.g. `σ_z^{(m)} σ_z^{(n)}`.
pub fn two_site_operator(kind: SiteOperator, first: usize, second: usize, n_qubits: usize) -> Result<CMatrix> {
    let a = site_operator(kind, first, n_qubits)?;
    let b = site_operator(kind, second, n_qubits)?;
    Ok(a.dot(&b))
}

pub(crate) fn real_diag(values: impl IntoIterator<Item = f64>) -> CMatrix {
    let v: Vec<C64> = values.into_iter().map(C64::from).collect();
    Array2::from_diag(&ndarray::Array1::from(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_re(m: &CMatrix) -> Vec<f64> {
        (0..m.nrows()).map(|i| m[[i, i]].re).collect()
    }

    #[test]
    fn s_down_single_qubit() {
        let m = site_operator(SiteOperator::SDown, 0, 1).unwrap();
        assert_eq!(m, array![[ZERO, ZERO], [ZERO, ONE]]);
        let half = (identity(2) - SiteOperator::SigmaZ.matrix()).mapv(|z| z * 0.5);
        assert_eq!(m, half);
    }

    #[test]
    fn sigma_x_single_qubit() {
        let m = site_operator(SiteOperator::SigmaX, 0, 1).unwrap();
        assert_eq!(m, array![[ZERO, ONE], [ONE, ZERO]]);
    }

    #[test]
    fn sigma_z_on_second_of_two() {
        let m = site_operator(SiteOperator::SigmaZ, 1, 2).unwrap();
        assert_eq!(diag_re(&m), vec![1.0, -1.0, 1.0, -1.0]);
        // Brute-force I ⊗ σ_z.
        let z = [1.0, -1.0];
        for r in 0..4 {
            for c in 0..4 {
                let want = if r == c { z[r % 2] } else { 0.0 };
                assert_eq!(m[[r, c]], C64::from(want));
            }
        }
    }

    #[test]
    fn site_zero_is_most_significant_bit() {
        let m = site_operator(SiteOperator::SDown, 0, 3).unwrap();
        for b in 0..8 {
            let excited = b & site_mask(0, 3) != 0;
            assert_eq!(m[[b, b]].re, if excited { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn out_of_range_site_is_rejected() {
        assert!(site_operator(SiteOperator::SigmaX, 2, 2).is_err());
        assert!(site_operator(SiteOperator::SigmaX, 0, 0).is_err());
    }

    #[test]
    fn lowering_maps_excited_to_ground() {
        let l = site_operator(SiteOperator::Lower, 0, 1).unwrap();
        // |1⟩ = (0, 1) → |0⟩ = (1, 0)
        assert_eq!(l[[0, 1]], ONE);
        assert_eq!(l[[1, 0]], ZERO);
    }
}
