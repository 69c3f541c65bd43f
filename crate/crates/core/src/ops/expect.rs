use crate::error::{argument, integrity, Result};
use crate::linalg::{CMatrix, C64};
use crate::ops::state::QuantumState;

/// Imaginary residue that is silently dropped.
pub const IMAG_DISCARD_TOL: f64 = 1e-10;
/// Imaginary residue that is treated as a numerical-integrity failure.
pub const IMAG_ERROR_TOL: f64 = 1e-8;

/// `⟨ψ|O|ψ⟩` or `Tr(ρO)` for each observable.
pub fn expectation_values(state: &QuantumState, observables: &[CMatrix]) -> Result<Vec<f64>> {
    let dim = state.dim();
    observables
        .iter()
        .enumerate()
        .map(|(k, o)| {
            if o.dim() != (dim, dim) {
                return Err(argument(format!("observable {k} has shape {:?}, state dimension is {dim}", o.dim())));
            }
            let value = match state {
                QuantumState::Pure(psi) => {
                    let mut acc = C64::from(0.0);
                    for (i, row) in o.rows().into_iter().enumerate() {
                        let mut inner = C64::from(0.0);
                        for (j, &oij) in row.iter().enumerate() {
                            if oij.re != 0.0 || oij.im != 0.0 {
                                inner += oij * psi[j];
                            }
                        }
                        acc += psi[i].conj() * inner;
                    }
                    acc
                }
                QuantumState::Density(rho) => {
                    let mut acc = C64::from(0.0);
                    for ((i, j), &oji) in o.indexed_iter() {
                        if oji.re != 0.0 || oji.im != 0.0 {
                            acc += rho[[j, i]] * oji;
                        }
                    }
                    acc
                }
            };
            if !(value.im.abs() < IMAG_ERROR_TOL) || !value.re.is_finite() {
                return Err(integrity(format!("observable {k} expectation has imaginary part {:e}", value.im)));
            }
            Ok(value.re)
        })
        .collect()
}
