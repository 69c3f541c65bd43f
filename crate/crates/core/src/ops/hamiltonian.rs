//! Driven Ising-type reservoir Hamiltonian with input-modulated detunings.
//!
//! ```text
//! H(x) = Σ_j [ −(Δ_j⁰ + s·x) S_d^{(j)} + (Ω_j/2) σ_x^{(j)} ]
//!      + Σ_{m<n} V_{mn}/(N−1) S_d^{(m)} S_d^{(n)}
//! ```
//!
//! Every term except the transverse drive is diagonal in the computational
//! basis, so the matrix is assembled directly from basis-index bits.

use ndarray::Array2;

use crate::linalg::{CMatrix, C64};
use crate::ops::operators::{real_diag, site_mask};
use crate::reservoir::ReservoirParams;

/// Diagonal of the input-independent part, `H(0)` minus the σ_x drive.
fn static_diagonal(params: &ReservoirParams) -> Vec<f64> {
    let n = params.n_qubits;
    let dim = 1usize << n;
    let pair_scale = if n > 1 { 1.0 / (n as f64 - 1.0) } else { 0.0 };
    (0..dim)
        .map(|b| {
            let excited: Vec<bool> = (0..n).map(|j| b & site_mask(j, n) != 0).collect();
            let mut e = 0.0;
            for j in 0..n {
                if excited[j] {
                    e -= params.detunings[j];
                }
            }
            for m in 0..n {
                for k in m + 1..n {
                    if excited[m] && excited[k] {
                        e += params.couplings[[m, k]] * pair_scale;
                    }
                }
            }
            e
        })
        .collect()
}

/// Number of excited qubits in each basis state; `−Σ_j S_d^{(j)}` is minus this.
fn excitation_counts(n: usize) -> Vec<f64> {
    (0..1usize << n).map(|b| b.count_ones() as f64).collect()
}

/// Assembles `H(x)` for a sampled reservoir.
pub fn build_hamiltonian(params: &ReservoirParams, x: f64) -> CMatrix {
    let n = params.n_qubits;
    let dim = 1usize << n;
    let shift = params.scale_s * x;
    let mut h = Array2::<C64>::zeros((dim, dim));
    let diag = static_diagonal(params);
    let counts = excitation_counts(n);
    for b in 0..dim {
        h[[b, b]] = C64::from(diag[b] - shift * counts[b]);
        for j in 0..n {
            h[[b, b ^ site_mask(j, n)]] += C64::from(0.5 * params.rabi[j]);
        }
    }
    h
}

/// The operator multiplying the input: `H(x) = H(0) + x · encoding_operator`.
pub fn encoding_operator(params: &ReservoirParams) -> CMatrix {
    let s = params.scale_s;
    real_diag(excitation_counts(params.n_qubits).into_iter().map(|c| -s * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermiticity_defect;
    use crate::ops::operators::{site_operator, SiteOperator};
    use crate::reservoir::{sample_parameters, ReservoirConfig};

    /// Textbook construction from embedded site operators.
    fn operator_algebra_oracle(p: &ReservoirParams, x: f64) -> CMatrix {
        let n = p.n_qubits;
        let dim = 1 << n;
        let mut h = Array2::<C64>::zeros((dim, dim));
        for j in 0..n {
            let sd = site_operator(SiteOperator::SDown, j, n).unwrap();
            let sx = site_operator(SiteOperator::SigmaX, j, n).unwrap();
            h = h - sd.mapv(|z| z * (p.detunings[j] + p.scale_s * x)) + sx.mapv(|z| z * 0.5 * p.rabi[j]);
        }
        for m in 0..n {
            for k in m + 1..n {
                let a = site_operator(SiteOperator::SDown, m, n).unwrap();
                let b = site_operator(SiteOperator::SDown, k, n).unwrap();
                h = h + a.dot(&b).mapv(|z| z * p.couplings[[m, k]] / (n as f64 - 1.0));
            }
        }
        h
    }

    fn params(n: usize, seed: u64) -> ReservoirParams {
        let cfg = ReservoirConfig { n_qubits: n, seed, scale_s: 0.7, ..Default::default() };
        sample_parameters(&cfg).unwrap()
    }

    #[test]
    fn single_qubit_at_zero_input() {
        let mut p = params(1, 3);
        p.detunings = vec![5.0];
        p.rabi = vec![2.0];
        let h = build_hamiltonian(&p, 0.0);
        assert_eq!(h[[0, 0]], C64::from(0.0));
        assert_eq!(h[[0, 1]], C64::from(1.0));
        assert_eq!(h[[1, 0]], C64::from(1.0));
        assert_eq!(h[[1, 1]], C64::from(-5.0));
    }

    #[test]
    fn two_qubit_interaction_only() {
        let mut p = params(2, 3);
        p.detunings = vec![0.0, 0.0];
        p.rabi = vec![0.0, 0.0];
        p.couplings[[0, 1]] = 1.7;
        p.couplings[[1, 0]] = 1.7;
        let h = build_hamiltonian(&p, 0.0);
        let want = crate::ops::operators::real_diag([0.0, 0.0, 0.0, 1.7]);
        assert_eq!(h, want);
    }

    #[test]
    fn matches_operator_algebra_construction() {
        for n in 1..=4 {
            for (seed, x) in [(1u64, 0.0), (2, 0.37), (3, -1.2)] {
                let p = params(n, seed);
                let got = build_hamiltonian(&p, x);
                let want = operator_algebra_oracle(&p, x);
                let err = (&got - &want).iter().map(|z| z.norm()).fold(0.0, f64::max);
                assert!(err < 1e-13, "n={n} seed={seed}: {err:e}");
            }
        }
    }

    #[test]
    fn affine_in_input() {
        let p = params(3, 11);
        let d = build_hamiltonian(&p, 0.3) - build_hamiltonian(&p, 0.0);
        let mut sum_sd = Array2::<C64>::zeros((8, 8));
        for j in 0..3 {
            sum_sd = sum_sd + site_operator(SiteOperator::SDown, j, 3).unwrap();
        }
        let want = sum_sd.mapv(|z| z * (-0.3 * p.scale_s));
        let err = (&d - &want).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        let via_generator = encoding_operator(&p).mapv(|z| z * 0.3);
        let err = (&d - &via_generator).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn hermitian_for_all_inputs() {
        let p = params(4, 5);
        for x in [-3.0, -0.1, 0.0, 0.5, 10.0] {
            assert!(hermiticity_defect(&build_hamiltonian(&p, x)) <= 1e-12);
        }
    }
}
