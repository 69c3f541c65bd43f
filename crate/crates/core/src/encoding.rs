//! State encoding versus Hamiltonian encoding.
//!
//! For `H(x) = H₀ + x·Hₓ` and a fixed initial state, the final state
//! `e^{−iH(x)τ}|ψ₀⟩` can equally be produced by evolving a prepared state
//! `Σ_j c_j(x)|j₀⟩` under `H₀`. This module builds those coefficients exactly,
//! gives their first-order perturbative ingredients, and checks the
//! equivalence on a sampled reservoir.
//!
//! Index convention: with `|ψ₀⟩ = Σ_l c⁰_l |l₀⟩`,
//!
//! ```text
//! c_j(x) = e^{iτE⁰_j} Σ_k e^{−iτE^x_k} ⟨j₀|k_x⟩ Σ_l ⟨k_x|l₀⟩ c⁰_l
//! ```
//!
//! so `l` runs over the initial-state expansion and `j` labels the output
//! component. This is the form that reproduces the exact propagator.

use ndarray::{Array1, Array2};

use crate::error::{argument, integrity, Error, Result};
use crate::linalg::{adjoint, eigh, ensure_hermitian, ensure_square, CMatrix, CVector, C64};
use crate::ops::{build_hamiltonian, encoding_operator, unitary_evolve, QuantumState};
use crate::reservoir::ReservoirParams;

/// Spectral gaps below this are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-8;
/// Bound on `‖H v_k − E_k v_k‖`, relative to `max(1, max|E|)`.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Ascending.
    pub eigenvalues: Array1<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`, with its
    /// largest-magnitude component real and positive.
    pub eigenvectors: CMatrix,
    /// Smallest gap between consecutive eigenvalues (∞ for dimension 1).
    pub min_gap: f64,
}

impl SpectralData {
    pub fn new(h: &CMatrix) -> Result<Self> {
        let n = ensure_square(h, "Hamiltonian")?;
        ensure_hermitian(h, 1e-12, "Hamiltonian")?;
        let (eigenvalues, mut vectors) = eigh(h)?;
        for k in 0..n {
            let mut col = vectors.column_mut(k);
            let pivot = col.iter().copied().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap_or(C64::new(1.0, 0.0));
            let phase = pivot.conj() / pivot.norm();
            col.mapv_inplace(|z| z * phase);
        }
        let scale = eigenvalues.iter().fold(1.0_f64, |m, e| m.max(e.abs()));
        let hv = h.dot(&vectors);
        for k in 0..n {
            let r = (0..n).map(|i| (hv[[i, k]] - vectors[[i, k]] * eigenvalues[k]).norm_sqr()).sum::<f64>().sqrt();
            if r > EIGEN_RESIDUAL_TOL * scale {
                return Err(integrity(format!("eigenpair {k} residual {r:e}")));
            }
        }
        let min_gap = eigenvalues.windows(2).into_iter().map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        Ok(Self { eigenvalues, eigenvectors: vectors, min_gap })
    }

    /// Fails with [`Error::Degeneracy`] unless every gap exceeds the threshold.
    pub fn require_nondegenerate(&self) -> Result<()> {
        if self.min_gap > DEGENERACY_THRESHOLD {
            Ok(())
        } else {
            Err(Error::Degeneracy { gap: self.min_gap, threshold: DEGENERACY_THRESHOLD })
        }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// First-order estimates of the perturbed spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrder {
    /// `E⁰_k + x⟨k₀|Hₓ|k₀⟩`.
    pub eigenvalues: Array1<f64>,
    /// Entry `[j, k]` estimates `⟨j₀|k_x⟩ = δ_jk + x⟨j₀|Hₓ|k₀⟩/(E⁰_k − E⁰_j)`.
    pub overlaps: CMatrix,
}

fn check_pair(h0: &CMatrix, hx: &CMatrix) -> Result<SpectralData> {
    let n = ensure_square(h0, "H0")?;
    if ensure_square(hx, "Hx")? != n {
        return Err(argument(format!("H0 is {n}x{n} but Hx is {0}x{0}", hx.nrows())));
    }
    ensure_hermitian(hx, 1e-12, "Hx")?;
    let s0 = SpectralData::new(h0)?;
    s0.require_nondegenerate()?;
    Ok(s0)
}

fn coefficients(s0: &SpectralData, h0: &CMatrix, hx: &CMatrix, x: f64, tau: f64, c0: &CVector) -> Result<CVector> {
    let n = s0.dim();
    let h = h0 + &hx.mapv(|z| z * x);
    let sx = SpectralData::new(&h)?;
    // overlap[[j, k]] = ⟨j₀|k_x⟩
    let overlap = adjoint(&s0.eigenvectors).dot(&sx.eigenvectors);
    // ⟨k_x|ψ₀⟩ phased by the perturbed energies.
    let weights: CVector = Array1::from_shape_fn(n, |k| {
        let proj: C64 = (0..n).map(|l| overlap[[l, k]].conj() * c0[l]).sum();
        C64::from_polar(1.0, -tau * sx.eigenvalues[k]) * proj
    });
    let mixed = overlap.dot(&weights);
    Ok(Array1::from_shape_fn(n, |j| C64::from_polar(1.0, tau * s0.eigenvalues[j]) * mixed[j]))
}

/// Coefficients `c_j(x)` in the `H₀` eigenbasis of the initial state that,
/// evolved under `H₀` for `tau`, reproduces `e^{−i(H₀+xHₓ)τ}|ψ₀⟩`.
/// `c0` is `|ψ₀⟩` expanded in the same eigenbasis.
pub fn state_encoding_coefficients(h0: &CMatrix, hx: &CMatrix, x: f64, tau: f64, c0: &CVector) -> Result<CVector> {
    if !x.is_finite() || !tau.is_finite() {
        return Err(argument("x and tau must be finite"));
    }
    let s0 = check_pair(h0, hx)?;
    if c0.len() != s0.dim() {
        return Err(argument(format!("c0 has length {} for dimension {}", c0.len(), s0.dim())));
    }
    let norm = c0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(argument(format!("c0 has norm {norm}")));
    }
    coefficients(&s0, h0, hx, x, tau, c0)
}

pub fn perturbation_first_order(h0: &CMatrix, hx: &CMatrix, x: f64) -> Result<FirstOrder> {
    if !x.is_finite() {
        return Err(argument("x must be finite"));
    }
    let s0 = check_pair(h0, hx)?;
    let n = s0.dim();
    let v = &s0.eigenvectors;
    let m = adjoint(v).dot(hx).dot(v);
    let e0 = &s0.eigenvalues;
    let eigenvalues = Array1::from_shape_fn(n, |k| e0[k] + x * m[[k, k]].re);
    let overlaps =
        Array2::from_shape_fn(
            (n, n),
            |(j, k)| {
                if j == k {
                    C64::new(1.0, 0.0)
                } else {
                    m[[j, k]] * (x / (e0[k] - e0[j]))
                }
            },
        );
    Ok(FirstOrder { eigenvalues, overlaps })
}

/// Largest 2-norm distance, over `xs`, between the Hamiltonian-encoded final
/// state and its state-encoded reconstruction. Closed systems only.
pub fn verify_encoding_equivalence(params: &ReservoirParams, xs: &[f64]) -> Result<f64> {
    if params.gamma > 0.0 {
        return Err(Error::Unsupported(format!(
            "encoding equivalence holds for unitary evolution; gamma = {}",
            params.gamma
        )));
    }
    let psi0 = match &params.initial_state {
        QuantumState::Pure(psi) => psi.clone(),
        QuantumState::Density(_) => return Err(Error::Unsupported("mixed initial state".into())),
    };
    let h0 = build_hamiltonian(params, 0.0);
    let hx = encoding_operator(params);
    let s0 = check_pair(&h0, &hx)?;
    let v0 = &s0.eigenvectors;
    let c0 = adjoint(v0).dot(&psi0);
    let mut worst = 0.0_f64;
    for &x in xs {
        if !x.is_finite() {
            return Err(argument(format!("input {x} is not finite")));
        }
        let c = coefficients(&s0, &h0, &hx, x, params.tau, &c0)?;
        let phased: CVector =
            Array1::from_shape_fn(c.len(), |j| C64::from_polar(1.0, -params.tau * s0.eigenvalues[j]) * c[j]);
        let rebuilt = v0.dot(&phased);
        let exact = unitary_evolve(&params.initial_state, &build_hamiltonian(params, x), params.tau)?;
        let exact = exact.as_pure().expect("unitary evolution of a pure state");
        let dev = exact.iter().zip(&rebuilt).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        worst = worst.max(dev);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expm::expm;
    use crate::linalg::I;
    use crate::reservoir::{sample_parameters, ReservoirConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = Array2::from_shape_fn((n, n), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        (&a + &adjoint(&a)).mapv(|z| z * 0.5)
    }

    fn random_state(rng: &mut ChaCha8Rng, n: usize) -> CVector {
        let v = Array1::from_shape_fn(n, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.mapv(|z| z / norm)
    }

    #[test]
    fn zero_input_returns_initial_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h0 = random_hermitian(&mut rng, 4);
        let hx = random_hermitian(&mut rng, 4);
        let c0 = random_state(&mut rng, 4);
        let c = state_encoding_coefficients(&h0, &hx, 0.0, 2.3, &c0).unwrap();
        for (a, b) in c.iter().zip(&c0) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn reconstruction_matches_exact_propagator() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (h0, hx) = (random_hermitian(&mut rng, 4), random_hermitian(&mut rng, 4));
        let psi0 = random_state(&mut rng, 4);
        let (tau, x) = (1.7, 0.1);
        let s0 = SpectralData::new(&h0).unwrap();
        let c0 = adjoint(&s0.eigenvectors).dot(&psi0);
        let c = state_encoding_coefficients(&h0, &hx, x, tau, &c0).unwrap();
        let phased = Array1::from_shape_fn(4, |j| C64::from_polar(1.0, -tau * s0.eigenvalues[j]) * c[j]);
        let rebuilt = s0.eigenvectors.dot(&phased);
        let u = expm(&(&h0 + &hx.mapv(|z| z * x)).mapv(|z| -I * tau * z)).unwrap();
        let exact = u.dot(&psi0);
        for (a, b) in rebuilt.iter().zip(&exact) {
            assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn commuting_pair_is_phase_encoding() {
        let h0 = Array2::from_diag(&Array1::from_vec(vec![0.0, 1.0, 2.5, 4.0]).mapv(C64::from));
        let hx = Array2::from_diag(&Array1::from_vec(vec![0.3, -0.7, 1.1, 0.2]).mapv(C64::from));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c0 = random_state(&mut rng, 4);
        let (x, tau) = (0.4, 1.3);
        let c = state_encoding_coefficients(&h0, &hx, x, tau, &c0).unwrap();
        for j in 0..4 {
            let expected = c0[j] * C64::from_polar(1.0, -tau * x * hx[[j, j]].re);
            assert!((c[j] - expected).norm() < 1e-12);
            assert!((c[j].norm() - c0[j].norm()).abs() < 1e-10);
        }
        let fo = perturbation_first_order(&h0, &hx, x).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let delta = if j == k { 1.0 } else { 0.0 };
                assert_eq!(fo.overlaps[[j, k]], C64::from(delta));
            }
        }
    }

    #[test]
    fn zero_perturbation_returns_unperturbed_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h0 = random_hermitian(&mut rng, 3);
        let hx = Array2::zeros((3, 3));
        let fo = perturbation_first_order(&h0, &hx, 0.5).unwrap();
        let s0 = SpectralData::new(&h0).unwrap();
        assert_eq!(fo.eigenvalues, s0.eigenvalues);
        for j in 0..3 {
            for k in 0..3 {
                let delta = if j == k { 1.0 } else { 0.0 };
                assert_eq!(fo.overlaps[[j, k]], C64::from(delta));
            }
        }
    }

    #[test]
    fn first_order_overlaps_track_exact_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (h0, hx) = (random_hermitian(&mut rng, 4), random_hermitian(&mut rng, 4));
        let x = 1e-4;
        let s0 = SpectralData::new(&h0).unwrap();
        let sx = SpectralData::new(&(&h0 + &hx.mapv(|z| z * x))).unwrap();
        let exact = adjoint(&s0.eigenvectors).dot(&sx.eigenvectors);
        let fo = perturbation_first_order(&h0, &hx, x).unwrap();
        for k in 0..4 {
            // Remove the residual phase freedom of |k_x⟩ relative to |k₀⟩.
            let phase = exact[[k, k]].conj() / exact[[k, k]].norm();
            for j in 0..4 {
                assert!((exact[[j, k]] * phase - fo.overlaps[[j, k]]).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn degenerate_h0_rejected() {
        let h0 = Array2::from_diag(&Array1::from_vec(vec![0.0, 1.0, 1.0 + 1e-9]).mapv(C64::from));
        let hx = Array2::zeros((3, 3));
        let c0 = Array1::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(matches!(state_encoding_coefficients(&h0, &hx, 0.1, 1.0, &c0), Err(Error::Degeneracy { .. })));
        assert!(matches!(perturbation_first_order(&h0, &hx, 0.1), Err(Error::Degeneracy { .. })));
    }

    #[test]
    fn unnormalized_c0_rejected() {
        let h0 = Array2::from_diag(&Array1::from_vec(vec![0.0, 1.0]).mapv(C64::from));
        let c0 = Array1::from_vec(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(
            state_encoding_coefficients(&h0, &Array2::zeros((2, 2)), 0.1, 1.0, &c0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn reservoir_equivalence() {
        let cfg = ReservoirConfig { n_qubits: 2, gamma: 0.0, seed: 9, ..Default::default() };
        let p = sample_parameters(&cfg).unwrap();
        assert!(verify_encoding_equivalence(&p, &[0.0]).unwrap() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let xs: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert!(verify_encoding_equivalence(&p, &xs).unwrap() < 1e-9);
    }

    #[test]
    fn dissipative_reservoir_unsupported() {
        let p = sample_parameters(&ReservoirConfig { n_qubits: 2, ..Default::default() }).unwrap();
        assert!(matches!(verify_encoding_equivalence(&p, &[0.1]), Err(Error::Unsupported(_))));
    }
}
