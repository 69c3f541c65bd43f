//! Input-to-feature map `x ↦ φ(x)` of a frozen reservoir.

use std::sync::atomic::{AtomicUsize, Ordering};

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{argument, Result};
use crate::ops::{
    build_hamiltonian, dissipative_evolve, expectation_values, krylov_evolve, lindblad_generator, unitary_evolve,
    KrylovOptions, LindbladAction, QuantumState,
};
use crate::reservoir::config::LindbladBackend;
use crate::reservoir::params::ReservoirParams;

/// Dissipation budget `τ·2Σ‖L_j‖²_F` under which the closed-system state is
/// within this trace distance of the open-system one.
pub const CERTIFIED_UNITARY_BOUND: f64 = 1e-13;

/// Propagation path chosen for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// γ under the configured closed-system threshold.
    Unitary,
    /// Dissipation small enough that the unitary result is certified.
    CertifiedUnitary,
    Krylov,
    Dense,
}

/// Anything that turns a scalar input into a fixed-length feature vector.
pub trait FeatureMap: Sync {
    fn feature_dim(&self) -> usize;
    fn featurize(&self, x: f64) -> Result<Vec<f64>>;
}

impl FeatureMap for ReservoirParams {
    fn feature_dim(&self) -> usize {
        self.observables.len()
    }

    fn featurize(&self, x: f64) -> Result<Vec<f64>> {
        featurize(self, x)
    }
}

pub fn route(params: &ReservoirParams) -> Route {
    if params.gamma < params.config.unitary_below_gamma || params.jump_ops.is_empty() {
        return Route::Unitary;
    }
    let budget: f64 =
        params.jump_ops.iter().map(|l| l.iter().map(|z| z.norm_sqr()).sum::<f64>()).sum::<f64>() * 2.0 * params.tau;
    if params.config.certified_shortcut && budget <= CERTIFIED_UNITARY_BOUND {
        return Route::CertifiedUnitary;
    }
    match params.config.backend {
        LindbladBackend::Krylov => Route::Krylov,
        LindbladBackend::Dense => Route::Dense,
    }
}

/// Evolved state `ρ(x)` (or `|ψ(x)⟩` on the closed-system routes).
pub fn evolve_input(params: &ReservoirParams, x: f64) -> Result<QuantumState> {
    if !x.is_finite() {
        return Err(argument(format!("input {x} is not finite")));
    }
    let h = build_hamiltonian(params, x);
    let psi0 = &params.initial_state;
    match route(params) {
        Route::Unitary | Route::CertifiedUnitary => match psi0 {
            QuantumState::Pure(_) => unitary_evolve(psi0, &h, params.tau),
            QuantumState::Density(_) => {
                let gen = LindbladAction::new(&h, &[])?;
                krylov_evolve(psi0, &gen, params.tau, KrylovOptions::default())
            }
        },
        Route::Krylov => {
            let gen = LindbladAction::new(&h, &params.jump_ops)?;
            krylov_evolve(psi0, &gen, params.tau, KrylovOptions::default())
        }
        Route::Dense => {
            let gen = lindblad_generator(&h, &params.jump_ops)?;
            let rho0 = QuantumState::Density(psi0.to_density());
            dissipative_evolve(&rho0, &gen, params.tau)
        }
    }
}

/// `φ(x)_k = Tr[ρ(x) O_k]`.
pub fn featurize(params: &ReservoirParams, x: f64) -> Result<Vec<f64>> {
    let state = evolve_input(params, x)?;
    expectation_values(&state, &params.observables)
}

/// `K × T` matrix whose column `t` is `φ(xs[t])`. Evaluated in parallel;
/// the result does not depend on the worker count.
pub fn featurize_batch<M: FeatureMap + ?Sized>(map: &M, xs: &[f64]) -> Result<Array2<f64>> {
    let k = map.feature_dim();
    let cols: Vec<Vec<f64>> = xs.par_iter().map(|&x| map.featurize(x)).collect::<Result<_>>()?;
    let mut out = Array2::zeros((k, xs.len()));
    for (t, col) in cols.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            out[[i, t]] = v;
        }
    }
    Ok(out)
}

/// Wraps a feature map and counts evaluations.
pub struct Counting<'a, M: ?Sized> {
    inner: &'a M,
    count: AtomicUsize,
}

impl<'a, M: FeatureMap + ?Sized> Counting<'a, M> {
    pub fn new(inner: &'a M) -> Self {
        Self { inner, count: AtomicUsize::new(0) }
    }

    pub fn evaluations(&self) -> usize {
        self.count.load(Ordering::Relaxed)
    }
}

impl<M: FeatureMap + ?Sized> FeatureMap for Counting<'_, M> {
    fn feature_dim(&self) -> usize {
        self.inner.feature_dim()
    }

    fn featurize(&self, x: f64) -> Result<Vec<f64>> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.featurize(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reservoir::{sample_parameters, DissipationMode, ReservoirConfig};

    fn small(gamma: f64, backend: LindbladBackend) -> ReservoirParams {
        sample_parameters(&ReservoirConfig { n_qubits: 3, gamma, backend, seed: 11, ..Default::default() }).unwrap()
    }

    #[test]
    fn routes() {
        assert_eq!(route(&small(0.0, LindbladBackend::Krylov)), Route::Unitary);
        assert_eq!(route(&small(1e-11, LindbladBackend::Krylov)), Route::Unitary);
        assert_eq!(route(&small(1e-8, LindbladBackend::Krylov)), Route::CertifiedUnitary);
        assert_eq!(route(&small(1.5e-2, LindbladBackend::Krylov)), Route::Krylov);
        assert_eq!(route(&small(1.5e-2, LindbladBackend::Dense)), Route::Dense);
    }

    #[test]
    fn dense_and_krylov_features_agree() {
        for mode in [DissipationMode::Projector, DissipationMode::Lowering] {
            let cfg = |backend| ReservoirConfig {
                n_qubits: 3,
                gamma: 0.3,
                dissipation_mode: mode,
                backend,
                seed: 4,
                ..Default::default()
            };
            let a = sample_parameters(&cfg(LindbladBackend::Krylov)).unwrap();
            let b = sample_parameters(&cfg(LindbladBackend::Dense)).unwrap();
            for x in [0.0, 0.37, 1.0] {
                let fa = featurize(&a, x).unwrap();
                let fb = featurize(&b, x).unwrap();
                for (u, v) in fa.iter().zip(&fb) {
                    assert!((u - v).abs() < 1e-10, "{mode:?} x={x}: {u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn certified_route_matches_open_system() {
        let certified = small(1e-8, LindbladBackend::Dense);
        let mut open = certified.clone();
        open.config.certified_shortcut = false;
        assert_eq!(route(&open), Route::Dense);
        let exact = featurize(&open, 0.6).unwrap();
        let fast = featurize(&certified, 0.6).unwrap();
        for (u, v) in exact.iter().zip(&fast) {
            assert!((u - v).abs() < 1e-12, "{u} vs {v}");
        }
    }

    #[test]
    fn features_bounded_and_deterministic() {
        let p = small(1.5e-2, LindbladBackend::Krylov);
        let xs: Vec<f64> = (0..8).map(|i| i as f64 / 7.0).collect();
        let a = featurize_batch(&p, &xs).unwrap();
        let b = featurize_batch(&p, &xs).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.dim(), (3, 8));
        assert!(a.iter().all(|v| v.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn non_finite_input_rejected() {
        let p = small(0.0, LindbladBackend::Krylov);
        assert!(featurize(&p, f64::NAN).is_err());
    }

    #[test]
    fn counting_wrapper() {
        let p = small(0.0, LindbladBackend::Krylov);
        let c = Counting::new(&p);
        featurize_batch(&c, &[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(c.evaluations(), 3);
    }
}
