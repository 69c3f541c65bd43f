//! Frozen random reservoir instances.
//!
//! Draw order from the reservoir stream of the seeded generator:
//! `Δ_j⁰` for j = 0..N, then `Ω_j`, then `V_{mn}` for `m < n` in
//! lexicographic order, then (Haar mode only) the real and imaginary parts
//! of each initial-state amplitude in basis order.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{CMatrix, C64};
use crate::ops::operators::{site_operator, two_site_operator, SiteOperator};
use crate::ops::state::QuantumState;
use crate::reservoir::config::{DissipationMode, InitialStateMode, ObservableSet, ReservoirConfig};
use crate::rng::{seeded, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct ReservoirParams {
    /// Resolved configuration (defaults for `v0` and `tau` filled in).
    pub config: ReservoirConfig,
    pub n_qubits: usize,
    pub detunings: Vec<f64>,
    pub rabi: Vec<f64>,
    /// Symmetric with zero diagonal.
    pub couplings: Array2<f64>,
    pub gamma: f64,
    pub tau: f64,
    pub scale_s: f64,
    pub initial_state: QuantumState,
    pub observables: Vec<CMatrix>,
    pub observable_labels: Vec<String>,
    pub jump_ops: Vec<CMatrix>,
}

impl ReservoirParams {
    pub fn feature_dim(&self) -> usize {
        self.observables.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }
}

fn normal(rng: &mut impl Rng, mean: f64, rel_width: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    mean + rel_width * mean.abs() * z
}

pub fn sample_parameters(config: &ReservoirConfig) -> Result<ReservoirParams> {
    config.validate()?;
    let n = config.n_qubits;
    let h = config.heterogeneity;
    let mut rng = seeded(config.seed, Stream::Reservoir);

    let detunings: Vec<f64> = (0..n).map(|_| normal(&mut rng, config.delta0, h)).collect();
    let rabi: Vec<f64> = (0..n).map(|_| normal(&mut rng, config.omega0, h)).collect();
    let mut couplings = Array2::zeros((n, n));
    let v0 = config.coupling_mean();
    for m in 0..n {
        for k in m + 1..n {
            let v = normal(&mut rng, v0, h);
            couplings[[m, k]] = v;
            couplings[[k, m]] = v;
        }
    }

    let dim = 1usize << n;
    let initial_state = match config.initial_state_mode {
        InitialStateMode::AllGround => QuantumState::basis(n, 0)?,
        InitialStateMode::HaarRandom => {
            let raw: Vec<C64> = (0..dim)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    C64::new(re, im)
                })
                .collect();
            let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            QuantumState::pure(Array1::from_iter(raw.into_iter().map(|z| z / norm)))?
        }
    };

    let (observables, observable_labels) = build_observables(config.observable_set, n)?;
    let jump_ops = build_jump_ops(config.dissipation_mode, config.gamma, n)?;

    let mut resolved = config.clone();
    resolved.v0 = Some(v0);
    resolved.tau = Some(config.evolution_time());

    Ok(ReservoirParams {
        config: resolved,
        n_qubits: n,
        detunings,
        rabi,
        couplings,
        gamma: config.gamma,
        tau: config.evolution_time(),
        scale_s: config.scale_s,
        initial_state,
        observables,
        observable_labels,
        jump_ops,
    })
}

pub fn build_observables(set: ObservableSet, n: usize) -> Result<(Vec<CMatrix>, Vec<String>)> {
    let mut ops = Vec::new();
    let mut labels = Vec::new();
    let singles: &[(SiteOperator, &str)] = match set {
        ObservableSet::ZOnly => &[(SiteOperator::SigmaZ, "z")],
        ObservableSet::Xyz | ObservableSet::XyzPlusZz => {
            &[(SiteOperator::SigmaX, "x"), (SiteOperator::SigmaY, "y"), (SiteOperator::SigmaZ, "z")]
        }
    };
    for &(kind, tag) in singles {
        for j in 0..n {
            ops.push(site_operator(kind, j, n)?);
            labels.push(format!("{tag}{j}"));
        }
    }
    if set == ObservableSet::XyzPlusZz {
        for m in 0..n {
            for k in m + 1..n {
                ops.push(two_site_operator(SiteOperator::SigmaZ, m, k, n)?);
                labels.push(format!("zz{m}_{k}"));
            }
        }
    }
    Ok((ops, labels))
}

pub fn build_jump_ops(mode: DissipationMode, gamma: f64, n: usize) -> Result<Vec<CMatrix>> {
    if gamma == 0.0 {
        return Ok(Vec::new());
    }
    (0..n)
        .map(|j| {
            Ok(match mode {
                DissipationMode::Projector => site_operator(SiteOperator::SDown, j, n)?.mapv(|z| z * gamma),
                DissipationMode::Lowering => site_operator(SiteOperator::Lower, j, n)?.mapv(|z| z * gamma.sqrt()),
            })
        })
        .collect()
}
