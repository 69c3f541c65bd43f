use serde::{Deserialize, Serialize};

use crate::error::{argument, Error, Result};
use crate::ops::MAX_QUBITS;

/// Readout observable families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableSet {
    /// `σ_z^{(j)}` for every site (K = N).
    #[default]
    ZOnly,
    /// `σ_x^{(j)}`, `σ_y^{(j)}`, `σ_z^{(j)}` as three site blocks (K = 3N).
    Xyz,
    /// `Xyz` followed by `σ_z^{(m)}σ_z^{(n)}` for `m < n`.
    XyzPlusZz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStateMode {
    #[default]
    HaarRandom,
    AllGround,
}

/// Form of the per-qubit jump operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DissipationMode {
    /// `L_j = γ S_d^{(j)}`: pure dephasing at rate γ².
    #[default]
    Projector,
    /// `L_j = √γ σ₋^{(j)}`: amplitude damping at rate γ.
    Lowering,
}

/// How the density-matrix path evaluates `exp(𝓛τ)ρ₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LindbladBackend {
    /// Matrix-free Krylov action of the generator.
    #[default]
    Krylov,
    /// Dense `4^N × 4^N` Liouvillian with scaling and squaring.
    Dense,
}

/// Physical reservoir configuration; every random draw flows from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReservoirConfig {
    pub n_qubits: usize,
    /// Mean base detuning Δ₀.
    pub delta0: f64,
    /// Mean Rabi frequency Ω₀.
    pub omega0: f64,
    /// Mean pair coupling V₀; defaults to Ω₀.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Relative width of the parameter distributions.
    pub heterogeneity: f64,
    pub gamma: f64,
    /// Evolution window; defaults to 1.5π/Ω₀.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub scale_s: f64,
    pub observable_set: ObservableSet,
    pub initial_state_mode: InitialStateMode,
    pub dissipation_mode: DissipationMode,
    pub backend: LindbladBackend,
    /// γ below this value takes the closed-system path.
    pub unitary_below_gamma: f64,
    /// Use the closed-system path whenever the dissipation budget
    /// `τ·2Σ‖L_j‖²_F` is below [`CERTIFIED_UNITARY_BOUND`], which bounds the
    /// trace distance to the open-system state.
    ///
    /// [`CERTIFIED_UNITARY_BOUND`]: crate::reservoir::CERTIFIED_UNITARY_BOUND
    pub certified_shortcut: bool,
    pub seed: u64,
}

impl Default for ReservoirConfig {
    fn default() -> Self {
        Self {
            n_qubits: 5,
            delta0: 5.0,
            omega0: 2.0,
            v0: None,
            heterogeneity: 0.10,
            gamma: 1.5e-2,
            tau: None,
            scale_s: 1.0,
            observable_set: ObservableSet::ZOnly,
            initial_state_mode: InitialStateMode::HaarRandom,
            dissipation_mode: DissipationMode::Projector,
            backend: LindbladBackend::Krylov,
            unitary_below_gamma: 1e-10,
            certified_shortcut: true,
            seed: 0,
        }
    }
}

impl ReservoirConfig {
    pub fn coupling_mean(&self) -> f64 {
        self.v0.unwrap_or(self.omega0)
    }

    pub fn evolution_time(&self) -> f64 {
        self.tau.unwrap_or(1.5 * std::f64::consts::PI / self.omega0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 {
            return Err(argument("n_qubits must be at least 1"));
        }
        if self.n_qubits > MAX_QUBITS {
            return Err(Error::ResourceLimit(format!(
                "n_qubits = {} exceeds the dense-propagator limit of {MAX_QUBITS} \
                 (a 4^{} Liouvillian)",
                self.n_qubits, self.n_qubits
            )));
        }
        let finite = [
            ("delta0", self.delta0),
            ("omega0", self.omega0),
            ("v0", self.coupling_mean()),
            ("heterogeneity", self.heterogeneity),
            ("gamma", self.gamma),
            ("tau", self.evolution_time()),
            ("scale_s", self.scale_s),
            ("unitary_below_gamma", self.unitary_below_gamma),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(argument(format!("{name} must be finite, got {v}")));
            }
        }
        if self.evolution_time() <= 0.0 {
            return Err(argument("tau must be positive"));
        }
        if self.heterogeneity < 0.0 {
            return Err(argument("heterogeneity must be non-negative"));
        }
        if self.gamma < 0.0 {
            return Err(argument("gamma must be non-negative"));
        }
        Ok(())
    }
}
