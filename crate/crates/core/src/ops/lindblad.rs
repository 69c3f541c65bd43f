//! Dense GKSL generator on row-major vectorized density matrices.
//!
//! `vec(ρ)[i·d + j] = ρ[i, j]`, hence `vec(AρB) = (A ⊗ Bᵀ) vec(ρ)` and
//!
//! ```text
//! 𝓛 = −i(H ⊗ I − I ⊗ Hᵀ) + Σ_j [ L_j ⊗ L̄_j − ½ L_j†L_j ⊗ I − ½ I ⊗ (L_j†L_j)ᵀ ]
//! ```

use ndarray::{Array1, Array2};

use crate::error::{argument, integrity, Result};
use crate::expm::expm;
use crate::linalg::{adjoint, frobenius, hermiticity_defect, identity, kron, min_eigenvalue, CMatrix, C64, I};
use crate::ops::evolve::check_hamiltonian;
use crate::ops::state::{trace, QuantumState};

pub const EVOLVED_TRACE_TOL: f64 = 1e-9;
pub const EVOLVED_HERMITIAN_TOL: f64 = 1e-9;
pub const EVOLVED_POSITIVITY_TOL: f64 = -1e-8;

/// Dense superoperator of dimension `d² × d²` for a `d`-level system.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    system_dim: usize,
    matrix: CMatrix,
}

impl Liouvillian {
    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Largest entry of `vec(I)ᵀ 𝓛`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.system_dim;
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let mut acc = C64::from(0.0);
            for i in 0..d {
                acc += self.matrix[[i * d + i, col]];
            }
            worst = worst.max(acc.norm());
        }
        worst
    }

    /// `𝓛[ρ]` through the dense matrix.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.system_dim;
        let v = Array1::from_iter(rho.iter().copied());
        let out = self.matrix.dot(&v);
        Array2::from_shape_vec((d, d), out.to_vec()).expect("square reshape")
    }
}

pub fn vectorize(rho: &CMatrix) -> Array1<C64> {
    Array1::from_iter(rho.iter().copied())
}

pub fn unvectorize(v: &Array1<C64>, d: usize) -> CMatrix {
    Array2::from_shape_vec((d, d), v.to_vec()).expect("length d² vector")
}

/// Builds the GKSL generator for `dρ/dt = −i[H,ρ] + Σ_j (L_jρL_j† − ½{L_j†L_j, ρ})`.
pub fn lindblad_generator(h: &CMatrix, jump_ops: &[CMatrix]) -> Result<Liouvillian> {
    check_hamiltonian(h)?;
    let d = h.nrows();
    for (k, l) in jump_ops.iter().enumerate() {
        if l.dim() != (d, d) {
            return Err(argument(format!("jump operator {k} has shape {:?}, Hamiltonian is {d}x{d}", l.dim())));
        }
    }
    let id = identity(d);
    let mut gen = (kron(h, &id) - kron(&id, &h.t().to_owned())).mapv(|z| -I * z);
    for l in jump_ops {
        let k = adjoint(l).dot(l);
        gen = gen + kron(l, &l.mapv(|z| z.conj()));
        gen = gen - kron(&k, &id).mapv(|z| 0.5 * z);
        gen = gen - kron(&id, &k.t().to_owned()).mapv(|z| 0.5 * z);
    }
    Ok(Liouvillian { system_dim: d, matrix: gen })
}

/// Checks an evolved density matrix against the propagation tolerances.
pub(crate) fn check_evolved(rho: &CMatrix) -> Result<()> {
    let tr = trace(rho);
    if (tr.re - 1.0).abs() > EVOLVED_TRACE_TOL || tr.im.abs() > EVOLVED_TRACE_TOL {
        return Err(integrity(format!("evolved trace {tr} deviates from 1")));
    }
    let defect = hermiticity_defect(rho);
    if defect > EVOLVED_HERMITIAN_TOL {
        return Err(integrity(format!("evolved state lost Hermiticity ({defect:e})")));
    }
    let lo = min_eigenvalue(rho)?;
    if lo < EVOLVED_POSITIVITY_TOL {
        return Err(integrity(format!("evolved state has eigenvalue {lo:e}")));
    }
    Ok(())
}

/// `ρ_τ = exp(𝓛τ)[ρ₀]` with a dense scaling-and-squaring exponential.
pub fn dissipative_evolve(rho0: &QuantumState, gen: &Liouvillian, tau: f64) -> Result<QuantumState> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(argument(format!("evolution time {tau} must be finite and non-negative")));
    }
    let rho = match rho0 {
        QuantumState::Density(m) => m.clone(),
        QuantumState::Pure(_) => return Err(argument("dissipative_evolve needs a density matrix")),
    };
    let d = gen.system_dim;
    if rho.nrows() != d {
        return Err(argument(format!("state dimension {} does not match generator dimension {d}", rho.nrows())));
    }
    if tau == 0.0 {
        return Ok(rho0.clone());
    }
    let prop = expm(&gen.matrix.mapv(|z| z * tau))?;
    let out = unvectorize(&prop.dot(&vectorize(&rho)), d);
    check_evolved(&out)?;
    Ok(QuantumState::Density(out))
}

/// Frobenius distance between two density matrices.
pub fn density_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    frobenius((a - b).view())
}
