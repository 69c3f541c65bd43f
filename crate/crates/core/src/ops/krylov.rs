//! Matrix-free GKSL propagation by Krylov projection.
//!
//! The generator maps Hermitian matrices to Hermitian matrices, so the
//! Arnoldi process runs over the real vector space of Hermitian matrices
//! with inner product `Re Tr(A†B)`. The projected Hessenberg matrix is real
//! and is exponentiated with the dense Padé routine. Step-size control
//! follows Sidje's EXPOKIT `expv`.

use ndarray::Array2;

use crate::error::{argument, integrity, Result};
use crate::expm::expm;
use std::f64::consts::SQRT_2;

use crate::linalg::{adjoint, CMatrix, C64, I};
use crate::ops::evolve::check_hamiltonian;
use crate::ops::lindblad::check_evolved;
use crate::ops::state::QuantumState;

/// Row-compressed operator that skips structural zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    rows: Vec<Vec<(usize, C64)>>,
}

impl SparseOperator {
    pub fn from_dense(m: &CMatrix) -> Self {
        let rows = m
            .rows()
            .into_iter()
            .map(|row| {
                row.iter().enumerate().filter(|(_, z)| z.re != 0.0 || z.im != 0.0).map(|(j, &z)| (j, z)).collect()
            })
            .collect();
        Self { dim: m.nrows(), rows }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    fn max_row_sum(&self) -> f64 {
        self.rows.iter().map(|r| r.iter().map(|(_, z)| z.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    fn max_col_sum(&self) -> f64 {
        let mut cols = vec![0.0; self.dim];
        for r in &self.rows {
            for &(j, z) in r {
                cols[j] += z.norm();
            }
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    fn frobenius_sq(&self) -> f64 {
        self.rows.iter().flatten().map(|(_, z)| z.norm_sqr()).sum()
    }

    /// `self · m`
    fn left_mul(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim;
        let mut out = Array2::<C64>::zeros((d, d));
        for (a, row) in self.rows.iter().enumerate() {
            let mut target = out.row_mut(a);
            for &(c, v) in row {
                target.zip_mut_with(&m.row(c), |o, &x| *o += v * x);
            }
        }
        out
    }

    /// `m · self`
    fn right_mul(&self, m: &CMatrix) -> CMatrix {
        let d = self.dim;
        let mut out = Array2::<C64>::zeros((d, d));
        for (c, row) in self.rows.iter().enumerate() {
            for &(b, v) in row {
                let mut target = out.column_mut(b);
                target.zip_mut_with(&m.column(c), |o, &x| *o += x * v);
            }
        }
        out
    }

    /// Accumulates `self · m · self†` into `out`.
    fn add_sandwich(&self, m: &CMatrix, out: &mut CMatrix) {
        for (a, ra) in self.rows.iter().enumerate() {
            for &(c, la) in ra {
                for (b, rb) in self.rows.iter().enumerate() {
                    for &(e, lb) in rb {
                        out[[a, b]] += la * m[[c, e]] * lb.conj();
                    }
                }
            }
        }
    }
}

/// GKSL generator applied without materializing the superoperator.
#[derive(Debug, Clone)]
pub struct LindbladAction {
    dim: usize,
    hamiltonian: SparseOperator,
    jumps: Vec<SparseOperator>,
    decay: SparseOperator,
    /// `H − ½i Σ_j L_j†L_j`.
    effective: SparseOperator,
    /// Nonzero `(row, col, value)` triples of each jump operator.
    jump_entries: Vec<Vec<(usize, usize, C64)>>,
}

impl LindbladAction {
    pub fn new(h: &CMatrix, jump_ops: &[CMatrix]) -> Result<Self> {
        check_hamiltonian(h)?;
        let d = h.nrows();
        let mut decay = Array2::<C64>::zeros((d, d));
        for (k, l) in jump_ops.iter().enumerate() {
            if l.dim() != (d, d) {
                return Err(argument(format!("jump operator {k} has shape {:?}, Hamiltonian is {d}x{d}", l.dim())));
            }
            decay = decay + adjoint(l).dot(l);
        }
        let effective = h - &decay.mapv(|z| 0.5 * I * z);
        let jumps: Vec<SparseOperator> = jump_ops.iter().map(SparseOperator::from_dense).collect();
        let jump_entries = jumps
            .iter()
            .map(|l| l.rows.iter().enumerate().flat_map(|(r, row)| row.iter().map(move |&(c, v)| (r, c, v))).collect())
            .collect();
        Ok(Self {
            dim: d,
            hamiltonian: SparseOperator::from_dense(h),
            jumps,
            decay: SparseOperator::from_dense(&decay),
            effective: SparseOperator::from_dense(&effective),
            jump_entries,
        })
    }

    pub fn system_dim(&self) -> usize {
        self.dim
    }

    /// `𝓛[ρ]` for an arbitrary square `ρ`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let comm = self.hamiltonian.left_mul(rho) - self.hamiltonian.right_mul(rho);
        let mut out = comm.mapv(|z| -I * z);
        for l in &self.jumps {
            l.add_sandwich(rho, &mut out);
        }
        if self.decay.nnz() > 0 {
            let anti = self.decay.left_mul(rho) + self.decay.right_mul(rho);
            out.zip_mut_with(&anti, |o, &a| *o -= 0.5 * a);
        }
        out
    }

    /// `𝓛[ρ]` for Hermitian `ρ` in packed coordinates. With
    /// `H_eff = H − ½iK`, `𝓛[ρ] = −i(H_eff ρ − (H_eff ρ)†) + Σ_j L_j ρ L_j†`,
    /// and only the upper triangle is formed.
    fn apply_packed(&self, v: &[f64], out: &mut [f64]) {
        let d = self.dim;
        let rho = unpack_flat(v, d);
        let mut a = vec![C64::new(0.0, 0.0); d * d];
        for (r, row) in self.effective.rows.iter().enumerate() {
            let target = &mut a[r * d..(r + 1) * d];
            for &(c, val) in row {
                let src = &rho[c * d..(c + 1) * d];
                target.iter_mut().zip(src).for_each(|(t, &x)| *t += val * x);
            }
        }
        let mut upper = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for c in r..d {
                upper[r * d + c] = -I * (a[r * d + c] - a[c * d + r].conj());
            }
        }
        for entries in &self.jump_entries {
            for &(r, x, lr) in entries {
                for &(c, y, lc) in entries {
                    if c >= r {
                        upper[r * d + c] += lr * rho[x * d + y] * lc.conj();
                    }
                }
            }
        }
        for r in 0..d {
            out[r] = upper[r * d + r].re;
        }
        let mut k = d;
        for r in 0..d {
            for c in r + 1..d {
                let z = upper[r * d + c] * SQRT_2;
                out[k] = z.re;
                out[k + 1] = z.im;
                k += 2;
            }
        }
    }

    /// Upper bound on the induced ∞-norm of the vectorized generator.
    fn norm_bound(&self) -> f64 {
        let h = self.hamiltonian.max_row_sum() + self.hamiltonian.max_col_sum();
        let jumps: f64 = self.jumps.iter().map(|l| l.max_row_sum() * l.max_col_sum()).sum();
        let decay = self.decay.max_row_sum() + self.decay.max_col_sum();
        h + jumps + 0.5 * decay
    }

    /// `2 Σ_j ‖L_j‖²_F`, which bounds the trace-norm size of the dissipator.
    pub fn dissipator_bound(&self) -> f64 {
        2.0 * self.jumps.iter().map(SparseOperator::frobenius_sq).sum::<f64>()
    }
}

fn hermitize(m: &mut CMatrix) {
    let d = m.nrows();
    for a in 0..d {
        m[[a, a]].im = 0.0;
        for b in a + 1..d {
            let avg = 0.5 * (m[[a, b]] + m[[b, a]].conj());
            m[[a, b]] = avg;
            m[[b, a]] = avg.conj();
        }
    }
}

/// Real coordinates of a Hermitian matrix: the diagonal, then `√2·Re` and
/// `√2·Im` of the strict upper triangle, so the dot product is `Re Tr(A†B)`.
fn pack(m: &CMatrix) -> Vec<f64> {
    let d = m.nrows();
    let mut v = Vec::with_capacity(d * d);
    v.extend((0..d).map(|a| m[[a, a]].re));
    for a in 0..d {
        for b in a + 1..d {
            let z = m[[a, b]] * SQRT_2;
            v.push(z.re);
            v.push(z.im);
        }
    }
    v
}

fn unpack_flat(v: &[f64], d: usize) -> Vec<C64> {
    let mut m = vec![C64::new(0.0, 0.0); d * d];
    for a in 0..d {
        m[a * d + a] = C64::from(v[a]);
    }
    let mut k = d;
    for a in 0..d {
        for b in a + 1..d {
            let z = C64::new(v[k], v[k + 1]) / SQRT_2;
            m[a * d + b] = z;
            m[b * d + a] = z.conj();
            k += 2;
        }
    }
    m
}

fn unpack(v: &[f64], d: usize) -> CMatrix {
    let mut m = Array2::<C64>::zeros((d, d));
    for a in 0..d {
        m[[a, a]] = C64::from(v[a]);
    }
    let mut k = d;
    for a in 0..d {
        for b in a + 1..d {
            let z = C64::new(v[k], v[k + 1]) / SQRT_2;
            m[[a, b]] = z;
            m[[b, a]] = z.conj();
            k += 2;
        }
    }
    m
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

fn round_two_digits(x: f64) -> f64 {
    let s = 10f64.powf(x.log10().floor() - 1.0);
    (x / s).ceil() * s
}

/// Options for [`krylov_evolve`].
#[derive(Debug, Clone, Copy)]
pub struct KrylovOptions {
    /// Maximum Krylov subspace dimension per step.
    pub subspace: usize,
    /// Local error tolerance per unit time.
    pub tolerance: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self { subspace: 30, tolerance: 1e-10 }
    }
}

/// `exp(𝓛τ)[ρ₀]` by the action of the exponential on a Hermitian `ρ₀`.
pub fn krylov_evolve(rho0: &QuantumState, gen: &LindbladAction, tau: f64, opts: KrylovOptions) -> Result<QuantumState> {
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(argument(format!("evolution time {tau} must be finite and non-negative")));
    }
    let mut w = rho0.to_density();
    if w.nrows() != gen.dim {
        return Err(argument(format!("state dimension {} does not match generator dimension {}", w.nrows(), gen.dim)));
    }
    if tau == 0.0 {
        return Ok(rho0.clone());
    }
    hermitize(&mut w);
    let out = expv(gen, &w, tau, opts)?;
    check_evolved(&out)?;
    Ok(QuantumState::Density(out))
}

fn expv(gen: &LindbladAction, w0: &CMatrix, t_out: f64, opts: KrylovOptions) -> Result<CMatrix> {
    const MAX_REJECT: usize = 10;
    const GAMMA: f64 = 0.9;
    const DELTA: f64 = 1.2;

    let d = gen.dim;
    let op = |v: &[f64]| {
        let mut out = vec![0.0; v.len()];
        gen.apply_packed(v, &mut out);
        out
    };
    let mut w = pack(w0);
    let m = opts.subspace.min(w.len()).max(1);
    let tol = opts.tolerance;
    let anorm = gen.norm_bound().max(f64::MIN_POSITIVE);
    let btol = 1e-13 * anorm.max(1.0);

    let mut beta = norm(&w);
    if beta == 0.0 {
        return Ok(w0.clone());
    }
    let mf = m as f64;
    let fact = ((mf + 1.0) / std::f64::consts::E).powf(mf + 1.0) * (2.0 * std::f64::consts::PI * (mf + 1.0)).sqrt();
    let mut xm = 1.0 / mf;
    let mut t_new = round_two_digits((1.0 / anorm) * ((fact * tol) / (4.0 * beta * anorm)).powf(xm));
    let mut t_now = 0.0;

    while t_now < t_out {
        let mut t_step = (t_out - t_now).min(t_new);
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
        let mut hess = Array2::<f64>::zeros((m + 2, m + 2));
        basis.push(w.iter().map(|x| x / beta).collect());

        let mut k1 = 2usize;
        let mut mb = m;
        for j in 0..m {
            let mut p = op(&basis[j]);
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(v, &p);
                hess[[i, j]] = hij;
                axpy(-hij, v, &mut p);
            }
            let s = norm(&p);
            if s < btol {
                k1 = 0;
                mb = j + 1;
                t_step = t_out - t_now;
                break;
            }
            hess[[j + 1, j]] = s;
            p.iter_mut().for_each(|x| *x /= s);
            basis.push(p);
        }
        let mut avnorm = 0.0;
        if k1 != 0 {
            hess[[m + 1, m]] = 1.0;
            avnorm = norm(&op(&basis[m]));
        }

        let mut rejects = 0;
        let (f, err_loc) = loop {
            let mx = mb + k1;
            let small = Array2::from_shape_fn((mx, mx), |(i, j)| C64::from(hess[[i, j]] * t_step));
            let f = expm(&small)?;
            if k1 == 0 {
                break (f, btol);
            }
            let phi1 = (beta * f[[m, 0]]).norm();
            let phi2 = (beta * f[[m + 1, 0]] * avnorm).norm();
            let err_loc = if phi1 > 10.0 * phi2 {
                xm = 1.0 / mf;
                phi2
            } else if phi1 > phi2 {
                xm = 1.0 / mf;
                (phi1 * phi2) / (phi1 - phi2)
            } else {
                xm = 1.0 / (mf - 1.0).max(1.0);
                phi1
            };
            if err_loc <= DELTA * t_step * tol {
                break (f, err_loc);
            }
            if rejects == MAX_REJECT {
                return Err(integrity("Krylov step size control failed to meet tolerance"));
            }
            t_step = round_two_digits(GAMMA * t_step * (t_step * tol / err_loc).powf(xm));
            rejects += 1;
        };

        let mx = mb + k1.saturating_sub(1);
        let mut next = vec![0.0; w.len()];
        for (i, v) in basis.iter().take(mx).enumerate() {
            axpy(beta * f[[i, 0]].re, v, &mut next);
        }
        w = next;
        beta = norm(&w);
        if !beta.is_finite() {
            return Err(integrity("Krylov propagation produced non-finite state"));
        }
        t_now += t_step;
        let err_loc = err_loc.max(anorm * f64::EPSILON);
        t_new = round_two_digits(GAMMA * t_step * (t_step * tol / err_loc).powf(xm));
        if beta == 0.0 {
            break;
        }
    }
    Ok(unpack(&w, d))
}
