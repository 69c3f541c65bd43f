//! Dense complex linear-algebra helpers shared by the simulator.
//!
//! Matrices are `ndarray` arrays indexed `[row, col]`. The Hermitian
//! eigensolver is delegated to `nalgebra`.

use nalgebra::DMatrix;
use ndarray::{Array1, Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{integrity, validation, Result};

pub type C64 = Complex64;
pub type CMatrix = Array2<C64>;
pub type CVector = Array1<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity(dim: usize) -> CMatrix {
    Array2::from_diag_elem(dim, ONE)
}

/// Kronecker product `a ⊗ b`, with `a` as the slow (leftmost) index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ((i, j), &x) in a.indexed_iter() {
        if x == ZERO {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
        block.zip_mut_with(b, |o, &y| *o = x * y);
    }
    out
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

pub fn frobenius(a: ArrayView2<C64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Maximum absolute column sum.
pub fn one_norm(a: &CMatrix) -> f64 {
    a.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest entrywise deviation `|a_ij - conj(a_ji)|`.
pub fn hermiticity_defect(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn ensure_square(a: &CMatrix, what: &str) -> Result<usize> {
    let (r, c) = a.dim();
    if r != c || r == 0 {
        return Err(validation(format!("{what} must be square and non-empty, got {r}x{c}")));
    }
    Ok(r)
}

pub fn ensure_hermitian(a: &CMatrix, tol: f64, what: &str) -> Result<()> {
    ensure_square(a, what)?;
    let defect = hermiticity_defect(a);
    if !(defect <= tol) {
        return Err(validation(format!("{what} is not Hermitian: defect {defect:e} exceeds {tol:e}")));
    }
    Ok(())
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are returned in ascending order; column `k` of the second
/// array is the eigenvector for eigenvalue `k`.
pub fn eigh(a: &CMatrix) -> Result<(Array1<f64>, CMatrix)> {
    let n = ensure_square(a, "eigh input")?;
    if !is_finite(a) {
        return Err(validation("eigh input has non-finite entries"));
    }
    // Symmetrize so the solver sees an exactly Hermitian matrix.
    let m = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[[i, j]] + a[[j, i]].conj()));
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = Array1::from_iter(order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = Array2::from_shape_fn((n, n), |(i, k)| eig.eigenvectors[(i, order[k])]);
    Ok((values, vectors))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    let (values, _) = eigh(a)?;
    Ok(values[0])
}

/// Solves `a · x = b` by LU factorization with partial pivoting.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = ensure_square(a, "LU matrix")?;
    if b.nrows() != n {
        return Err(validation(format!("LU right-hand side has {} rows, expected {n}", b.nrows())));
    }
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (piv, pmax) =
            (k..n).map(|i| (i, lu[[i, k]].norm())).fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        if pmax == 0.0 || !pmax.is_finite() {
            return Err(integrity("singular matrix in LU solve"));
        }
        if piv != k {
            for j in 0..n {
                lu.swap([k, j], [piv, j]);
            }
            for j in 0..x.ncols() {
                x.swap([k, j], [piv, j]);
            }
        }
        let pivot = lu[[k, k]];
        for i in k + 1..n {
            let f = lu[[i, k]] / pivot;
            if f == ZERO {
                continue;
            }
            lu[[i, k]] = f;
            for j in k + 1..n {
                let u = lu[[k, j]];
                lu[[i, j]] -= f * u;
            }
            for j in 0..x.ncols() {
                let u = x[[k, j]];
                x[[i, j]] -= f * u;
            }
        }
    }
    for k in (0..n).rev() {
        let pivot = lu[[k, k]];
        for j in 0..x.ncols() {
            let mut acc = x[[k, j]];
            for m in k + 1..n {
                acc -= lu[[k, m]] * x[[m, j]];
            }
            x[[k, j]] = acc / pivot;
        }
    }
    Ok(x)
}
