use nalgebra::DMatrix;
use ndarray::{Array2, ArrayView2};

use crate::error::{argument, integrity, validation, Result};

/// Default Tikhonov parameter.
pub const DEFAULT_LAMBDA: f64 = 1e-4;

/// Relative residual required of the normal-equation solve.
pub const RIDGE_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutWeights {
    /// `D × K′`.
    pub weights: Array2<f64>,
    pub lambda: f64,
    /// The last feature row is the constant bias row.
    pub bias: bool,
}

impl ReadoutWeights {
    pub fn out_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn feature_dim(&self) -> usize {
        self.weights.ncols()
    }
}

fn to_na(a: &Array2<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// `W = Y Rᵀ (R Rᵀ + λI)⁻¹` through a Cholesky factorization of the Gram
/// matrix, with iterative refinement until the residual check passes.
pub fn ridge_fit(features: ArrayView2<f64>, targets: ArrayView2<f64>, lambda: f64) -> Result<ReadoutWeights> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(argument(format!("ridge parameter must be positive and finite, got {lambda}")));
    }
    if features.ncols() != targets.ncols() {
        return Err(argument(format!("features have {} columns, targets have {}", features.ncols(), targets.ncols())));
    }
    if features.iter().chain(targets.iter()).any(|v| !v.is_finite()) {
        return Err(validation("ridge inputs contain non-finite values"));
    }
    let k = features.nrows();
    let mut gram = features.dot(&features.t());
    for i in 0..k {
        gram[[i, i]] += lambda;
    }
    let rhs = features.dot(&targets.t());
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();

    let g = to_na(&gram);
    let chol = g.clone().cholesky().ok_or_else(|| integrity("Gram matrix is not numerically positive definite"))?;
    let b = to_na(&rhs);
    let mut x = chol.solve(&b);
    let mut residual = &b - &g * &x;
    for _ in 0..3 {
        if residual.norm() <= RIDGE_RESIDUAL_TOL * rhs_norm {
            break;
        }
        x += chol.solve(&residual);
        residual = &b - &g * &x;
    }
    let res = residual.norm();
    if res > RIDGE_RESIDUAL_TOL * rhs_norm {
        return Err(integrity(format!(
            "ridge residual {res:e} exceeds {RIDGE_RESIDUAL_TOL:e} of the right-hand side {rhs_norm:e}"
        )));
    }
    let weights = Array2::from_shape_fn((targets.nrows(), k), |(d, i)| x[(i, d)]);
    Ok(ReadoutWeights { weights, lambda, bias: false })
}

/// `W · R`, summed in a fixed order so single columns reproduce batch
/// results bit for bit.
pub fn predict(weights: &ReadoutWeights, features: ArrayView2<f64>) -> Result<Array2<f64>> {
    if features.nrows() != weights.feature_dim() {
        return Err(argument(format!("weights expect {} features, got {}", weights.feature_dim(), features.nrows())));
    }
    let mut out = Array2::zeros((weights.out_dim(), features.ncols()));
    for t in 0..features.ncols() {
        let col: Vec<f64> = features.column(t).to_vec();
        for (d, v) in predict_column(weights, &col)?.into_iter().enumerate() {
            out[[d, t]] = v;
        }
    }
    Ok(out)
}

pub fn predict_column(weights: &ReadoutWeights, feature: &[f64]) -> Result<Vec<f64>> {
    if feature.len() != weights.feature_dim() {
        return Err(argument(format!("weights expect {} features, got {}", weights.feature_dim(), feature.len())));
    }
    Ok(weights.weights.rows().into_iter().map(|w| w.iter().zip(feature).fold(0.0, |acc, (a, b)| acc + a * b)).collect())
}
