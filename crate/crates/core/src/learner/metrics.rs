use crate::error::{argument, Error, Result};

/// Normalized-error threshold that ends the valid prediction window.
pub const VPTS_THRESHOLD: f64 = 0.4;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub nmse: f64,
    pub vpts: Option<usize>,
    /// `(y_t − ŷ_t)² / Var(y)` per step.
    pub step_errors: Vec<f64>,
}

fn check_pair(targets: &[f64], predictions: &[f64], min_len: usize) -> Result<()> {
    if targets.len() != predictions.len() {
        return Err(argument(format!("{} targets but {} predictions", targets.len(), predictions.len())));
    }
    if targets.len() < min_len {
        return Err(argument(format!("need at least {min_len} samples, got {}", targets.len())));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn squared_deviation(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|y| (y - m).powi(2)).sum()
}

fn constant_target() -> Error {
    Error::UndefinedMetric("target series has zero variance".into())
}

/// `Σ(y − ŷ)² / Σ(y − ȳ)²`.
pub fn nmse(targets: &[f64], predictions: &[f64]) -> Result<f64> {
    check_pair(targets, predictions, 2)?;
    let den = squared_deviation(targets);
    if den == 0.0 {
        return Err(constant_target());
    }
    let num: f64 = targets.iter().zip(predictions).map(|(y, p)| (y - p).powi(2)).sum();
    Ok(num / den)
}

/// `(y_t − ŷ_t)² / Var(y)` with `Var` the mean squared deviation.
pub fn step_errors(targets: &[f64], predictions: &[f64]) -> Result<Vec<f64>> {
    check_pair(targets, predictions, 1)?;
    let var = squared_deviation(targets) / targets.len() as f64;
    if var == 0.0 {
        return Err(constant_target());
    }
    Ok(targets.iter().zip(predictions).map(|(y, p)| (y - p).powi(2) / var).collect())
}

/// Index of the first step whose error reaches `threshold`; the length if
/// none does.
pub fn first_crossing(errors: &[f64], threshold: f64) -> usize {
    errors.iter().position(|&e| !(e < threshold)).unwrap_or(errors.len())
}

pub fn vpts(targets: &[f64], predictions: &[f64], threshold: f64) -> Result<usize> {
    if !(threshold > 0.0) {
        return Err(argument(format!("threshold must be positive, got {threshold}")));
    }
    Ok(first_crossing(&step_errors(targets, predictions)?, threshold))
}

/// Pearson correlation; `None` when either side is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let (ma, mb) = (mean(a), mean(b));
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let (va, vb) = (squared_deviation(a), squared_deviation(b));
    (va > 0.0 && vb > 0.0).then(|| cov / (va * vb).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nmse_reference_values() {
        let y = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(nmse(&y, &y).unwrap(), 0.0);
        let m = [3.75; 4];
        assert!((nmse(&y, &m).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(nmse(&[2.0, 2.0], &[1.0, 2.0]), Err(Error::UndefinedMetric(_))));
        assert!(matches!(nmse(&[2.0], &[1.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn vpts_reference_values() {
        let y: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        assert_eq!(vpts(&y, &y, 0.4).unwrap(), 10);
        let mut p = y.clone();
        p[5] += 10.0;
        p[7] += 10.0;
        assert_eq!(vpts(&y, &p, 0.4).unwrap(), 5);
        assert!(vpts(&y, &y, 0.0).is_err());
    }

    #[test]
    fn crossing_counts_nan_as_failure() {
        assert_eq!(first_crossing(&[0.1, f64::NAN, 0.1], 0.4), 1);
        assert_eq!(first_crossing(&[], 0.4), 0);
    }

    #[test]
    fn pearson_basics() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson(&[1.0, 1.0], &[1.0, 2.0]).is_none());
    }
}
