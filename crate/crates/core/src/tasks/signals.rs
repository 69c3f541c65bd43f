//! Input series and target functions.

use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{argument, Result};
use crate::rng::{seeded, Stream};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub step: f64,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn grid(t_start: f64, t_end: f64, n: usize) -> Result<(Vec<f64>, f64)> {
    if n < 2 {
        return Err(argument(format!("a grid needs at least 2 points, got {n}")));
    }
    if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
        return Err(argument(format!("grid bounds [{t_start}, {t_end}] are invalid")));
    }
    let step = (t_end - t_start) / (n - 1) as f64;
    let mut times: Vec<f64> = (0..n).map(|i| t_start + i as f64 * step).collect();
    times[n - 1] = t_end;
    Ok((times, step))
}

/// Inclusive uniform grid whose values are the times themselves.
pub fn gen_grid_input(t_start: f64, t_end: f64, n: usize) -> Result<TimeSeries> {
    let (times, step) = grid(t_start, t_end, n)?;
    Ok(TimeSeries { values: times.clone(), times, step })
}

/// `u(t) = Σ_j sin(ω_j t − φ_j)` on `[0, 2π]` with `ω_j ~ N(2f₀, f₀)` and
/// `φ_j ~ U[0, 2π)`, drawn from the task stream in the order
/// `ω_1, φ_1, ω_2, φ_2, …`.
pub fn gen_random_sinusoid(seed: u64, f0: f64, n_terms: usize, n: usize) -> Result<TimeSeries> {
    let (times, step) = grid(0.0, 2.0 * std::f64::consts::PI, n)?;
    let (freqs, phases) = sinusoid_parameters(seed, f0, n_terms)?;
    let values = times.iter().map(|&t| freqs.iter().zip(&phases).map(|(w, p)| (w * t - p).sin()).sum()).collect();
    Ok(TimeSeries { times, values, step })
}

pub fn sinusoid_parameters(seed: u64, f0: f64, n_terms: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let freq = Normal::new(2.0 * f0, f0.abs()).map_err(|e| argument(format!("invalid frequency scale {f0}: {e}")))?;
    let phase = Uniform::new(0.0, 2.0 * std::f64::consts::PI).expect("valid range");
    let mut rng = seeded(seed, Stream::Task);
    let mut freqs = Vec::with_capacity(n_terms);
    let mut phases = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        freqs.push(freq.sample(&mut rng));
        phases.push(rng.sample(phase));
    }
    Ok((freqs, phases))
}

pub const TARGET_NAMES: [&str; 7] = ["poly1", "poly2", "poly3", "sin", "cos", "trigpoly", "u2_minus_u3"];

fn target_fn(name: &str) -> Option<fn(f64) -> f64> {
    Some(match name {
        "poly1" => |u| u,
        "poly2" => |u| u * u,
        "poly3" => |u| u * u * u,
        "sin" => f64::sin,
        "cos" => f64::cos,
        "trigpoly" => |t| {
            t * t.sin()
                + t.powi(2) * (2.0 * t - 0.2).cos()
                + t.powi(3) * (5.0 * t + 0.4).sin()
                + t.powi(4) * (4.0 * t - 0.3).cos()
        },
        "u2_minus_u3" => |u| u * u - u * u * u,
        _ => return None,
    })
}

pub fn named_target(name: &str, u: &[f64]) -> Result<Vec<f64>> {
    let f = target_fn(name)
        .ok_or_else(|| argument(format!("unknown target {name:?}; expected one of {}", TARGET_NAMES.join(", "))))?;
    Ok(u.iter().map(|&x| f(x)).collect())
}

/// Expands `group1` (u, u², u³) and `group2` (sin u, cos u); other names
/// pass through.
pub fn expand_targets(names: &[String]) -> Vec<String> {
    names
        .iter()
        .flat_map(|n| match n.as_str() {
            "group1" => vec!["poly1".to_owned(), "poly2".to_owned(), "poly3".to_owned()],
            "group2" => vec!["sin".to_owned(), "cos".to_owned()],
            _ => vec![n.clone()],
        })
        .collect()
}
