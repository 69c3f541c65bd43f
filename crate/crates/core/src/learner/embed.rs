use ndarray::{s, Array2, ArrayView2};

use crate::error::{argument, Result};

/// Delay-embedded readout matrix.
///
/// Column `t` holds `[φ(x_{t+δ}); φ(x_{t+δ−1}); …; φ(x_t)]`, followed by a
/// constant 1 when the bias row is enabled, so it lines up with sample
/// index `t + δ` of the original series.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedFeatures {
    pub base_k: usize,
    pub delta: usize,
    pub bias: bool,
    pub values: Array2<f64>,
}

impl EmbeddedFeatures {
    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    /// Original sample index of embedded column `t`.
    pub fn sample_index(&self, t: usize) -> usize {
        t + self.delta
    }
}

pub fn embedded_rows(base_k: usize, delta: usize, bias: bool) -> usize {
    base_k * (delta + 1) + usize::from(bias)
}

pub fn delay_embed(features: ArrayView2<f64>, delta: usize, bias: bool) -> Result<EmbeddedFeatures> {
    let (k, t) = features.dim();
    if delta >= t {
        return Err(argument(format!("delay {delta} needs more than {t} samples")));
    }
    let cols = t - delta;
    let mut values = Array2::zeros((embedded_rows(k, delta, bias), cols));
    for j in 0..=delta {
        // Block j holds the features delayed by j steps.
        values.slice_mut(s![j * k..(j + 1) * k, ..]).assign(&features.slice(s![.., delta - j..delta - j + cols]));
    }
    if bias {
        values.row_mut(k * (delta + 1)).fill(1.0);
    }
    Ok(EmbeddedFeatures { base_k: k, delta, bias, values })
}

/// One embedded column built from the `δ+1` most recent feature vectors,
/// newest first.
pub fn embed_column<'a>(history: impl IntoIterator<Item = &'a [f64]>, bias: bool) -> Vec<f64> {
    let mut col: Vec<f64> = history.into_iter().flatten().copied().collect();
    if bias {
        col.push(1.0);
    }
    col
}
