use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::learner::DEFAULT_LAMBDA;
use crate::tasks::signals::{expand_targets, gen_grid_input, gen_random_sinusoid, named_target, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// `y_t = f(x_t)` over a regular input grid.
    Regression,
    /// `y_t = F(u_t)` on a random multi-sinusoid series.
    #[default]
    Synthesis,
    /// Open-loop `k`-step-ahead prediction.
    NonautoPredict,
    /// Closed-loop one-step prediction fed back as input.
    AutoPredict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputSpec {
    /// Inclusive uniform grid; the input equals the grid coordinate.
    Grid { start: f64, end: f64 },
    /// Sum of `n_terms` unit sinusoids on `[0, 2π]` with `ω ~ N(2f₀, f₀)`.
    RandomSinusoid { f0: f64, n_terms: usize },
}

impl Default for InputSpec {
    fn default() -> Self {
        Self::RandomSinusoid { f0: 20.0, n_terms: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    /// First `n_train` samples train, the rest test.
    #[default]
    Contiguous,
    /// Every `p`-th sample (`p = n/n_test`) is held out for testing.
    Interleaved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaskSpec {
    pub kind: TaskKind,
    /// Named target functions; `group1` and `group2` expand to their
    /// members and the reported NMSE is their mean.
    pub targets: Vec<String>,
    pub input: InputSpec,
    pub n_train: usize,
    pub n_test: usize,
    pub split: SplitMode,
    pub delta: usize,
    /// Prediction offset `k` in samples.
    pub offset: usize,
    /// Closed-loop steps; defaults to the whole test window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    pub lambda: f64,
    pub bias: bool,
    pub seed: u64,
}

impl Default for TaskSpec {
    fn default() -> Self {
        Self {
            kind: TaskKind::Synthesis,
            targets: vec!["u2_minus_u3".into()],
            input: InputSpec::default(),
            n_train: 600,
            n_test: 400,
            split: SplitMode::Contiguous,
            delta: 0,
            offset: 1,
            horizon: None,
            lambda: DEFAULT_LAMBDA,
            bias: true,
            seed: 0,
        }
    }
}

impl TaskSpec {
    /// Grid regression on `[0, 1]` with 2500 points, every fifth held out.
    pub fn regression(targets: &[&str]) -> Self {
        Self {
            kind: TaskKind::Regression,
            targets: targets.iter().map(|s| s.to_string()).collect(),
            input: InputSpec::Grid { start: 0.0, end: 1.0 },
            n_train: 2000,
            n_test: 500,
            split: SplitMode::Interleaved,
            ..Default::default()
        }
    }

    pub fn synthesis() -> Self {
        Self::default()
    }

    pub fn nonautonomous(offset: usize) -> Self {
        Self { kind: TaskKind::NonautoPredict, offset, ..Default::default() }
    }

    pub fn autonomous() -> Self {
        Self { kind: TaskKind::AutoPredict, offset: 1, ..Default::default() }
    }

    pub fn n_points(&self) -> usize {
        self.n_train + self.n_test
    }

    pub fn target_names(&self) -> Vec<String> {
        expand_targets(&self.targets)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_test == 0 {
            return Err(argument("n_train and n_test must both be positive"));
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(argument(format!("lambda must be positive, got {}", self.lambda)));
        }
        match self.kind {
            TaskKind::Regression | TaskKind::Synthesis => {
                let names = self.target_names();
                if names.is_empty() {
                    return Err(argument("at least one target is required"));
                }
                for n in &names {
                    named_target(n, &[0.0])?;
                }
            }
            TaskKind::NonautoPredict | TaskKind::AutoPredict => {
                if self.offset == 0 {
                    return Err(argument("prediction offset k must be at least 1"));
                }
                if self.split != SplitMode::Contiguous {
                    return Err(argument("prediction tasks need a contiguous split"));
                }
            }
        }
        if self.split == SplitMode::Interleaved && self.n_points() % self.n_test != 0 {
            return Err(argument(format!(
                "interleaved split needs n_test ({}) to divide the series length ({})",
                self.n_test,
                self.n_points()
            )));
        }
        if let InputSpec::Grid { start, end } = self.input {
            if !(end > start) {
                return Err(argument(format!("grid bounds [{start}, {end}] are invalid")));
            }
        }
        Ok(())
    }

    pub fn input_series(&self) -> Result<TimeSeries> {
        match self.input {
            InputSpec::Grid { start, end } => gen_grid_input(start, end, self.n_points()),
            InputSpec::RandomSinusoid { f0, n_terms } => gen_random_sinusoid(self.seed, f0, n_terms, self.n_points()),
        }
    }

    /// Train and test sample indices on an axis of `len` targets, skipping
    /// the first `delta` samples that lack a full delay history.
    pub fn split_indices(&self, len: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let d = self.delta;
        match self.split {
            SplitMode::Contiguous => {
                if d >= self.n_train {
                    return Err(argument(format!("delay {d} leaves no training samples out of {}", self.n_train)));
                }
                if self.n_train >= len {
                    return Err(argument(format!(
                        "test window is empty: {len} targets, {} for training",
                        self.n_train
                    )));
                }
                Ok(((d..self.n_train).collect(), (self.n_train..len).collect()))
            }
            SplitMode::Interleaved => {
                let period = self.n_points() / self.n_test;
                let (test, train): (Vec<usize>, Vec<usize>) = (d..len).partition(|i| i % period == period - 1);
                if train.is_empty() || test.is_empty() {
                    return Err(argument(format!("delay {d} leaves an empty split")));
                }
                Ok((train, test))
            }
        }
    }
}
