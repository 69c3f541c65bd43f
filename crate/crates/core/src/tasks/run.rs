//! Task drivers. Each input sample is featurized exactly once; the
//! readout is fitted on training columns only.

use ndarray::{Array2, Axis};

use crate::error::{argument, Error, Result};
use crate::learner::{
    delay_embed, embed_column, nmse, predict, predict_column, ridge_fit, EmbeddedFeatures, ReadoutWeights,
    VPTS_THRESHOLD,
};
use crate::reservoir::{featurize_batch, Counting, FeatureMap};
use crate::tasks::signals::{named_target, TimeSeries};
use crate::tasks::spec::{TaskKind, TaskSpec};

/// Closed-loop runs stop once `|ŷ|` exceeds this multiple of `max|u|`.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// One target's aligned series over all samples with a full delay history.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSeries {
    pub name: String,
    /// Sample index on the target axis.
    pub index: Vec<usize>,
    pub input: Vec<f64>,
    pub target: Vec<f64>,
    pub prediction: Vec<f64>,
    pub is_test: Vec<bool>,
}

impl PredictionSeries {
    pub fn test_window(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let mut input = Vec::new();
        let mut target = Vec::new();
        let mut pred = Vec::new();
        for i in 0..self.index.len() {
            if self.is_test[i] {
                input.push(self.input[i]);
                target.push(self.target[i]);
                pred.push(self.prediction[i]);
            }
        }
        (input, target, pred)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetScore {
    pub name: String,
    pub train_nmse: f64,
    pub test_nmse: f64,
}

#[derive(Debug, Clone)]
pub struct TaskOutcome {
    /// Mean over targets (ANMSE when several).
    pub train_nmse: f64,
    pub test_nmse: f64,
    pub per_target: Vec<TargetScore>,
    pub vpts: Option<usize>,
    /// Closed-loop normalized error per step.
    pub step_errors: Vec<f64>,
    pub series: Vec<PredictionSeries>,
    pub weights: ReadoutWeights,
    /// Reservoir evaluations performed by this run.
    pub evaluations: usize,
    /// Set when a closed-loop run was cut short.
    pub divergence: Option<Error>,
}

/// Features of the inputs a task needs, computed once.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub input: TimeSeries,
    /// `K × T′` with column `t` = `φ(u_t)`.
    pub features: Array2<f64>,
    pub evaluations: usize,
}

/// Number of leading input samples whose features a task needs.
fn needed_inputs(spec: &TaskSpec) -> usize {
    match spec.kind {
        TaskKind::AutoPredict => spec.n_train,
        _ => spec.n_points(),
    }
}

pub fn prepare<M: FeatureMap + ?Sized>(spec: &TaskSpec, map: &M) -> Result<Prepared> {
    spec.validate()?;
    let input = spec.input_series()?;
    let counter = Counting::new(map);
    let features = featurize_batch(&counter, &input.values[..needed_inputs(spec)])?;
    Ok(Prepared { input, features, evaluations: counter.evaluations() })
}

pub fn run_task<M: FeatureMap + ?Sized>(spec: &TaskSpec, map: &M) -> Result<TaskOutcome> {
    let prepared = prepare(spec, map)?;
    run_prepared(spec, map, &prepared)
}

/// Runs `spec` on precomputed features; only closed-loop steps evaluate the
/// reservoir again.
pub fn run_prepared<M: FeatureMap + ?Sized>(spec: &TaskSpec, map: &M, prepared: &Prepared) -> Result<TaskOutcome> {
    spec.validate()?;
    if prepared.input.len() != spec.n_points() || prepared.features.ncols() < needed_inputs(spec) {
        return Err(argument("prepared features do not match the task"));
    }
    let mut out = match spec.kind {
        TaskKind::Regression | TaskKind::Synthesis => pointwise(spec, prepared),
        TaskKind::NonautoPredict => nonautonomous(spec, prepared),
        TaskKind::AutoPredict => {
            let horizon = spec.horizon.unwrap_or(spec.n_points() - 1 - spec.n_train);
            autonomous(spec, map, prepared, horizon, Feedback::Closed)
        }
    }?;
    out.evaluations += prepared.evaluations;
    Ok(out)
}

pub fn run_regression<M: FeatureMap + ?Sized>(spec: &TaskSpec, map: &M) -> Result<TaskOutcome> {
    expect_kind(spec, TaskKind::Regression)?;
    run_task(spec, map)
}

pub fn run_synthesis<M: FeatureMap + ?Sized>(spec: &TaskSpec, map: &M) -> Result<TaskOutcome> {
    expect_kind(spec, TaskKind::Synthesis)?;
    run_task(spec, map)
}

pub fn run_nonautonomous<M: FeatureMap + ?Sized>(spec: &TaskSpec, map: &M, k: usize) -> Result<TaskOutcome> {
    let spec = TaskSpec { kind: TaskKind::NonautoPredict, offset: k, ..spec.clone() };
    if k >= spec.n_points() {
        return Err(argument(format!("offset {k} must be below the series length {}", spec.n_points())));
    }
    run_task(&spec, map)
}

/// Closed-loop prediction over `horizon` test steps.
pub fn run_autonomous<M: FeatureMap + ?Sized>(
    spec: &TaskSpec,
    map: &M,
    horizon: usize,
    feedback: Feedback,
) -> Result<TaskOutcome> {
    let spec = TaskSpec { kind: TaskKind::AutoPredict, offset: 1, ..spec.clone() };
    let prepared = prepare(&spec, map)?;
    let mut out = autonomous(&spec, map, &prepared, horizon, feedback)?;
    out.evaluations += prepared.evaluations;
    Ok(out)
}

fn expect_kind(spec: &TaskSpec, kind: TaskKind) -> Result<()> {
    if spec.kind != kind {
        return Err(argument(format!("expected a {kind:?} task, got {:?}", spec.kind)));
    }
    Ok(())
}

fn select(values: &[f64], idx: &[usize]) -> Vec<f64> {
    idx.iter().map(|&i| values[i]).collect()
}

struct Fitted {
    weights: ReadoutWeights,
    embedded: EmbeddedFeatures,
    train: Vec<usize>,
    test: Vec<usize>,
}

/// Fits all `targets` (each indexed like the target axis) jointly on the
/// `train` samples.
fn fit(
    spec: &TaskSpec,
    features: &Array2<f64>,
    targets: &[Vec<f64>],
    (train, test): (Vec<usize>, Vec<usize>),
) -> Result<Fitted> {
    let len = targets[0].len();
    let embedded = delay_embed(features.slice(ndarray::s![.., ..len]), spec.delta, spec.bias)?;
    debug_assert!(train.iter().all(|i| !test.contains(i)));
    let cols: Vec<usize> = train.iter().map(|i| i - spec.delta).collect();
    let r = embedded.values.select(Axis(1), &cols);
    let y = Array2::from_shape_fn((targets.len(), train.len()), |(d, t)| targets[d][train[t]]);
    let mut weights = ridge_fit(r.view(), y.view(), spec.lambda)?;
    weights.bias = spec.bias;
    Ok(Fitted { weights, embedded, train, test })
}

fn score(
    spec: &TaskSpec,
    fitted: Fitted,
    names: &[String],
    inputs: &[f64],
    targets: &[Vec<f64>],
) -> Result<TaskOutcome> {
    let preds = predict(&fitted.weights, fitted.embedded.values.view())?;
    let mut per_target = Vec::new();
    let mut series = Vec::new();
    for (d, name) in names.iter().enumerate() {
        let p: Vec<f64> = preds.row(d).to_vec();
        let at = |idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| p[i - spec.delta]).collect() };
        let train_nmse = nmse(&select(&targets[d], &fitted.train), &at(&fitted.train))?;
        let test_nmse = nmse(&select(&targets[d], &fitted.test), &at(&fitted.test))?;
        per_target.push(TargetScore { name: name.clone(), train_nmse, test_nmse });
        let index: Vec<usize> = (spec.delta..targets[d].len()).collect();
        let mut is_test = vec![false; targets[d].len()];
        fitted.test.iter().for_each(|&i| is_test[i] = true);
        series.push(PredictionSeries {
            name: name.clone(),
            input: select(inputs, &index),
            target: select(&targets[d], &index),
            prediction: p,
            is_test: select_bool(&is_test, &index),
            index,
        });
    }
    let n = per_target.len() as f64;
    Ok(TaskOutcome {
        train_nmse: per_target.iter().map(|s| s.train_nmse).sum::<f64>() / n,
        test_nmse: per_target.iter().map(|s| s.test_nmse).sum::<f64>() / n,
        per_target,
        vpts: None,
        step_errors: Vec::new(),
        series,
        weights: fitted.weights,
        evaluations: 0,
        divergence: None,
    })
}

fn select_bool(values: &[bool], idx: &[usize]) -> Vec<bool> {
    idx.iter().map(|&i| values[i]).collect()
}

fn pointwise(spec: &TaskSpec, prepared: &Prepared) -> Result<TaskOutcome> {
    let names = spec.target_names();
    let u = &prepared.input.values;
    let targets: Vec<Vec<f64>> = names.iter().map(|n| named_target(n, u)).collect::<Result<_>>()?;
    let fitted = fit(spec, &prepared.features, &targets, spec.split_indices(u.len())?)?;
    score(spec, fitted, &names, u, &targets)
}

/// Target axis `j` with `y_j = u_{j+k}` and input `u_j`.
fn shifted_targets(u: &[f64], k: usize) -> Result<Vec<f64>> {
    if k >= u.len() {
        return Err(argument(format!("offset {k} must be below the series length {}", u.len())));
    }
    Ok(u[k..].to_vec())
}

fn nonautonomous(spec: &TaskSpec, prepared: &Prepared) -> Result<TaskOutcome> {
    let u = &prepared.input.values;
    let y = shifted_targets(u, spec.offset)?;
    let name = format!("u(t+{})", spec.offset);
    let fitted = fit(spec, &prepared.features, std::slice::from_ref(&y), spec.split_indices(y.len())?)?;
    score(spec, fitted, &[name], &u[..y.len()], &[y])
}

/// What the closed loop feeds back at each step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feedback {
    /// The previous prediction.
    Closed,
    /// The true series value (teacher forcing).
    TeacherForced,
}

/// Normalizer for closed-loop errors: `Var(y)` over the window, or for a
/// (numerically) constant window `max y²` (1 if the window is all zeros), so a fixed
/// point that is tracked to rounding accuracy still scores as valid.
fn error_scale(targets: &[f64]) -> f64 {
    let m = targets.iter().sum::<f64>() / targets.len() as f64;
    let var = targets.iter().map(|y| (y - m).powi(2)).sum::<f64>() / targets.len() as f64;
    let peak = targets.iter().fold(0.0f64, |a, y| a.max(y * y));
    // Rounding in the mean leaves a tiny variance for constant windows.
    if var > f64::EPSILON * peak {
        return var;
    }
    if peak > 0.0 {
        peak
    } else {
        1.0
    }
}

/// `(y − ŷ)²/scale`; missing predictions (NaN) count as infinite error.
fn closed_loop_errors(targets: &[f64], preds: &[f64]) -> Vec<f64> {
    if targets.is_empty() {
        return Vec::new();
    }
    let scale = error_scale(targets);
    targets.iter().zip(preds).map(|(y, p)| if p.is_nan() { f64::INFINITY } else { (y - p).powi(2) / scale }).collect()
}

fn autonomous<M: FeatureMap + ?Sized>(
    spec: &TaskSpec,
    map: &M,
    prepared: &Prepared,
    horizon: usize,
    feedback: Feedback,
) -> Result<TaskOutcome> {
    let u = &prepared.input.values;
    let n_train = spec.n_train;
    let test_len = u.len() - 1 - n_train;
    if horizon > test_len {
        return Err(argument(format!("horizon {horizon} exceeds the test window of {test_len}")));
    }
    if spec.delta >= n_train {
        return Err(argument(format!("delay {} leaves no training samples", spec.delta)));
    }
    let y = shifted_targets(&u[..=n_train], 1)?;
    let train = (spec.delta..n_train).collect();
    let fitted = fit(spec, &prepared.features, std::slice::from_ref(&y), (train, Vec::new()))?;
    let train_targets = select(&y, &fitted.train);
    let cols: Vec<usize> = fitted.train.iter().map(|i| i - spec.delta).collect();
    let train_pred = predict(&fitted.weights, fitted.embedded.values.select(Axis(1), &cols).view())?;
    let train_nmse = match nmse(&train_targets, train_pred.row(0).as_slice().expect("contiguous row")) {
        Err(Error::UndefinedMetric(_)) => f64::NAN,
        other => other?,
    };

    // Newest-first feature history, warm-started from the true training
    // inputs u_{n−δ}, …, u_{n−1}; u_n is fed at step 0.
    let counter = Counting::new(map);
    let mut history: Vec<Vec<f64>> =
        (n_train - spec.delta..n_train).rev().map(|t| prepared.features.column(t).to_vec()).collect();
    let bound = DIVERGENCE_FACTOR * u[..=n_train].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut preds = Vec::with_capacity(horizon);
    let mut divergence = None;
    let mut next_input = u[n_train];
    for step in 0..horizon {
        history.insert(0, counter.featurize(next_input)?);
        history.truncate(spec.delta + 1);
        let col = embed_column(history.iter().map(Vec::as_slice), spec.bias);
        let p = predict_column(&fitted.weights, &col)?[0];
        if !p.is_finite() || p.abs() > bound {
            let reason = if p.is_finite() {
                format!("|prediction| = {:e} exceeds {bound:e}", p.abs())
            } else {
                "non-finite prediction".to_owned()
            };
            divergence = Some(Error::Divergence { step, reason });
            break;
        }
        preds.push(p);
        next_input = match feedback {
            Feedback::Closed => p,
            Feedback::TeacherForced => u[n_train + 1 + step],
        };
    }
    preds.resize(horizon, f64::NAN);

    let targets = u[n_train + 1..n_train + 1 + horizon].to_vec();
    let step_errors = closed_loop_errors(&targets, &preds);
    let vpts = crate::learner::first_crossing(&step_errors, VPTS_THRESHOLD);
    let test_nmse = closed_loop_nmse(&targets, &preds);
    let index: Vec<usize> = (n_train..n_train + horizon).collect();
    let input = match feedback {
        Feedback::TeacherForced => u[n_train..n_train + horizon].to_vec(),
        Feedback::Closed => std::iter::once(u[n_train]).chain(preds.iter().copied()).take(horizon).collect(),
    };
    let series = PredictionSeries {
        name: "u(t+1)".into(),
        index,
        input,
        target: targets,
        prediction: preds,
        is_test: vec![true; horizon],
    };
    Ok(TaskOutcome {
        train_nmse,
        test_nmse,
        per_target: vec![TargetScore { name: series.name.clone(), train_nmse, test_nmse }],
        vpts: Some(vpts),
        step_errors,
        series: vec![series],
        weights: fitted.weights,
        evaluations: counter.evaluations(),
        divergence,
    })
}

fn closed_loop_nmse(targets: &[f64], preds: &[f64]) -> f64 {
    if targets.is_empty() {
        return f64::NAN;
    }
    let errors = closed_loop_errors(targets, preds);
    errors.iter().sum::<f64>() / errors.len() as f64
}
