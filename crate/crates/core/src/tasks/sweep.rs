use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{argument, Result};
use crate::experiment::{config_hash, ResultRecord};
use crate::reservoir::{sample_parameters, ReservoirConfig};
use crate::tasks::run::{prepare, run_prepared, run_task, TaskOutcome};
use crate::tasks::spec::TaskSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Delta,
    NQubits,
    ScaleS,
    /// Prediction offset `k`.
    Offset,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::NQubits => "n_qubits",
            Self::ScaleS => "scale_s",
            Self::Offset => "offset",
        }
    }

    /// Axes that leave the reservoir and input series unchanged, so
    /// features are shared across their values.
    fn reuses_features(self) -> bool {
        matches!(self, Self::Delta | Self::Offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    #[default]
    Nmse,
    /// Mean NMSE over the task's target group.
    Anmse,
    Vpts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Reservoir seeds, one trial each.
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub metric: SweepMetric,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(argument("sweep needs at least one axis value"));
        }
        if self.seeds.is_empty() {
            return Err(argument("sweep needs at least one seed"));
        }
        for &v in &self.values {
            let integral = v >= 0.0 && v.fract() == 0.0;
            if self.axis != SweepAxis::ScaleS && !integral {
                return Err(argument(format!("{} values must be non-negative integers, got {v}", self.axis.name())));
            }
            if !v.is_finite() {
                return Err(argument(format!("axis value {v} is not finite")));
            }
        }
        Ok(())
    }
}

/// Reservoir and task of one sweep cell.
pub fn cell_configs(
    axis: SweepAxis,
    value: f64,
    seed: u64,
    reservoir: &ReservoirConfig,
    task: &TaskSpec,
) -> (ReservoirConfig, TaskSpec) {
    let mut r = ReservoirConfig { seed, ..reservoir.clone() };
    let mut t = task.clone();
    match axis {
        SweepAxis::Delta => t.delta = value as usize,
        SweepAxis::Offset => t.offset = value as usize,
        SweepAxis::NQubits => r.n_qubits = value as usize,
        SweepAxis::ScaleS => r.scale_s = value,
    }
    (r, t)
}

/// One sweep cell: its result row and, when it succeeded, the full outcome.
pub type CellResult = (ResultRecord, Option<TaskOutcome>);

fn record(
    axis: SweepAxis,
    value: f64,
    reservoir: &ReservoirConfig,
    task: &TaskSpec,
    outcome: Result<TaskOutcome>,
    wall_ms: f64,
) -> CellResult {
    let mut rec = ResultRecord::new(config_hash(reservoir, task), reservoir.seed, task.seed, axis.name(), value);
    rec.wall_ms = wall_ms;
    match outcome {
        Ok(o) => {
            rec.fill(&o);
            (rec, Some(o))
        }
        Err(e) => {
            rec.error = Some(e.to_string());
            (rec, None)
        }
    }
}

/// Runs `task` at every axis value and seed. Cell failures are recorded in
/// the returned rows; rows are ordered by axis value, then seed.
pub fn run_sweep(spec: &SweepSpec, reservoir: &ReservoirConfig, task: &TaskSpec) -> Result<Vec<ResultRecord>> {
    Ok(run_sweep_cells(spec, reservoir, task)?.into_iter().map(|(r, _)| r).collect())
}

/// [`run_sweep`], keeping each cell's outcome.
pub fn run_sweep_cells(spec: &SweepSpec, reservoir: &ReservoirConfig, task: &TaskSpec) -> Result<Vec<CellResult>> {
    spec.validate()?;
    let axis = spec.axis;
    if axis.reuses_features() {
        let mut per_seed: Vec<Vec<CellResult>> = spec
            .seeds
            .par_iter()
            .map(|&seed| {
                let start = Instant::now();
                let base = ReservoirConfig { seed, ..reservoir.clone() };
                let prepared = sample_parameters(&base).and_then(|p| {
                    let (_, t0) = cell_configs(axis, spec.values[0], seed, reservoir, task);
                    prepare(&t0, &p).map(|prep| (p, prep))
                });
                let mut prep_ms = start.elapsed().as_secs_f64() * 1e3;
                spec.values
                    .iter()
                    .map(|&v| {
                        let (r, t) = cell_configs(axis, v, seed, reservoir, task);
                        let start = Instant::now();
                        let outcome = match &prepared {
                            Ok((p, prep)) => run_prepared(&t, p, prep),
                            Err(e) => Err(e.clone()),
                        };
                        let ms = start.elapsed().as_secs_f64() * 1e3 + std::mem::take(&mut prep_ms);
                        record(axis, v, &r, &t, outcome, ms)
                    })
                    .collect()
            })
            .collect();
        let mut rows = Vec::with_capacity(spec.values.len() * spec.seeds.len());
        for vi in 0..spec.values.len() {
            for seed_rows in per_seed.iter_mut() {
                rows.push(std::mem::replace(&mut seed_rows[vi], (ResultRecord::empty(), None)));
            }
        }
        Ok(rows)
    } else {
        let cells: Vec<(f64, u64)> =
            spec.values.iter().flat_map(|&v| spec.seeds.iter().map(move |&s| (v, s))).collect();
        Ok(cells
            .par_iter()
            .map(|&(v, seed)| {
                let (r, t) = cell_configs(axis, v, seed, reservoir, task);
                let start = Instant::now();
                let outcome = sample_parameters(&r).and_then(|p| run_task(&t, &p));
                record(axis, v, &r, &t, outcome, start.elapsed().as_secs_f64() * 1e3)
            })
            .collect())
    }
}

/// Mean metric per axis value over the seeds whose cells succeeded.
pub fn aggregate(records: &[ResultRecord], metric: SweepMetric) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for r in records.iter().filter(|r| r.error.is_none()) {
        let v = match metric {
            SweepMetric::Nmse | SweepMetric::Anmse => r.test_nmse,
            SweepMetric::Vpts => r.vpts.map_or(f64::NAN, |v| v as f64),
        };
        match out.iter_mut().find(|(a, _, _)| *a == r.axis_value) {
            Some(slot) => {
                slot.1 += v;
                slot.2 += 1;
            }
            None => out.push((r.axis_value, v, 1)),
        }
    }
    out.into_iter().map(|(a, s, n)| (a, s / n as f64)).collect()
}
