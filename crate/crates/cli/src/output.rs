//! Result files: the results table, its JSON sidecar, prediction series and
//! feature matrices.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::Array2;
use qrc_core::experiment::{CellConfig, ExperimentConfig, ResultRecord, VERSION};
use qrc_core::tasks::TaskOutcome;
use serde::Serialize;

pub const RESULTS_HEADER: [&str; 9] = [
    "config_hash",
    "reservoir_seed",
    "task_seed",
    "axis_name",
    "axis_value",
    "train_nmse",
    "test_nmse",
    "vpts",
    "wall_ms",
];

/// Shortest round-trip representation; NaN marks an undefined metric.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:e}")
    }
}

pub fn write_results(path: &Path, rows: &[ResultRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.config_hash.clone(),
            r.reservoir_seed.to_string(),
            r.task_seed.to_string(),
            r.axis_name.clone(),
            r.axis_value.to_string(),
            fmt_f64(r.train_nmse),
            fmt_f64(r.test_nmse),
            r.vpts.map(|v| v.to_string()).unwrap_or_default(),
            format!("{:.3}", r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TargetRow<'a> {
    name: &'a str,
    train_nmse: f64,
    test_nmse: f64,
}

#[derive(Serialize)]
struct CellError<'a> {
    config_hash: &'a str,
    reservoir_seed: u64,
    task_seed: u64,
    axis_value: f64,
    error: &'a str,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    version: &'a str,
    command: &'a str,
    config: &'a ExperimentConfig,
    /// Everything needed to rerun each row, keyed by its config hash.
    cells: BTreeMap<&'a str, &'a CellConfig>,
    per_target: BTreeMap<&'a str, Vec<TargetRow<'a>>>,
    errors: Vec<CellError<'a>>,
}

pub struct Cell {
    pub record: ResultRecord,
    pub config: CellConfig,
    pub outcome: Option<TaskOutcome>,
}

pub fn write_sidecar(path: &Path, command: &str, cfg: &ExperimentConfig, cells: &[Cell]) -> Result<()> {
    let sidecar = Sidecar {
        version: VERSION,
        command,
        config: cfg,
        cells: cells.iter().map(|c| (c.record.config_hash.as_str(), &c.config)).collect(),
        per_target: cells
            .iter()
            .filter_map(|c| {
                let o = c.outcome.as_ref()?;
                let rows = o
                    .per_target
                    .iter()
                    .map(|t| TargetRow { name: &t.name, train_nmse: t.train_nmse, test_nmse: t.test_nmse })
                    .collect();
                Some((c.record.config_hash.as_str(), rows))
            })
            .collect(),
        errors: cells
            .iter()
            .filter_map(|c| {
                let e = c.record.error.as_deref()?;
                Some(CellError {
                    config_hash: &c.record.config_hash,
                    reservoir_seed: c.record.reservoir_seed,
                    task_seed: c.record.task_seed,
                    axis_value: c.record.axis_value,
                    error: e,
                })
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&sidecar)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Wide table: `index,input,is_test`, then `{name}_target,{name}_pred` per
/// target.
pub fn write_predictions(path: &Path, outcome: &TaskOutcome) -> Result<()> {
    let Some(first) = outcome.series.first() else { return Ok(()) };
    if outcome.series.iter().any(|s| s.index != first.index) {
        bail!("prediction series are not aligned");
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["index".to_owned(), "input".to_owned(), "is_test".to_owned()];
    for s in &outcome.series {
        header.push(format!("{}_target", s.name));
        header.push(format!("{}_pred", s.name));
    }
    w.write_record(&header)?;
    for i in 0..first.index.len() {
        let mut row = vec![first.index[i].to_string(), fmt_f64(first.input[i]), u8::from(first.is_test[i]).to_string()];
        for s in &outcome.series {
            row.push(fmt_f64(s.target[i]));
            row.push(fmt_f64(s.prediction[i]));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `index,input`, then one column per observable; `features` is `K × T`.
pub fn write_features(path: &Path, labels: &[String], input: &[f64], features: &Array2<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["index".to_owned(), "input".to_owned()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for (t, col) in features.columns().into_iter().enumerate() {
        let mut row = vec![t.to_string(), fmt_f64(input[t])];
        row.extend(col.iter().map(|&v| fmt_f64(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.0, 1e-4, 3.5900000000000004e-3, -2.5, 1e300, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }
}
