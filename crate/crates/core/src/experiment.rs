//! Experiment configuration files and result provenance.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::reservoir::ReservoirConfig;
use crate::tasks::{SweepSpec, TaskOutcome, TaskSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub reservoir: ReservoirConfig,
    pub task: TaskSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    pub output_dir: PathBuf,
    pub emit_features: bool,
    pub emit_predictions: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            reservoir: ReservoirConfig::default(),
            task: TaskSpec::default(),
            sweep: None,
            output_dir: PathBuf::from("results"),
            emit_features: false,
            emit_predictions: true,
        }
    }
}

/// The pair of configurations that fully determines one result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub reservoir: ReservoirConfig,
    pub task: TaskSpec,
}

/// First 16 hex digits of the SHA-256 of the cell's canonical JSON.
pub fn config_hash(reservoir: &ReservoirConfig, task: &TaskSpec) -> String {
    let cell = CellConfig { reservoir: reservoir.clone(), task: task.clone() };
    let json = serde_json::to_string(&cell).expect("configs serialize");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub config_hash: String,
    pub reservoir_seed: u64,
    pub task_seed: u64,
    pub axis_name: String,
    pub axis_value: f64,
    pub train_nmse: f64,
    pub test_nmse: f64,
    pub vpts: Option<usize>,
    pub wall_ms: f64,
    pub version: String,
    pub error: Option<String>,
}

impl ResultRecord {
    pub fn new(config_hash: String, reservoir_seed: u64, task_seed: u64, axis_name: &str, axis_value: f64) -> Self {
        Self {
            config_hash,
            reservoir_seed,
            task_seed,
            axis_name: axis_name.to_owned(),
            axis_value,
            train_nmse: f64::NAN,
            test_nmse: f64::NAN,
            vpts: None,
            wall_ms: 0.0,
            version: VERSION.to_owned(),
            error: None,
        }
    }

    pub(crate) fn empty() -> Self {
        Self::new(String::new(), 0, 0, "", f64::NAN)
    }

    pub fn fill(&mut self, outcome: &TaskOutcome) {
        self.train_nmse = outcome.train_nmse;
        self.test_nmse = outcome.test_nmse;
        self.vpts = outcome.vpts;
        if let Some(d) = &outcome.divergence {
            self.error = Some(d.to_string());
        }
    }
}
