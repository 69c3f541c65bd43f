//! Experiment configuration: subcommand defaults, then the TOML file, then
//! command-line flags.

use std::fs;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use qrc_core::experiment::ExperimentConfig;
use qrc_core::tasks::TaskKind;
use toml::{Table, Value};

/// Flags shared by every run-type subcommand. Each one overrides the
/// corresponding config-file value.
#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    /// TOML experiment config.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed_reservoir: Option<u64>,
    #[arg(long)]
    pub seed_task: Option<u64>,
    /// Number of delay embeddings δ.
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub n_qubits: Option<usize>,
    /// Input scale s.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Also write the raw feature matrix of single runs.
    #[arg(long)]
    pub emit_features: bool,
}

/// Recursively overlays `over` on `base`. Tables carrying a `type` tag are
/// enum variants and replace the base value instead of merging into it.
fn merge(base: &mut Table, over: Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(Value::Table(b)), Value::Table(o)) if !o.contains_key("type") => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

pub fn parse(text: &str, base: &ExperimentConfig) -> Result<ExperimentConfig> {
    let over: Table = toml::from_str(text)?;
    let mut table = match Value::try_from(base)? {
        Value::Table(t) => t,
        _ => unreachable!("configs serialize to tables"),
    };
    merge(&mut table, over);
    serde_path_to_error::deserialize(Value::Table(table))
        .map_err(|e| anyhow!("invalid config at `{}`: {}", e.path(), e.inner()))
}

/// Builds the effective configuration for a run.
pub fn load(base: ExperimentConfig, flags: &Overrides, kind: Option<TaskKind>) -> Result<ExperimentConfig> {
    let mut cfg = match &flags.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let cfg = parse(&text, &base).with_context(|| format!("in {}", path.display()))?;
            if let Some(kind) = kind {
                if cfg.task.kind != kind {
                    bail!(
                        "{}: task.kind {:?} does not match this subcommand ({kind:?})",
                        path.display(),
                        cfg.task.kind
                    );
                }
            }
            cfg
        }
        None => base,
    };
    if let Some(kind) = kind {
        cfg.task.kind = kind;
    }
    apply(&mut cfg, flags);
    resolve(&mut cfg);
    Ok(cfg)
}

fn apply(cfg: &mut ExperimentConfig, flags: &Overrides) {
    if let Some(dir) = &flags.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(seed) = flags.seed_reservoir {
        cfg.reservoir.seed = seed;
    }
    if let Some(seed) = flags.seed_task {
        cfg.task.seed = seed;
    }
    if let Some(delta) = flags.delta {
        cfg.task.delta = delta;
    }
    if let Some(n) = flags.n_qubits {
        cfg.reservoir.n_qubits = n;
    }
    if let Some(s) = flags.scale {
        cfg.reservoir.scale_s = s;
    }
    if flags.emit_features {
        cfg.emit_features = true;
    }
}

/// Makes derived defaults explicit so every output carries literal values.
fn resolve(cfg: &mut ExperimentConfig) {
    cfg.reservoir.v0 = Some(cfg.reservoir.coupling_mean());
    cfg.reservoir.tau = Some(cfg.reservoir.evolution_time());
}

pub fn to_toml(cfg: &ExperimentConfig) -> Result<String> {
    Ok(toml::to_string(cfg)?)
}
