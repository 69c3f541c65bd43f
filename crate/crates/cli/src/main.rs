mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use qrc_core::encoding::verify_encoding_equivalence;
use qrc_core::experiment::{config_hash, CellConfig, ExperimentConfig, ResultRecord, VERSION};
use qrc_core::ops::MAX_QUBITS;
use qrc_core::reservoir::{route, sample_parameters, ReservoirParams};
use qrc_core::tasks::{
    cell_configs, gen_grid_input, prepare, run_prepared, run_sweep_cells, SweepAxis, SweepSpec, TaskKind, TaskSpec,
};
use serde::Serialize;

use config::Overrides;
use output::Cell;

/// Deviation above which `verify-encoding` reports a failure.
const EQUIVALENCE_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "qrc", version, about = "Hamiltonian-encoded quantum reservoir computing experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit named functions of a grid input.
    Regress {
        #[command(flatten)]
        flags: Overrides,
        /// Comma-separated target names (poly1..3, sin, cos, trigpoly,
        /// u2_minus_u3, group1, group2).
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<String>>,
    },
    /// Map a random sinusoid u(t) to u² − u³.
    Synth {
        #[command(flatten)]
        flags: Overrides,
    },
    /// Forecast the input series open-loop (k steps ahead) or closed-loop.
    Predict {
        #[command(flatten)]
        flags: Overrides,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Open-loop offset k.
        #[arg(long)]
        offset: Option<usize>,
        /// Closed-loop steps; defaults to the whole test window.
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Run a task over an axis of values and reservoir seeds.
    Sweep {
        #[command(flatten)]
        flags: Overrides,
        #[arg(long, value_enum)]
        axis: Option<Axis>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Reservoir seeds.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
    },
    /// Compare Hamiltonian encoding with its state-encoding reconstruction.
    VerifyEncoding {
        #[command(flatten)]
        flags: Overrides,
        /// Inputs checked, evenly spaced on [-1, 1].
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Print version, limits and the resolved configuration.
    Info {
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Open,
    Closed,
}

#[derive(Clone, Copy, ValueEnum)]
enum Axis {
    Delta,
    NQubits,
    ScaleS,
    Offset,
}

impl From<Axis> for SweepAxis {
    fn from(a: Axis) -> Self {
        match a {
            Axis::Delta => Self::Delta,
            Axis::NQubits => Self::NQubits,
            Axis::ScaleS => Self::ScaleS,
            Axis::Offset => Self::Offset,
        }
    }
}

/// Synthesis and forecasting default to a nearly closed reservoir (γ = 1e-8).
fn forecasting_base(task: TaskSpec) -> ExperimentConfig {
    let mut cfg = ExperimentConfig { task, ..Default::default() };
    cfg.reservoir.gamma = 1e-8;
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_workers() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `QRC_WORKERS` bounds the sweep worker pool; the default is the available
/// parallelism.
fn init_workers() -> Result<()> {
    let Ok(text) = std::env::var("QRC_WORKERS") else { return Ok(()) };
    let n: usize = text.trim().parse().with_context(|| format!("QRC_WORKERS={text:?} is not a count"))?;
    if n == 0 {
        bail!("QRC_WORKERS must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

/// Returns whether at least one cell succeeded.
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Regress { flags, targets } => {
            let mut cfg = config::load(
                ExperimentConfig { task: TaskSpec::regression(&["trigpoly"]), ..Default::default() },
                &flags,
                Some(TaskKind::Regression),
            )?;
            if let Some(t) = targets {
                cfg.task.targets = t;
            }
            single("regress", &cfg)
        }
        Command::Synth { flags } => {
            let cfg = config::load(forecasting_base(TaskSpec::synthesis()), &flags, Some(TaskKind::Synthesis))?;
            single("synth", &cfg)
        }
        Command::Predict { flags, mode, offset, horizon } => {
            let (base, kind, name) = match mode {
                Mode::Open => (TaskSpec::nonautonomous(1), TaskKind::NonautoPredict, "predict-open"),
                Mode::Closed => (TaskSpec::autonomous(), TaskKind::AutoPredict, "predict-closed"),
            };
            let mut cfg = config::load(forecasting_base(base), &flags, Some(kind))?;
            if let Some(k) = offset {
                if kind == TaskKind::AutoPredict {
                    bail!("--offset applies to --mode open only");
                }
                cfg.task.offset = k;
            }
            if let Some(h) = horizon {
                if kind == TaskKind::NonautoPredict {
                    bail!("--horizon applies to --mode closed only");
                }
                cfg.task.horizon = Some(h);
            }
            single(name, &cfg)
        }
        Command::Sweep { flags, axis, values, seeds } => {
            let mut cfg = config::load(ExperimentConfig::default(), &flags, None)?;
            let from_file = cfg.sweep.take();
            let spec = SweepSpec {
                axis: match (axis, &from_file) {
                    (Some(a), _) => a.into(),
                    (None, Some(s)) => s.axis,
                    (None, None) => bail!("sweep needs --axis or a [sweep] section"),
                },
                values: match (values, &from_file) {
                    (Some(v), _) => v,
                    (None, Some(s)) => s.values.clone(),
                    (None, None) => bail!("sweep needs --values or a [sweep] section"),
                },
                seeds: seeds
                    .or_else(|| from_file.as_ref().map(|s| s.seeds.clone()))
                    .unwrap_or_else(|| vec![cfg.reservoir.seed]),
                metric: from_file.map(|s| s.metric).unwrap_or_default(),
            };
            spec.validate()?;
            cfg.task.validate()?;
            cfg.sweep = Some(spec);
            sweep(&cfg)
        }
        Command::VerifyEncoding { flags, points } => {
            let mut base = ExperimentConfig::default();
            base.reservoir.gamma = 0.0;
            let cfg = config::load(base, &flags, None)?;
            verify(&cfg, points)
        }
        Command::Info { config } => {
            info(config.as_deref())?;
            Ok(true)
        }
    }
}

fn prepare_dir(cfg: &ExperimentConfig) -> Result<&Path> {
    let dir = cfg.output_dir.as_path();
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

fn single(command: &str, cfg: &ExperimentConfig) -> Result<bool> {
    cfg.reservoir.validate()?;
    cfg.task.validate()?;
    let dir = prepare_dir(cfg)?;
    let (r, t) = (&cfg.reservoir, &cfg.task);
    let hash = config_hash(r, t);
    let mut record = ResultRecord::new(hash.clone(), r.seed, t.seed, "delta", t.delta as f64);

    let start = Instant::now();
    let run = || -> qrc_core::Result<_> {
        let params = sample_parameters(r)?;
        let prepared = prepare(t, &params)?;
        let outcome = run_prepared(t, &params, &prepared)?;
        Ok((params, prepared, outcome))
    };
    let result = run();
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut outcome = None;
    match result {
        Ok((params, prepared, o)) => {
            record.fill(&o);
            if cfg.emit_features {
                let sub = dir.join("features");
                fs::create_dir_all(&sub)?;
                output::write_features(
                    &sub.join(format!("{hash}.csv")),
                    &params.observable_labels,
                    &prepared.input.values,
                    &prepared.features,
                )?;
            }
            outcome = Some(o);
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    let cells = vec![Cell { record, config: CellConfig { reservoir: r.clone(), task: t.clone() }, outcome }];
    finish(command, cfg, dir, &cells)
}

fn sweep(cfg: &ExperimentConfig) -> Result<bool> {
    let spec = cfg.sweep.as_ref().expect("sweep spec resolved");
    let dir = prepare_dir(cfg)?;
    let results = run_sweep_cells(spec, &cfg.reservoir, &cfg.task)?;
    let cells: Vec<Cell> = results
        .into_iter()
        .map(|(record, outcome)| {
            let (reservoir, task) =
                cell_configs(spec.axis, record.axis_value, record.reservoir_seed, &cfg.reservoir, &cfg.task);
            Cell { record, config: CellConfig { reservoir, task }, outcome }
        })
        .collect();
    finish("sweep", cfg, dir, &cells)
}

fn finish(command: &str, cfg: &ExperimentConfig, dir: &Path, cells: &[Cell]) -> Result<bool> {
    let rows: Vec<ResultRecord> = cells.iter().map(|c| c.record.clone()).collect();
    output::write_results(&dir.join("results.csv"), &rows)?;
    output::write_sidecar(&dir.join("results.json"), command, cfg, cells)?;
    if cfg.emit_predictions {
        let sub = dir.join("predictions");
        fs::create_dir_all(&sub)?;
        for c in cells {
            if let Some(o) = &c.outcome {
                output::write_predictions(&sub.join(format!("{}.csv", c.record.config_hash)), o)?;
            }
        }
    }
    for r in &rows {
        let vpts = r.vpts.map(|v| format!(" vpts={v}")).unwrap_or_default();
        let err = r.error.as_deref().map(|e| format!(" error: {e}")).unwrap_or_default();
        println!(
            "{} seed={} {}={} train={:.3e} test={:.3e}{vpts}{err}",
            r.config_hash, r.reservoir_seed, r.axis_name, r.axis_value, r.train_nmse, r.test_nmse
        );
    }
    println!("wrote {}", dir.join("results.csv").display());
    let ok = cells.iter().any(|c| c.outcome.is_some());
    if !ok {
        eprintln!("error: every cell failed");
    }
    Ok(ok)
}

#[derive(Serialize)]
struct EncodingPoint {
    x: f64,
    deviation: f64,
}

#[derive(Serialize)]
struct EncodingReport<'a> {
    version: &'a str,
    reservoir: &'a qrc_core::reservoir::ReservoirConfig,
    tolerance: f64,
    max_deviation: f64,
    passed: bool,
    points: Vec<EncodingPoint>,
}

fn verify(cfg: &ExperimentConfig, points: usize) -> Result<bool> {
    let params = sample_parameters(&cfg.reservoir)?;
    let xs = if points == 1 { vec![0.0] } else { gen_grid_input(-1.0, 1.0, points)?.values };
    let points = xs
        .iter()
        .map(|&x| Ok(EncodingPoint { x, deviation: verify_encoding_equivalence(&params, &[x])? }))
        .collect::<qrc_core::Result<Vec<_>>>()?;
    let max_deviation = points.iter().map(|p| p.deviation).fold(0.0, f64::max);
    let passed = max_deviation <= EQUIVALENCE_TOL;
    let report = EncodingReport {
        version: VERSION,
        reservoir: &cfg.reservoir,
        tolerance: EQUIVALENCE_TOL,
        max_deviation,
        passed,
        points,
    };
    let dir = prepare_dir(cfg)?;
    let path = dir.join("encoding_report.json");
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    fs::write(&path, text)?;
    println!(
        "max deviation {max_deviation:.3e} over {} inputs ({})",
        report.points.len(),
        if passed { "pass" } else { "FAIL" }
    );
    println!("wrote {}", path.display());
    Ok(passed)
}

fn describe(params: &ReservoirParams) -> String {
    format!(
        "N={} dim={} features={} tau={:.6} route={:?}",
        params.n_qubits,
        params.dim(),
        params.feature_dim(),
        params.tau,
        route(params)
    )
}

fn info(path: Option<&Path>) -> Result<()> {
    println!("qrc {VERSION}");
    println!("max qubits: {MAX_QUBITS}");
    println!("workers: {}", rayon::current_num_threads());
    let flags = Overrides { config: path.map(Path::to_path_buf), ..Default::default() };
    let cfg = config::load(ExperimentConfig::default(), &flags, None)?;
    match sample_parameters(&cfg.reservoir) {
        Ok(p) => println!("reservoir: {}", describe(&p)),
        Err(e) => println!("reservoir: {e}"),
    }
    println!("\n{}", config::to_toml(&cfg)?);
    Ok(())
}
