//! Input signals, targets and the experiment drivers.

pub mod run;
pub mod signals;
pub mod spec;
pub mod sweep;

pub use run::{
    prepare, run_autonomous, run_nonautonomous, run_prepared, run_regression, run_synthesis, run_task, Feedback,
    PredictionSeries, Prepared, TargetScore, TaskOutcome, DIVERGENCE_FACTOR,
};
pub use signals::{expand_targets, gen_grid_input, gen_random_sinusoid, named_target, TimeSeries, TARGET_NAMES};
pub use spec::{InputSpec, SplitMode, TaskKind, TaskSpec};
pub use sweep::{aggregate, cell_configs, run_sweep, run_sweep_cells, CellResult, SweepAxis, SweepMetric, SweepSpec};
