//! Delay embedding, ridge readout and error metrics.

pub mod embed;
pub mod metrics;
pub mod ridge;

pub use embed::{delay_embed, embed_column, embedded_rows, EmbeddedFeatures};
pub use metrics::{first_crossing, nmse, pearson, step_errors, vpts, MetricReport, VPTS_THRESHOLD};
pub use ridge::{predict, predict_column, ridge_fit, ReadoutWeights, DEFAULT_LAMBDA, RIDGE_RESIDUAL_TOL};
