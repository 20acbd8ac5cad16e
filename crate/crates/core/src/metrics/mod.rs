//! Pixel-level evaluation of predicted masks against ground truth.

mod confusion;
mod eval;
mod io;
mod plateau;

pub use confusion::{f1, pixel_confusion, precision, recall, Confusion, Scores};
pub use eval::{
    evaluate_dataset, match_instances, postprocess, sweep, Averaging, EvalConfig, EvalReport, ImageEval, InstanceCounts,
};
pub use io::{read_series_csv, write_metrics_csv};
pub use plateau::{find_plateau, Mode, SeriesPoint, DEFAULT_MIN_DELTA, DEFAULT_PATIENCE};

use serde::{Deserialize, Serialize};

/// Precision, recall and F1 at one training iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub iteration: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl MetricPoint {
    pub fn new(iteration: u64, scores: Scores) -> Self {
        Self {
            iteration,
            precision: scores.precision,
            recall: scores.recall,
            f1: scores.f1,
        }
    }
}
