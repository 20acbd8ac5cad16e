//! Run configuration handed to the external trainer alongside a split.

use serde::{Deserialize, Serialize};

use crate::detections::{DEFAULT_NMS_IOU, DEFAULT_SCORE_THRESHOLD};
use crate::error::{Error, Result, Violation};

pub const DEFAULT_BASE_LR: f64 = 0.05;
pub const DEFAULT_MAX_ITER: u64 = 600;
pub const DEFAULT_NUM_CLASSES: u64 = 1;

/// Training and inference settings. Only `score_threshold`, `nms_iou` and
/// `seed` are consumed here; the rest is carried for the trainer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub base_lr: f64,
    pub max_iter: u64,
    pub num_classes: u64,
    pub score_threshold: f64,
    pub nms_iou: f64,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            base_lr: DEFAULT_BASE_LR,
            max_iter: DEFAULT_MAX_ITER,
            num_classes: DEFAULT_NUM_CLASSES,
            score_threshold: DEFAULT_SCORE_THRESHOLD,
            nms_iou: DEFAULT_NMS_IOU,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut bad = |path: &str, message: &str| out.push(Violation::new(path, message));
        if !(self.base_lr.is_finite() && self.base_lr > 0.0) {
            bad("base_lr", "must be positive");
        }
        if self.max_iter == 0 {
            bad("max_iter", "must be positive");
        }
        if self.num_classes == 0 {
            bad("num_classes", "must be positive");
        }
        if !(0.0..=1.0).contains(&self.score_threshold) {
            bad("score_threshold", "must lie in [0,1]");
        }
        if !(0.0..=1.0).contains(&self.nms_iou) {
            bad("nms_iou", "must lie in [0,1]");
        }
        out
    }

    /// Pretty-printed JSON, after validation.
    pub fn to_json(&self) -> Result<String> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }
        let mut text = serde_json::to_string_pretty(self).expect("plain struct serializes");
        text.push('\n');
        Ok(text)
    }
}
