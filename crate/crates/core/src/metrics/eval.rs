use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::confusion::{pixel_confusion, Confusion, Scores};
use super::MetricPoint;
use crate::coco::{annotation_mask, coco_to_masks, CocoDataset};
use crate::detections::{
    detections_to_mask, filter_by_score, nms, Detection, DetectionSet, DEFAULT_NMS_IOU, DEFAULT_SCORE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::raster::BinaryMask;

/// How per-image confusions are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    /// Sum the confusions, then take the ratios.
    #[default]
    Micro,
    /// Mean of the per-image ratios.
    Macro,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub score_threshold: f64,
    pub nms_iou: f64,
    pub averaging: Averaging,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            score_threshold: DEFAULT_SCORE_THRESHOLD,
            nms_iou: DEFAULT_NMS_IOU,
            averaging: Averaging::Micro,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEval {
    pub image_id: u64,
    pub file_name: String,
    pub confusion: Confusion,
    pub scores: Scores,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub per_image: Vec<ImageEval>,
    /// Sum of the per-image confusions.
    pub confusion: Confusion,
    pub averaging: Averaging,
    pub aggregate: Scores,
}

/// Score filter followed by NMS.
pub fn postprocess(set: &DetectionSet, score_threshold: f64, nms_iou: f64) -> DetectionSet {
    nms(&filter_by_score(set, score_threshold), nms_iou)
}

fn check_images(preds: &DetectionSet, gt: &CocoDataset) -> Result<()> {
    match preds.detections.iter().find(|d| gt.image(d.image_id).is_none()) {
        Some(d) => Err(Error::UnknownImage(d.image_id)),
        None => Ok(()),
    }
}

/// Post-process the predictions, rebuild one mask per image and compare it
/// pixel by pixel with the ground-truth mask rebuilt from the annotations.
pub fn evaluate_dataset(preds: &DetectionSet, gt: &CocoDataset, config: &EvalConfig) -> Result<EvalReport> {
    check_images(preds, gt)?;
    let kept = postprocess(preds, config.score_threshold, config.nms_iou);
    let gt_masks = coco_to_masks(gt)?;

    let mut by_image: BTreeMap<u64, Vec<Detection>> = BTreeMap::new();
    for d in kept.detections {
        by_image.entry(d.image_id).or_default().push(d);
    }

    let mut per_image = Vec::with_capacity(gt.images.len());
    for (image_id, gt_mask) in &gt_masks {
        let image = gt.image(*image_id).expect("mask keyed by image id");
        let dets = by_image.get(image_id).map(Vec::as_slice).unwrap_or(&[]);
        let pred_mask = detections_to_mask(dets, image.width, image.height)?;
        let confusion = pixel_confusion(&pred_mask, gt_mask)?;
        per_image.push(ImageEval {
            image_id: *image_id,
            file_name: image.file_name.clone(),
            confusion,
            scores: confusion.scores(),
        });
    }

    let confusion: Confusion = per_image.iter().map(|e| e.confusion).sum();
    let aggregate = match config.averaging {
        Averaging::Micro => confusion.scores(),
        Averaging::Macro if per_image.is_empty() => confusion.scores(),
        Averaging::Macro => {
            let n = per_image.len() as f64;
            let mean = |f: fn(&Scores) -> f64| per_image.iter().map(|e| f(&e.scores)).sum::<f64>() / n;
            Scores {
                precision: mean(|s| s.precision),
                recall: mean(|s| s.recall),
                f1: mean(|s| s.f1),
            }
        }
    };
    Ok(EvalReport {
        per_image,
        confusion,
        averaging: config.averaging,
        aggregate,
    })
}

/// Object-level counts from greedy matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct InstanceCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

fn mask_iou(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let (mut inter, mut union) = (0u64, 0u64);
    for (&x, &y) in a.data().iter().zip(b.data()) {
        inter += (x && y) as u64;
        union += (x || y) as u64;
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Match predictions to ground-truth annotations of the same image and
/// category, highest score first.
///
/// Each prediction takes the unmatched annotation with the largest mask IoU
/// (earliest annotation on ties) when that IoU reaches `iou_threshold`.
/// Unmatched predictions are false positives and unmatched annotations false
/// negatives. `preds` is used as given; apply [`postprocess`] first to match
/// only kept detections.
pub fn match_instances(preds: &DetectionSet, gt: &CocoDataset, iou_threshold: f64) -> Result<InstanceCounts> {
    check_images(preds, gt)?;
    let mut gt_masks: BTreeMap<(u64, u64), Vec<BinaryMask>> = BTreeMap::new();
    for ann in &gt.annotations {
        let image = gt.image(ann.image_id).ok_or(Error::UnknownImage(ann.image_id))?;
        gt_masks
            .entry((ann.image_id, ann.category_id))
            .or_default()
            .push(annotation_mask(ann, image)?);
    }

    let mut order: Vec<usize> = (0..preds.detections.len()).collect();
    order.sort_by(|&a, &b| {
        preds.detections[b]
            .score
            .total_cmp(&preds.detections[a].score)
            .then(a.cmp(&b))
    });

    let mut matched: BTreeMap<(u64, u64), Vec<bool>> =
        gt_masks.iter().map(|(k, v)| (*k, vec![false; v.len()])).collect();
    let mut counts = InstanceCounts::default();
    for i in order {
        let det = &preds.detections[i];
        let key = (det.image_id, det.category_id);
        let image = gt.image(det.image_id).expect("checked above");
        let pred_mask = detections_to_mask(std::slice::from_ref(det), image.width, image.height)?;
        let mut best: Option<(usize, f64)> = None;
        if let (Some(masks), Some(taken)) = (gt_masks.get(&key), matched.get(&key)) {
            for (j, m) in masks.iter().enumerate() {
                if taken[j] {
                    continue;
                }
                let v = mask_iou(&pred_mask, m);
                if best.is_none_or(|(_, b)| v > b) {
                    best = Some((j, v));
                }
            }
        }
        match best {
            Some((j, v)) if v >= iou_threshold && v > 0.0 => {
                matched.get_mut(&key).expect("key present")[j] = true;
                counts.tp += 1;
            }
            _ => counts.fp += 1,
        }
    }
    counts.fn_ = gt.annotations.len() as u64 - counts.tp;
    Ok(counts)
}

/// Aggregate metrics of each run, in iteration order.
pub fn sweep(runs: &[(u64, DetectionSet)], gt: &CocoDataset, config: &EvalConfig) -> Result<Vec<MetricPoint>> {
    for pair in runs.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(Error::InvalidArgument(if pair[1].0 == pair[0].0 {
                format!("duplicate iteration {}", pair[0].0)
            } else {
                format!("iterations not increasing: {} after {}", pair[1].0, pair[0].0)
            }));
        }
    }
    runs.iter()
        .map(|(iteration, set)| {
            let report = evaluate_dataset(set, gt, config)?;
            Ok(MetricPoint::new(*iteration, report.aggregate))
        })
        .collect()
}
