use std::collections::BTreeMap;

use super::model::{Detection, DetectionSet};

/// Intersection over union of two `[x, y, w, h]` boxes in continuous coordinates.
pub fn iou(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    let ix = (a[0] + a[2]).min(b[0] + b[2]) - a[0].max(b[0]);
    let iy = (a[1] + a[3]).min(b[1] + b[3]) - a[1].max(b[1]);
    if ix <= 0.0 || iy <= 0.0 {
        return 0.0;
    }
    let inter = ix * iy;
    let union = a[2] * a[3] + b[2] * b[3] - inter;
    if union <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Keep detections with `score >= threshold`, preserving order.
pub fn filter_by_score(set: &DetectionSet, threshold: f64) -> DetectionSet {
    DetectionSet {
        source: set.source.clone(),
        detections: set
            .detections
            .iter()
            .filter(|d| d.score >= threshold)
            .cloned()
            .collect(),
    }
}

/// Greedy non-maximum suppression within each (image, category) group.
///
/// The highest-scored remaining detection is kept and every other one in its
/// group with IoU strictly above `iou_threshold` is dropped. Equal scores are
/// ordered by input position, earlier first. The result is sorted by
/// descending score, then input position.
pub fn nms(set: &DetectionSet, iou_threshold: f64) -> DetectionSet {
    let mut groups: BTreeMap<(u64, u64), Vec<usize>> = BTreeMap::new();
    for (i, d) in set.detections.iter().enumerate() {
        groups.entry((d.image_id, d.category_id)).or_default().push(i);
    }

    let by_rank = |&a: &usize, &b: &usize| {
        let (da, db) = (&set.detections[a], &set.detections[b]);
        db.score.total_cmp(&da.score).then(a.cmp(&b))
    };

    let mut kept = Vec::new();
    for mut members in groups.into_values() {
        members.sort_by(by_rank);
        let mut suppressed = vec![false; members.len()];
        for i in 0..members.len() {
            if suppressed[i] {
                continue;
            }
            let keep = &set.detections[members[i]];
            kept.push(members[i]);
            for j in i + 1..members.len() {
                if !suppressed[j] && iou(&keep.bbox, &set.detections[members[j]].bbox) > iou_threshold {
                    suppressed[j] = true;
                }
            }
        }
    }
    kept.sort_by(by_rank);

    DetectionSet {
        source: set.source.clone(),
        detections: kept
            .into_iter()
            .map(|i| set.detections[i].clone())
            .collect::<Vec<Detection>>(),
    }
}
