use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::json;

/// One predicted defect instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub image_id: u64,
    pub category_id: u64,
    /// Confidence in `[0, 1]`.
    pub score: f64,
    /// `[x, y, width, height]` in pixels.
    #[serde(serialize_with = "json::bbox")]
    pub bbox: [f64; 4],
    /// Flat polygons; empty for box-only detectors.
    #[serde(default, serialize_with = "json::nested_nums")]
    pub segmentation: Vec<Vec<f64>>,
}

/// Ordered detections from one model run.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectionSet {
    /// Free-form producer label; sweeps read `iter=<N>` from it.
    #[serde(default)]
    pub source: String,
    pub detections: Vec<Detection>,
}

impl DetectionSet {
    pub fn new(source: impl Into<String>, detections: Vec<Detection>) -> Self {
        Self {
            source: source.into(),
            detections,
        }
    }

    pub fn len(&self) -> usize {
        self.detections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detections.is_empty()
    }

    /// Training iteration tagged as `iter=<N>` in `source`, if any.
    pub fn iteration(&self) -> Option<u64> {
        self.source
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .find_map(|tok| tok.strip_prefix("iter="))
            .and_then(|n| n.parse().ok())
    }

    /// Detections of one image, in set order.
    pub fn for_image(&self, image_id: u64) -> Vec<Detection> {
        self.detections
            .iter()
            .filter(|d| d.image_id == image_id)
            .cloned()
            .collect()
    }
}

/// Schema checks beyond JSON shape.
pub fn validate_detections(set: &DetectionSet) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, d) in set.detections.iter().enumerate() {
        let at = |field: &str| format!("detections[{i}].{field}");
        if !(0.0..=1.0).contains(&d.score) {
            out.push(Violation::new(at("score"), "score out of [0,1]"));
        }
        let [_, _, w, h] = d.bbox;
        if d.bbox.iter().any(|v| !v.is_finite()) {
            out.push(Violation::new(at("bbox"), "non-finite bbox"));
        } else if w <= 0.0 || h <= 0.0 {
            out.push(Violation::new(at("bbox"), "bbox width and height must be positive"));
        }
        for (j, poly) in d.segmentation.iter().enumerate() {
            let path = format!("detections[{i}].segmentation[{j}]");
            if poly.len() % 2 != 0 {
                out.push(Violation::new(&path, "polygon has odd coordinate count"));
            } else if poly.len() < 6 {
                out.push(Violation::new(&path, "polygon has fewer than 3 points"));
            }
            if poly.iter().any(|v| !v.is_finite()) {
                out.push(Violation::new(&path, "non-finite coordinate"));
            }
        }
    }
    out
}

/// Parse and validate an interchange document.
pub fn parse_detections(text: &str) -> Result<DetectionSet> {
    let mut de = serde_json::Deserializer::from_str(text);
    let set: DetectionSet = serde_path_to_error::deserialize(&mut de).map_err(Error::json)?;
    de.end().map_err(|e| Error::Json {
        path: ".".into(),
        message: e.to_string(),
    })?;
    let report = validate_detections(&set);
    if report.is_empty() {
        Ok(set)
    } else {
        Err(Error::Invalid(report))
    }
}

pub fn serialize_detections(set: &DetectionSet) -> Result<String> {
    let report = validate_detections(set);
    if !report.is_empty() {
        return Err(Error::Invalid(report));
    }
    Ok(serde_json::to_string(set).expect("detections serialize"))
}
