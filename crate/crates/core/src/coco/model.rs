use std::collections::{BTreeMap, HashSet};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result, Violation};
use crate::json;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocoImage {
    pub id: u64,
    pub file_name: String,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CocoCategory {
    pub id: u64,
    pub name: String,
    #[serde(default)]
    pub supercategory: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocoAnnotation {
    pub id: u64,
    pub image_id: u64,
    pub category_id: u64,
    /// 0 for a single object, 1 for a crowd region. Toolkit output is always 0.
    #[serde(default)]
    pub iscrowd: u8,
    /// Polygons as flat `[x1, y1, x2, y2, ...]` lists.
    #[serde(deserialize_with = "polygons", serialize_with = "json::nested_nums")]
    pub segmentation: Vec<Vec<f64>>,
    #[serde(serialize_with = "json::num")]
    pub area: f64,
    /// `[x, y, width, height]`.
    #[serde(serialize_with = "json::bbox")]
    pub bbox: [f64; 4],
}

/// The three COCO sections this toolkit reads and writes. Other top-level
/// keys (`info`, `licenses`, ...) are ignored on input.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CocoDataset {
    pub images: Vec<CocoImage>,
    pub categories: Vec<CocoCategory>,
    pub annotations: Vec<CocoAnnotation>,
}

fn polygons<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<f64>>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Segmentation {
        Polygons(Vec<Vec<f64>>),
        Rle(#[allow(dead_code)] serde_json::Map<String, serde_json::Value>),
    }
    match Segmentation::deserialize(d) {
        Ok(Segmentation::Polygons(p)) => Ok(p),
        Ok(Segmentation::Rle(_)) => Err(D::Error::custom("unsupported: RLE segmentation")),
        Err(_) => Err(D::Error::custom("expected a list of polygons (lists of numbers)")),
    }
}

impl CocoDataset {
    /// Structural parse only: JSON shape and value types, no invariant checks.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(text);
        let dataset: CocoDataset = serde_path_to_error::deserialize(&mut de).map_err(Error::json)?;
        de.end().map_err(|e| Error::Json {
            path: ".".into(),
            message: e.to_string(),
        })?;
        Ok(dataset)
    }

    pub fn image(&self, id: u64) -> Option<&CocoImage> {
        self.images.iter().find(|im| im.id == id)
    }

    pub fn image_by_name(&self, file_name: &str) -> Option<&CocoImage> {
        self.images.iter().find(|im| im.file_name == file_name)
    }

    /// Annotations grouped by image id.
    pub fn annotations_by_image(&self) -> BTreeMap<u64, Vec<&CocoAnnotation>> {
        let mut out: BTreeMap<u64, Vec<&CocoAnnotation>> = BTreeMap::new();
        for ann in &self.annotations {
            out.entry(ann.image_id).or_default().push(ann);
        }
        out
    }

    /// Category id → name.
    pub fn category_names(&self) -> BTreeMap<u64, String> {
        self.categories.iter().map(|c| (c.id, c.name.clone())).collect()
    }

    /// Copy with every section sorted by id.
    pub fn sorted(&self) -> CocoDataset {
        let mut out = self.clone();
        out.images.sort_by_key(|im| im.id);
        out.categories.sort_by_key(|c| c.id);
        out.annotations.sort_by_key(|a| a.id);
        out
    }
}

/// Parse a COCO document and reject it if any invariant is violated.
pub fn parse_coco(text: &str) -> Result<CocoDataset> {
    let dataset = CocoDataset::from_json(text)?;
    let report = validate(&dataset);
    if report.is_empty() {
        Ok(dataset)
    } else {
        Err(Error::Invalid(report))
    }
}

/// Deterministic compact JSON with every section ordered by id.
pub fn serialize_coco(dataset: &CocoDataset) -> Result<String> {
    let report = validate(dataset);
    if !report.is_empty() {
        return Err(Error::Invalid(report));
    }
    Ok(serde_json::to_string(&dataset.sorted()).expect("dataset serializes"))
}

/// Every broken invariant of `dataset`; empty when the dataset is valid.
pub fn validate(dataset: &CocoDataset) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut images = BTreeMap::new();
    for (i, im) in dataset.images.iter().enumerate() {
        if im.id == 0 {
            out.push(Violation::new(format!("images[{i}].id"), "id must be positive"));
        }
        if im.width == 0 || im.height == 0 {
            out.push(Violation::new(
                format!("images[{i}]"),
                format!("dimensions must be positive, got {}x{}", im.width, im.height),
            ));
        }
        if images.insert(im.id, im).is_some() {
            out.push(Violation::new("images", format!("duplicate image id {}", im.id)));
        }
    }

    let mut categories = HashSet::new();
    for (i, c) in dataset.categories.iter().enumerate() {
        if c.id == 0 {
            out.push(Violation::new(format!("categories[{i}].id"), "id must be positive"));
        }
        if !categories.insert(c.id) {
            out.push(Violation::new("categories", format!("duplicate category id {}", c.id)));
        }
    }

    let mut annotations = HashSet::new();
    for (i, a) in dataset.annotations.iter().enumerate() {
        let at = |field: &str| format!("annotations[{i}].{field}");
        if a.id == 0 {
            out.push(Violation::new(at("id"), "id must be positive"));
        }
        if !annotations.insert(a.id) {
            out.push(Violation::new(
                "annotations",
                format!("duplicate annotation id {}", a.id),
            ));
        }
        let image = images.get(&a.image_id);
        if image.is_none() {
            out.push(Violation::new(
                at("image_id"),
                format!("unknown image id {}", a.image_id),
            ));
        }
        if !categories.contains(&a.category_id) {
            out.push(Violation::new(
                at("category_id"),
                format!("unknown category id {}", a.category_id),
            ));
        }
        if a.iscrowd > 1 {
            out.push(Violation::new(at("iscrowd"), "iscrowd must be 0 or 1"));
        }
        if a.segmentation.is_empty() {
            out.push(Violation::new(at("segmentation"), "segmentation is empty"));
        }
        for (j, poly) in a.segmentation.iter().enumerate() {
            let path = format!("annotations[{i}].segmentation[{j}]");
            if poly.len() % 2 != 0 {
                out.push(Violation::new(&path, "polygon has odd coordinate count"));
            } else if poly.len() < 6 {
                out.push(Violation::new(&path, "polygon has fewer than 3 points"));
            }
            if poly.iter().any(|v| !v.is_finite()) {
                out.push(Violation::new(&path, "non-finite coordinate"));
            } else if let Some(im) = image {
                let outside = poly
                    .chunks_exact(2)
                    .any(|p| p[0] < 0.0 || p[1] < 0.0 || p[0] > im.width as f64 || p[1] > im.height as f64);
                if outside {
                    out.push(Violation::new(&path, "polygon vertex outside the image"));
                }
            }
        }
        let [x, y, w, h] = a.bbox;
        if a.bbox.iter().any(|v| !v.is_finite()) {
            out.push(Violation::new(at("bbox"), "non-finite bbox"));
        } else {
            if w <= 0.0 || h <= 0.0 {
                out.push(Violation::new(at("bbox"), "bbox width and height must be positive"));
            }
            if let Some(im) = image {
                if x < 0.0 || y < 0.0 || x + w > im.width as f64 || y + h > im.height as f64 {
                    out.push(Violation::new(
                        at("bbox"),
                        format!("bbox extends past the {}x{} image", im.width, im.height),
                    ));
                }
            }
        }
        if !(a.area.is_finite() && a.area > 0.0) {
            out.push(Violation::new(at("area"), "area must be positive"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_block() -> CocoDataset {
        CocoDataset {
            images: vec![CocoImage {
                id: 1,
                file_name: "a.png".into(),
                width: 8,
                height: 8,
            }],
            categories: vec![CocoCategory {
                id: 1,
                name: "defect".into(),
                supercategory: String::new(),
            }],
            annotations: vec![CocoAnnotation {
                id: 1,
                image_id: 1,
                category_id: 1,
                iscrowd: 0,
                segmentation: vec![vec![1., 1., 2., 1., 3., 1., 3., 2., 3., 3., 2., 3., 1., 3., 1., 2.]],
                area: 4.0,
                bbox: [1., 1., 2., 2.],
            }],
        }
    }

    #[test]
    fn empty_dataset_serializes() {
        let text = serialize_coco(&CocoDataset::default()).unwrap();
        assert_eq!(text, r#"{"images":[],"categories":[],"annotations":[]}"#);
    }

    #[test]
    fn integers_stay_integers() {
        let text = serialize_coco(&one_block()).unwrap();
        assert!(text.contains(r#""bbox":[1,1,2,2]"#), "{text}");
        assert!(text.contains(r#""area":4"#), "{text}");
        assert_eq!(
            text,
            r#"{"images":[{"id":1,"file_name":"a.png","width":8,"height":8}],"categories":[{"id":1,"name":"defect","supercategory":""}],"annotations":[{"id":1,"image_id":1,"category_id":1,"iscrowd":0,"segmentation":[[1,1,2,1,3,1,3,2,3,3,2,3,1,3,1,2]],"area":4,"bbox":[1,1,2,2]}]}"#
        );
        assert_eq!(parse_coco(&text).unwrap(), one_block());
    }

    #[test]
    fn decimals_are_accepted() {
        let text = r#"{"images":[{"id":1,"file_name":"a","width":4,"height":4}],
            "categories":[{"id":1,"name":"d"}],
            "annotations":[{"id":1,"image_id":1,"category_id":1,"iscrowd":0,
              "segmentation":[[0.5,0.5,3.5,0.5,3.5,3.5]],"area":4.5,"bbox":[0.5,0.5,3,3.0]}],
            "info":{"year":2021},"licenses":[]}"#;
        let d = parse_coco(text).unwrap();
        assert_eq!(d.annotations[0].area, 4.5);
        let again = parse_coco(&serialize_coco(&d).unwrap()).unwrap();
        assert_eq!(again, d);
    }

    #[test]
    fn missing_section_is_named() {
        let err = parse_coco(r#"{"images":[],"annotations":[]}"#).unwrap_err();
        assert!(err.to_string().contains("categories"), "{err}");
    }

    #[test]
    fn wrong_type_reports_path() {
        let mut d: serde_json::Value = serde_json::from_str(&serialize_coco(&one_block()).unwrap()).unwrap();
        d["annotations"][0]["bbox"] = serde_json::json!("wide");
        let err = parse_coco(&d.to_string()).unwrap_err();
        assert!(err.to_string().contains("annotations[0].bbox"), "{err}");
    }

    #[test]
    fn rle_is_rejected() {
        let mut d: serde_json::Value = serde_json::from_str(&serialize_coco(&one_block()).unwrap()).unwrap();
        d["annotations"][0]["segmentation"] = serde_json::json!({"counts": [0, 4], "size": [8, 8]});
        let err = parse_coco(&d.to_string()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unsupported: RLE"), "{msg}");
        assert!(msg.contains("annotations[0].segmentation"), "{msg}");
    }

    #[test]
    fn short_polygon_is_invalid() {
        let mut d = one_block();
        d.annotations[0].segmentation = vec![vec![1., 1., 2., 2.]];
        let err = parse_coco(&serde_json::to_string(&d).unwrap()).unwrap_err();
        assert!(err.to_string().contains("polygon has fewer than 3 points"), "{err}");
    }

    #[test]
    fn validation_findings() {
        assert!(validate(&one_block()).is_empty());

        let mut d = one_block();
        d.images.push(d.images[0].clone());
        let v = validate(&d);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].path, "images");

        let mut d = one_block();
        d.annotations[0].bbox = [6., 1., 4., 2.];
        let v = validate(&d);
        assert_eq!(v.len(), 1, "{v:?}");
        assert_eq!(v[0].path, "annotations[0].bbox");

        let mut d = one_block();
        d.annotations[0].image_id = 9;
        d.annotations[0].category_id = 9;
        let paths: Vec<String> = validate(&d).into_iter().map(|v| v.path).collect();
        assert_eq!(paths, vec!["annotations[0].image_id", "annotations[0].category_id"]);
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        assert!(CocoDataset::from_json(r#"{"images":[],"categories":[],"annotations":[]} x"#).is_err());
        assert!(CocoDataset::from_json("{").is_err());
    }
}
