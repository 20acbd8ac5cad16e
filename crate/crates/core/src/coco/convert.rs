//! Ground-truth masks ⇄ COCO annotations.

use std::collections::BTreeMap;

use super::model::{validate, CocoAnnotation, CocoCategory, CocoDataset, CocoImage};
use crate::error::{Error, Result};
use crate::raster::{connected_components, rasterize_rings, trace_boundary, BinaryMask, Connectivity};

/// One ground-truth image: its file name, pixel size and defect mask.
#[derive(Debug, Clone)]
pub struct MaskEntry {
    pub file_name: String,
    pub width: u32,
    pub height: u32,
    pub mask: BinaryMask,
}

/// Build a single-category dataset with one annotation per 8-connected
/// defect blob.
///
/// Image ids follow input order from 1; annotation ids are global and follow
/// (image, component) order. Holes inside a blob are filled, and the area is
/// the hole-filled pixel count.
pub fn masks_to_coco(entries: &[MaskEntry], category_name: &str) -> Result<CocoDataset> {
    let mut dataset = CocoDataset {
        images: Vec::with_capacity(entries.len()),
        categories: vec![CocoCategory {
            id: 1,
            name: category_name.to_string(),
            supercategory: String::new(),
        }],
        annotations: Vec::new(),
    };

    for (i, entry) in entries.iter().enumerate() {
        if entry.mask.width() != entry.width || entry.mask.height() != entry.height {
            return Err(Error::DimensionMismatch(format!(
                "{}: image is {}x{} but mask is {}x{}",
                entry.file_name,
                entry.width,
                entry.height,
                entry.mask.width(),
                entry.mask.height()
            )));
        }
        let image_id = i as u64 + 1;
        dataset.images.push(CocoImage {
            id: image_id,
            file_name: entry.file_name.clone(),
            width: entry.width,
            height: entry.height,
        });
        for component in connected_components(&entry.mask, Connectivity::Eight) {
            let polygon = trace_boundary(&component);
            dataset.annotations.push(CocoAnnotation {
                id: dataset.annotations.len() as u64 + 1,
                image_id,
                category_id: 1,
                iscrowd: 0,
                segmentation: vec![polygon.to_flat()],
                area: polygon.signed_area() as f64,
                bbox: component.bbox.to_array(),
            });
        }
    }
    Ok(dataset)
}

/// Rasterize one annotation's polygons (union) at the size of `image`.
pub fn annotation_mask(annotation: &CocoAnnotation, image: &CocoImage) -> Result<BinaryMask> {
    rasterize_rings(&annotation.segmentation, image.width, image.height)
}

/// Per-image union of all annotation rasters.
pub fn coco_to_masks(dataset: &CocoDataset) -> Result<BTreeMap<u64, BinaryMask>> {
    let report = validate(dataset);
    if !report.is_empty() {
        return Err(Error::Invalid(report));
    }
    let mut masks = BTreeMap::new();
    for image in &dataset.images {
        masks.insert(image.id, BinaryMask::empty(image.width, image.height)?);
    }
    for ann in &dataset.annotations {
        let image = dataset.image(ann.image_id).ok_or(Error::UnknownImage(ann.image_id))?;
        let raster = annotation_mask(ann, image)?;
        masks
            .get_mut(&ann.image_id)
            .expect("mask allocated per image")
            .union_with(&raster)?;
    }
    Ok(masks)
}
