//! Model output: the detection interchange format and the deterministic
//! geometry around a region-proposal detector (IoU, score filtering,
//! non-maximum suppression, anchor grids, mask reconstruction).

mod anchors;
mod model;
mod nms;

pub use anchors::{generate_anchors, Anchor, DEFAULT_RATIOS, DEFAULT_SCALES};
pub use model::{parse_detections, serialize_detections, validate_detections, Detection, DetectionSet};
pub use nms::{filter_by_score, iou, nms};

use crate::error::{Error, Result};
use crate::raster::{rasterize_rings, BinaryMask};

/// Score threshold applied at evaluation time.
pub const DEFAULT_SCORE_THRESHOLD: f64 = 0.7;

/// IoU above which a lower-scored box is suppressed.
pub const DEFAULT_NMS_IOU: f64 = 0.5;

/// Union of the detections' segmentations on a `width × height` raster.
///
/// A detection without segmentation contributes its box, clipped to the
/// image and filled with the same pixel-center rule as polygons.
pub fn detections_to_mask(detections: &[Detection], width: u32, height: u32) -> Result<BinaryMask> {
    let mut mask = BinaryMask::empty(width, height)?;
    let Some(first) = detections.first() else {
        return Ok(mask);
    };
    for det in detections {
        if det.image_id != first.image_id {
            return Err(Error::InvalidArgument(format!(
                "detections span images {} and {}",
                first.image_id, det.image_id
            )));
        }
        let raster = if det.segmentation.is_empty() {
            rasterize_rings(&[clipped_box_ring(det.bbox, width, height)], width, height)?
        } else {
            rasterize_rings(&det.segmentation, width, height)?
        };
        mask.union_with(&raster)?;
    }
    Ok(mask)
}

fn clipped_box_ring([x, y, w, h]: [f64; 4], width: u32, height: u32) -> Vec<f64> {
    let (w_max, h_max) = (width as f64, height as f64);
    let x0 = x.clamp(0.0, w_max);
    let y0 = y.clamp(0.0, h_max);
    let x1 = (x + w).clamp(0.0, w_max);
    let y1 = (y + h).clamp(0.0, h_max);
    vec![x0, y0, x1, y0, x1, y1, x0, y1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(seg: Vec<Vec<f64>>, bbox: [f64; 4]) -> Detection {
        Detection {
            image_id: 1,
            category_id: 1,
            score: 0.9,
            bbox,
            segmentation: seg,
        }
    }

    #[test]
    fn unit_square_detection() {
        let d = det(vec![vec![3., 5., 4., 5., 4., 6., 3., 6.]], [3., 5., 1., 1.]);
        let m = detections_to_mask(&[d], 8, 8).unwrap();
        assert_eq!(m.pixels().collect::<Vec<_>>(), vec![(3, 5)]);
    }

    #[test]
    fn empty_set_gives_empty_mask() {
        assert_eq!(detections_to_mask(&[], 4, 3).unwrap().area(), 0);
    }

    #[test]
    fn overlapping_polygons_union() {
        let a = det(vec![vec![0., 0., 4., 0., 4., 4., 0., 4.]], [0., 0., 4., 4.]);
        let b = det(vec![vec![2., 2., 6., 2., 6., 6., 2., 6.]], [2., 2., 4., 4.]);
        let single = |d: &Detection| detections_to_mask(std::slice::from_ref(d), 8, 8).unwrap().area();
        let both = detections_to_mask(&[a.clone(), b.clone()], 8, 8).unwrap().area();
        // 16 + 16 - 4 shared pixels
        assert_eq!(both, 28);
        assert!(both <= single(&a) + single(&b));
    }

    #[test]
    fn box_only_fallback() {
        let d = det(vec![], [1., 1., 2., 2.]);
        let m = detections_to_mask(&[d], 4, 4).unwrap();
        assert_eq!(m.pixels().collect::<Vec<_>>(), vec![(1, 1), (2, 1), (1, 2), (2, 2)]);
        let clipped = det(vec![], [-1., 2.5, 10., 10.]);
        assert_eq!(detections_to_mask(&[clipped], 4, 4).unwrap().area(), 4 * 2);
    }

    #[test]
    fn polygon_out_of_bounds() {
        let d = det(vec![vec![0., 0., 9., 0., 9., 9.]], [0., 0., 9., 9.]);
        assert!(matches!(detections_to_mask(&[d], 4, 4), Err(Error::OutOfBounds(_))));
    }

    #[test]
    fn mixed_images_rejected() {
        let a = det(vec![], [0., 0., 1., 1.]);
        let mut b = a.clone();
        b.image_id = 2;
        assert!(detections_to_mask(&[a, b], 4, 4).is_err());
    }
}
